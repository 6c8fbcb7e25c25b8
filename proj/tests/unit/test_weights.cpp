#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hsf/weights.hpp"

using namespace hsf;

namespace {

double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// int_0^inf p(a; y, z) p(b; z, 0) dz
double two_line_chain(double a, double b, double y) {
  return p_bulk(a + b, y, 0.0) * Phi(b * y / (a + b) / std::sqrt(a * b / (a + b)));
}

// int_0^inf p(A; y1, z) p(B; y2, z) p(C; z, 0) dz
double star3(double A, double B, double C, double y1, double y2) {
  double prec = 1 / A + 1 / B + 1 / C, mean = (y1 / A + y2 / B) / prec, var = 1 / prec;
  double q = y1 * y1 / A + y2 * y2 / B - mean * mean * prec;
  return std::pow(2 * std::numbers::pi, -1.5) / std::sqrt(A * B * C) * std::exp(-0.5 * q) *
         std::sqrt(2 * std::numbers::pi * var) * Phi(mean / std::sqrt(var));
}

}  // namespace

TEST_SUITE("weights") {

TEST_CASE("line kinds and pointwise weight factor") {
  Tree t = chain_tree(1, 2, 1);  // y - z1 - z2 - 0
  auto kinds = line_kinds(t);
  CHECK(kinds[0] == LineKind::External);
  CHECK(kinds[1] == LineKind::Internal);
  CHECK(kinds[2] == LineKind::Surface);
  WeightQuery q{{0.7}, {0.4}, {1.0, 3.0}};
  auto lines = uniform_lines(t, 2.0, 1.5, 0.2);
  double w = weight_factor(t, lines, q, {0.3, 1.1});
  double ref = p_bulk(1.2 * 0.4, 0.7, 0.3) * p_bulk(1.2 / 4.0, 0.3, 1.1) * p_bulk(1.2 / 2.25, 1.1, 0.0);
  CHECK(w == doctest::Approx(ref).epsilon(1e-14));
  CHECK(weight_factor(t, lines, q, {0.3, 1.1}) == weight_factor(t, lines, q, {0.3, 1.1}));
}

TEST_CASE("grid integral against nested quadrature on a two-vertex chain") {
  double worst = 0.0;
  for (double y : {0.0, 1.0, 4.0})
    for (double tau : {0.1, 1.0, 10.0})
      for (double L : {1.0, 2.0, 4.0}) {
        WeightEngine e(WeightQuery{{y}, {tau}, {1.0, 4.0}});
        double v = e.tree_at(chain_tree(1, 2, 1), 0.5, false, L, L)(0);
        double ref = chain_integral_nested(y, {1.5 * tau, 1.5 / (L * L), 1.5 / (L * L)}, 0.0);
        worst = std::max(worst, std::abs(v - ref) / ref);
      }
  CHECK(worst < 1e-7);
}

TEST_CASE("grid integral against Gaussian closed forms") {
  double worst_chain = 0.0, worst_star = 0.0;
  for (double y : {0.0, 0.7, 2.0})
    for (double tau : {0.1, 1.0, 10.0})
      for (double L : {1.0, 4.0})
        for (double d : {0.05, 0.9}) {
          WeightEngine e(WeightQuery{{y, 0.5 * y}, {tau, 2 * tau}, {1.0, 4.0}});
          double v = e.tree_at(chain_tree(1, 1, 1), d, true, L, L)(0);
          double ref = two_line_chain((1 + d) * 2 * tau, (1 + d) / (L * L), y);
          worst_chain = std::max(worst_chain, std::abs(v - ref) / ref);
          double v2 = e.tree_at(star_tree({1, 2}, 1), d, false, L, L)(0);
          double ref2 = star3((1 + d) * tau, (1 + d) * 2 * tau, (1 + d) / (L * L), y, 0.5 * y);
          worst_star = std::max(worst_star, std::abs(v2 - ref2) / ref2);
        }
  CHECK(worst_chain < 1e-9);
  CHECK(worst_star < 1e-9);
}

TEST_CASE("semi-analytic bulk chains agree with the grid") {
  for (int k : {1, 2}) {
    Tree t = bulk_chain(1, 2, k, 1);
    WeightQuery q{{0.4, 1.3}, {0.5, 0.8}, {1.0, 3.0}};
    SupOptions fast, grid;
    grid.bulk_chain_closed_form = false;
    WeightEngine a(q, fast), b(q, grid);
    for (double L : {1.0, 2.0, 3.0}) {
      double va = a.tree_at(t, 0.3, false, L, L)(0), vb = b.tree_at(t, 0.3, false, L, L)(0);
      CHECK(va == doctest::Approx(vb).epsilon(1e-8));
    }
  }
}

TEST_CASE("batched columns equal unbatched evaluations") {
  std::vector<double> batch{0.0, 0.5, 2.0};
  WeightQuery q{{0.8, 0.0}, {0.6, 0.5}, {1.0, 2.0}};
  WeightEngine eb(q, {}, {2}, batch);
  Eigen::RowVectorXd row = eb.tree_at(star_tree({1, 2}, 1), 0.3, false, 1.5, 1.2);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    WeightQuery qj = q;
    qj.positions[1] = batch[j];
    WeightEngine e(qj);
    CHECK(row(j) == doctest::Approx(e.tree_at(star_tree({1, 2}, 1), 0.3, false, 1.5, 1.2)(0)).epsilon(1e-10));
  }
}

TEST_CASE("sup over scales dominates the endpoint and any fixed scale") {
  WeightQuery q{{1.0}, {0.5}, {1.0, 4.0}};
  Tree t = chain_tree(1, 1, 1);
  auto d = integrated_weight_factor(t, q, 0.3);
  CHECK(d.value >= d.endpoint);
  WeightEngine e(q);
  for (double L : {1.0, 1.7, 2.9, 4.0}) CHECK(d.value >= e.tree_at(t, 0.3, false, L, L)(0) * (1 - 1e-12));
  CHECK(d.lambda_internal >= 1.0);
  CHECK(d.lambda_surface <= 4.0);
}

TEST_CASE("global factor sums its forests") {
  WeightQuery q{{0.5, 1.0}, {0.7, 0.9}, {1.0, 2.0}};
  double g = global_weight_factor(2, 1, q, Family::Surface, 0.3);
  // the global factor skips the refinement pass
  SupOptions plain;
  plain.refine = false;
  double sum = 0.0;
  for (const auto& w : enumerate_all_forests(2, 1, 8)) sum += integrated_weight_factor(w, q, 0.3, plain);
  CHECK(g == doctest::Approx(sum).epsilon(1e-12));
  CHECK(g > 0.0);
}

TEST_CASE("chain collapse sandwich") {
  WeightQuery q{{0.6, 1.4}, {0.3, 0.8}, {1.0, 3.0}};
  for (int v1 = 0; v1 <= 2; ++v1)
    for (int v0 = 0; v0 <= 1; ++v0) {
      Tree t = three_arm_tree(v1, 1, v0, 2);
      auto cc = chain_collapse(t, uniform_lines(t, 2.0, 1.5, 0.4), q);
      CHECK(cc.weight <= cc.bound * (1 + 1e-7));
      CHECK(cc.bound <= std::ldexp(1.0, cc.v()) * cc.weight);
    }
}

TEST_CASE("argument errors") {
  WeightQuery q{{0.5}, {0.0}, {1.0, 2.0}};
  CHECK_THROWS_AS(check_query(q), std::domain_error);
  q.tau = {1.0};
  Tree t = chain_tree(1, 1, 1);
  CHECK_THROWS_AS(integrated_weight_factor(t, q, 1.5), std::domain_error);
  Tree t2 = chain_tree(1, 2, 1);
  CHECK_THROWS_AS(check_lines(t2, uniform_lines(t2, 5.0, 1.0, 0.2), q.cut), std::domain_error);
  CHECK_THROWS_AS(check_lines(t2, uniform_lines(t2, 1.5, 1.0, 1.2), q.cut), std::domain_error);
  CHECK_NOTHROW(check_lines(t2, uniform_lines(t2, 1.5, 1.0, 0.2), q.cut));
  SupOptions small;
  small.max_internal = 2;
  CHECK_THROWS_AS(integrated_weight_factor(chain_tree(1, 3, 2), q, 0.2, small), CapacityError);
  CHECK_THROWS_AS(global_weight_factor(5, 1, q, Family::Surface, 0.2), CapacityError);
  CHECK_THROWS_AS(parse_family("loop"), std::invalid_argument);
}

}  // TEST_SUITE
