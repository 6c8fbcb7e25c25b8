#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "hsf/propagators.hpp"

using namespace hsf;

namespace {

PropagatorQuery make(const BoundaryKind& bc, double p, double z, double zp, double lam, double lam0) {
  PropagatorQuery q;
  q.p = p;
  q.z = z;
  q.zp = zp;
  q.ctx = {1.0, bc};
  q.cut = {lam, lam0};
  return q;
}

// Proper-time integral in the linear variable by tanh-sinh.
double flowing_oracle(const PropagatorQuery& q, Part part) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double k2 = q.p * q.p + q.ctx.mass * q.ctx.mass;
  auto f = [&](double lam) {
    double k = part == Part::Bulk      ? p_bulk(lam, q.z, q.zp)
               : part == Part::Surface ? surface_kernel_value(q.ctx.bc, lam, q.z, q.zp)
                                       : kernel_value(q.ctx.bc, lam, q.z, q.zp);
    return k * std::exp(-lam * k2);
  };
  double lo = 1.0 / (q.cut.lambda0 * q.cut.lambda0), hi = 1.0 / (q.cut.lambda * q.cut.lambda);
  return ts.integrate(f, lo, hi, 1e-13);
}

const BoundaryKind kBcs[] = {BoundaryKind::dirichlet(), BoundaryKind::neumann(), BoundaryKind::robin(0.5),
                             BoundaryKind::robin(2.0)};

}  // namespace

TEST_SUITE("propagators") {

TEST_CASE("flowing propagator agrees with a tanh-sinh oracle") {
  for (const auto& bc : kBcs)
    for (Part part : {Part::Full, Part::Bulk, Part::Surface}) {
      auto q = make(bc, 0.7, 0.3, 1.1, 0.8, 6.0);
      CHECK(flowing_propagator(q, part) == doctest::Approx(flowing_oracle(q, part)).epsilon(1e-10));
    }
}

TEST_CASE("flowing propagator plus cutoff tails reproduces the closed form") {
  for (const auto& bc : kBcs)
    for (double p : {0.0, 1.0, 5.0})
      for (double z : {0.1, 1.0})
        for (double zp : {0.1, 3.0}) {
          auto q = make(bc, p, z, zp, 1e-3, 1e3);
          double sum = flowing_propagator(q, Part::Full) + cutoff_tails(q, Part::Full);
          CHECK(std::abs(sum - proper_time_propagator(bc, p, z, zp, 1.0)) < 1e-10);
        }
}

TEST_CASE("proper-time closed form against direct integration") {
  boost::math::quadrature::exp_sinh<double> es;
  for (const auto& bc : kBcs)
    for (double p : {0.0, 1.5})
      for (double z : {0.3, 1.2}) {
        const double zp = 0.7, k2 = p * p + 1.0;
        auto f = [&](double lam) { return kernel_value(bc, lam, z, zp) * std::exp(-lam * k2); };
        CHECK(proper_time_propagator(bc, p, z, zp, 1.0) == doctest::Approx(es.integrate(f, 1e-13)).epsilon(1e-10));
        // the literal closed form is the same expression at variance 2 tau
        CHECK(proper_time_propagator(bc, p, z, zp, 1.0) ==
              doctest::Approx(2.0 * closed_form_propagator(bc, std::sqrt(2.0) * p, z, zp, std::sqrt(2.0))).epsilon(1e-14));
      }
  CHECK(closed_form_propagator(BoundaryKind::dirichlet(), 0.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(0.5 * (1.0 - std::exp(-2.0))).epsilon(1e-15));
}

TEST_CASE("ultraviolet tail at coincident points matches its leading term") {
  // int_0^{1/L0^2} (2 pi s)^{-1/2} e^{-s} ds ~ 2 / (L0 sqrt(2 pi))
  auto q = make(BoundaryKind::bulk(), 0.0, 1.0, 1.0, 1e-3, 1e3);
  double gap = proper_time_propagator(BoundaryKind::bulk(), 0.0, 1.0, 1.0, 1.0) - flowing_propagator(q, Part::Full);
  CHECK(gap == doctest::Approx(2e-3 / std::sqrt(2 * std::numbers::pi)).epsilon(1e-5));
}

TEST_CASE("additivity of bulk and surface parts") {
  for (const auto& bc : kBcs) {
    auto q = make(bc, 0.4, 0.2, 0.9, 0.5, 20.0);
    double full = flowing_propagator(q, Part::Full);
    double sum = flowing_propagator(q, Part::Bulk) + flowing_propagator(q, Part::Surface);
    CHECK(std::abs(full - sum) < 1e-10);
  }
}

TEST_CASE("scale derivative matches a central difference") {
  for (const auto& bc : kBcs) {
    auto q = make(bc, 0.5, 0.4, 0.9, 2.0, 50.0);
    const double h = 1e-3;
    auto qp = q, qm = q;
    qp.cut.lambda += h;
    qm.cut.lambda -= h;
    double fd = (flowing_propagator(qp, Part::Full) - flowing_propagator(qm, Part::Full)) / (2 * h);
    double an = propagator_derivative(q, Part::Full);
    CHECK(fd == doctest::Approx(an).epsilon(1e-6));
  }
}

TEST_CASE("closed forms: Robin limits and boundary conditions") {
  const double p = 0.3, zp = 0.8, m = 1.0;
  CHECK(closed_form_propagator(BoundaryKind::robin(0.0), p, 0.2, zp, m) ==
        closed_form_propagator(BoundaryKind::neumann(), p, 0.2, zp, m));
  CHECK(closed_form_propagator(BoundaryKind::robin(INFINITY), p, 0.2, zp, m) ==
        doctest::Approx(closed_form_propagator(BoundaryKind::dirichlet(), p, 0.2, zp, m)).epsilon(1e-15));
  const double c = 1.3, h = 1e-6;
  auto bc = BoundaryKind::robin(c);
  double d = (closed_form_propagator(bc, p, h, zp, m) - closed_form_propagator(bc, p, 0.0, zp, m)) / h;
  CHECK(d == doctest::Approx(c * closed_form_propagator(bc, p, 0.0, zp, m)).epsilon(1e-5));
}

TEST_CASE("momentum integral of the cutoff derivative") {
  for (double L : {0.3, 1.0, 7.0}) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double k) { return 4 * std::numbers::pi * k * k * cdot(L, k, 1.0); };
    double num = ts.integrate(f, 0.0, 40.0 * L, 1e-13) / std::pow(2 * std::numbers::pi, 3);
    CHECK(cdot_momentum_integral(L, 1.0) == doctest::Approx(num).epsilon(1e-10));
  }
}

TEST_CASE("covariance envelope holds off the fit grid") {
  for (int w = 0; w <= 3; ++w) {
    auto rep = covariance_bound_check(w, {1.0, 0.0, 0.5});
    CHECK(rep.finite);
    CHECK(rep.degree == w + 2);
    CHECK(rep.worst_ratio <= 1.0 + 1e-6);
  }
}

TEST_CASE("cutoff and query errors") {
  auto q = make(BoundaryKind::neumann(), 0.0, 0.1, 0.1, 2.0, 1.0);
  CHECK_THROWS_AS(flowing_propagator(q, Part::Full), std::domain_error);
  q.cut = {1.0, 1.0};
  CHECK(flowing_propagator(q, Part::Full) == 0.0);
  q.z = -1.0;
  CHECK_THROWS_AS(flowing_propagator(q, Part::Full), std::domain_error);
  CHECK_THROWS_AS(parse_part("half"), std::invalid_argument);
  CHECK_THROWS_AS(cdot_momentum_integral(0.0, 1.0), std::domain_error);
}

}  // TEST_SUITE
