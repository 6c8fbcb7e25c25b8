#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hsf/flow.hpp"
#include "hsf/propagators.hpp"
#include "hsf/weights.hpp"

using namespace hsf;
using namespace hsf::flow;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

const double kPi32 = std::pow(std::numbers::pi, 1.5);

FlowConfig config(const BoundaryKind& bc, double lambda0) {
  FlowConfig c;
  c.bc = bc;
  c.lambda0 = lambda0;
  return c;
}

// a_1 at lambda0: int_0^L0 (g/2)(L/sqrt(2 pi)) (-e^{-m^2/L^2} / (4 pi^{3/2})) dL, 50 digits
double a1_oracle(double g, double m, double lambda0) {
  using boost::math::quadrature::tanh_sinh;
  tanh_sinh<big> ts;
  const big pi = boost::math::constants::pi<big>();
  auto f = [&](big L) -> big {
    if (L == 0) return big(0);
    return big(g) / 2 * L / sqrt(2 * pi) * (-exp(-big(m * m) / (L * L)) / (4 * pow(pi, big(1.5))));
  };
  return static_cast<double>(ts.integrate(f, big(0), big(lambda0)));
}

// Neumann: int p_S(z, z) dz = 1/4 and int z p_S(z, z) dz = 1 / (4 sqrt(2 pi) L)
double neumann_s_closed(double g, double L0) {
  double I = L0 * std::exp(-1.0 / (L0 * L0)) - std::sqrt(std::numbers::pi) * std::erfc(1.0 / L0);
  return -g / 2.0 / (4.0 * kPi32) * 0.25 * I;
}
double neumann_e_closed(double g, double L0) {
  double I = 0.5 * boost::math::expint(1, 1.0 / (L0 * L0));
  return -g / 2.0 / (4.0 * kPi32) / (4.0 * std::sqrt(2.0 * std::numbers::pi)) * I;
}

// Fish by brute force on (z, z') with the full kernels, for a narrow
// proper-time window. Returns {bulk part without contact term, surface part}.
std::pair<double, double> fish_oracle(const BoundaryKind& bc, double g, double m, double lambda,
                                      double lambda0, const FourPointKinematics& k) {
  auto lrule = quad::gauss_legendre<8>({1.0 / (lambda0 * lambda0), 1.0 / (lambda * lambda)});
  auto zr = quad::gauss_legendre<8>(quad::linspace(0.0, 8.0, 81));
  const std::size_t nz = zr.size();
  const int channels[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  std::vector<Eigen::VectorXd> left, right;
  for (const auto& ch : channels) {
    Eigen::VectorXd P(nz), Q(nz);
    for (std::size_t i = 0; i < nz; ++i) {
      double z = zr.x[i];
      P(i) = zr.w[i] * p_bulk(k.tau[ch[0]], z, k.y[ch[0]]) * p_bulk(k.tau[ch[1]], z, k.y[ch[1]]);
      Q(i) = zr.w[i] * p_bulk(k.tau[ch[2]], z, k.y[ch[2]]) * p_bulk(k.tau[ch[3]], z, k.y[ch[3]]);
    }
    left.push_back(P);
    right.push_back(Q);
  }
  std::vector<Eigen::MatrixXd> full, free;
  for (std::size_t a = 0; a < lrule.size(); ++a) {
    Eigen::MatrixXd F(nz, nz), B(nz, nz);
    for (std::size_t i = 0; i < nz; ++i)
      for (std::size_t j = 0; j < nz; ++j) {
        F(i, j) = kernel_value(bc, lrule.x[a], zr.x[i], zr.x[j]);
        B(i, j) = p_bulk(lrule.x[a], zr.x[i], zr.x[j]);
      }
    full.push_back(F);
    free.push_back(B);
  }
  double bulk = 0.0, surf = 0.0;
  for (std::size_t a = 0; a < lrule.size(); ++a)
    for (std::size_t b = 0; b < lrule.size(); ++b) {
      double S = lrule.x[a] + lrule.x[b];
      double lw = lrule.w[a] * lrule.w[b] * std::exp(-S * m * m) * std::pow(4 * std::numbers::pi * S, -1.5);
      Eigen::MatrixXd bb = free[a].cwiseProduct(free[b]);
      Eigen::MatrixXd ss = full[a].cwiseProduct(full[b]) - bb;
      for (std::size_t c = 0; c < 3; ++c) {
        bulk += lw * left[c].dot(bb * right[c]);
        surf += lw * left[c].dot(ss * right[c]);
      }
    }
  return {-0.5 * g * g * bulk, -0.5 * g * g * surf};
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("schedules") {
  auto s = log_schedule(10.0, 0.01, 400);
  CHECK(s.front() == 10.0);
  CHECK(s.back() == 0.0);
  CHECK(s[s.size() - 2] == doctest::Approx(0.01));
  CHECK(s.size() == 1200 + 2);
  CHECK_NOTHROW(check_schedule(s));
  CHECK_THROWS_AS(check_schedule({10.0, 1.0}), IncompleteFlowError);
  CHECK_THROWS_AS(check_schedule({10.0, 11.0, 0.0}), std::invalid_argument);
  FlowConfig cfg = config(BoundaryKind::neumann(), 10.0);
  CHECK_THROWS_AS(integrate_bulk_tadpole(cfg, {10.0, 5.0, 1.0}), IncompleteFlowError);
}

TEST_CASE("grid integrates smooth profiles") {
  auto g = GridSpec::standard(1.0, 50.0);
  CHECK(g.z.size() == 257);
  CHECK(g.z.front() == 0.0);
  std::vector<double> f(g.z.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-g.z[i]);
  const double exact = 1.0 - std::exp(-10.0);
  const double err = std::abs(g.integrate(f) - exact);
  CHECK(err < 2e-9);
  // composite Simpson in the mapped variable: doubling the nodes cuts the error ~16x
  auto fine = GridSpec::standard(1.0, 50.0, 513);
  std::vector<double> ff(fine.z.size());
  for (std::size_t i = 0; i < ff.size(); ++i) ff[i] = std::exp(-fine.z[i]);
  CHECK(err / std::abs(fine.integrate(ff) - exact) == doctest::Approx(16.0).epsilon(0.1));
  CHECK_THROWS_AS(GridSpec::standard(1.0, 50.0, 256), std::invalid_argument);
}

TEST_CASE("rk4 is fourth order on an exact problem") {
  auto rhs = [](double x, const Eigen::VectorXd&) {
    Eigen::VectorXd d(1);
    d(0) = std::cos(x);
    return d;
  };
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
  auto err = [&](int n) { return std::abs(rk4(rhs, y0, quad::linspace(0.0, 2.0, n + 1)).back()(0) - std::sin(2.0)); };
  CHECK(err(20) / err(40) == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("tree level") {
  auto g = GridSpec::standard(1.0, 10.0, 33);
  auto t = tree_level_init(1.5, g);
  CHECK(t.d4.c.size() == g.z.size());
  CHECK(t.d4.c[5] == 1.5);
  CHECK(t.d2.a.empty());
  CHECK(t.s4.c.empty());
  CHECK(extract_relevant_terms(t.s2, TermKind::Surface).s_surf == 0.0);
  auto zero = tree_level_init(0.0, g);
  CHECK(zero.d4.c[0] == 0.0);

  std::vector<double> tau{0.5, 1.0, 1.5, 2.0}, y{0.2, 0.4, 1.0, 0.0};
  auto f = [&](double z) {
    double v = 1.5;
    for (int i = 0; i < 4; ++i) v *= p_bulk(tau[i], z, y[i]);
    return v;
  };
  double ref = quad::gk(f, 0.0, 30.0, 1e-13);
  CHECK(fold_contact4(1.5, tau, y) == doctest::Approx(ref).epsilon(1e-11));
}

TEST_CASE("relevant-term extraction examples") {
  auto g = GridSpec::standard(1.0, 10.0, 33);
  CorrelationObject o;
  o.l = 1;
  o.z = g.z;
  o.zw = g.zw;
  o.p = {0.0};
  o.a = {std::vector<double>(g.z.size(), 0.7)};
  auto t = extract_relevant_terms(o, TermKind::Bulk);
  CHECK(t.a[3] == 0.7);
  CHECK(t.s[3] == 0.0);
  CHECK(t.d[3] == 0.0);

  CorrelationObject srf = o;
  srf.surface = true;
  srf.a = {};
  srf.s0 = 0.3;
  srf.e0 = -0.2;
  auto st = extract_relevant_terms(srf, TermKind::Surface);
  CHECK(st.s_surf == 0.3);
  CHECK(st.e_surf == -0.2);
  CHECK(st.h_surf == -0.2);

  // A(p) = 1 + 3 p^2 + 5 p^4 on the stencil gives b = 3
  const double h = 1e-2;
  CorrelationObject pb = o;
  pb.p = {0.0, h, 2 * h, 4 * h};
  pb.a.clear();
  for (double p : pb.p) pb.a.push_back(std::vector<double>(g.z.size(), 1.0 + 3 * p * p + 5 * std::pow(p, 4)));
  CHECK(extract_relevant_terms(pb, TermKind::Bulk).b[0] == doctest::Approx(3.0).epsilon(1e-9));

  CorrelationObject moving = o;
  moving.p = {0.5};
  CHECK_THROWS_AS(extract_relevant_terms(moving, TermKind::Bulk), PreconditionError);
  CorrelationObject gap = pb;
  gap.p = {0.0, h, 3 * h, 4 * h};
  CHECK_THROWS_AS(extract_relevant_terms(gap, TermKind::Bulk), PreconditionError);
}

TEST_CASE("bulk tadpole against a 50-digit oracle") {
  FlowConfig cfg = config(BoundaryKind::neumann(), 10.0);
  auto t = integrate_bulk_tadpole(cfg);
  double ref = a1_oracle(1.0, 1.0, 10.0);
  CHECK(ref == doctest::Approx(-0.425244043486708).epsilon(1e-13));
  CHECK(t.a_lambda0 == doctest::Approx(ref).epsilon(1e-9));
  CHECK(std::abs(t.a_zero) < 1e-12);
  auto rel = extract_relevant_terms(t.at_zero, TermKind::Bulk);
  for (double v : rel.a) CHECK(std::abs(v) < 1e-12);
  CHECK(extract_relevant_terms(t.at_lambda0, TermKind::Bulk).a[7] == t.a_lambda0);
}

TEST_CASE("surface tadpole: Neumann closed forms, round trip and e = h") {
  for (double L0 : {10.0, 50.0}) {
    auto t = integrate_surface_tadpole(config(BoundaryKind::neumann(), L0));
    CHECK(t.s_lambda0 == doctest::Approx(neumann_s_closed(1.0, L0)).epsilon(1e-9));
    CHECK(t.e_lambda0 == doctest::Approx(neumann_e_closed(1.0, L0)).epsilon(1e-9));
    CHECK(std::abs(t.s_zero) < 1e-6 * std::abs(t.s_lambda0));
    CHECK(std::abs(t.e_zero) < 1e-6 * std::abs(t.e_lambda0));
    CHECK(std::abs(t.e_lambda0 - t.h_lambda0) < 1e-10);
    CHECK(t.additivity_residual < 1e-8);
  }
}

TEST_CASE("surface tadpole: Robin BPHZ conditions at zero") {
  auto t = integrate_surface_tadpole(config(BoundaryKind::robin(1.0), 50.0));
  CHECK(std::abs(t.e_lambda0 - t.h_lambda0) < 1e-10);
  auto rel = extract_relevant_terms(t.at_zero, TermKind::Surface);
  CHECK(std::abs(rel.s_surf) < 1e-8);
  CHECK(std::abs(rel.e_surf) < 1e-8);
  CHECK(std::abs(rel.h_surf) < 1e-8);
  auto ct = extract_relevant_terms(t.at_lambda0, TermKind::Surface);
  CHECK(ct.s_surf == t.s_lambda0);
  CHECK(ct.e_surf == t.e_lambda0);
}

TEST_CASE("surface moments: two quadrature routes agree") {
  for (auto bc : {BoundaryKind::neumann(), BoundaryKind::robin(1.0), BoundaryKind::robin(30.0),
                  BoundaryKind::dirichlet()})
    for (double L : {0.1, 1.0, 20.0})
      CHECK(surface_moment(bc, L, 1) == doctest::Approx(surface_moment_exp_sinh(bc, L, 1)).epsilon(1e-10));
  CHECK(surface_moment(BoundaryKind::neumann(), 3.0, 0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("coupling homogeneity of the tadpoles") {
  FlowConfig a = config(BoundaryKind::robin(1.0), 20.0), b = a, z = a;
  b.coupling = 2.5;
  z.coupling = 0.0;
  auto ta = integrate_surface_tadpole(a), tb = integrate_surface_tadpole(b), tz = integrate_surface_tadpole(z);
  CHECK(tb.s_lambda0 == doctest::Approx(2.5 * ta.s_lambda0).epsilon(1e-13));
  CHECK(tb.e_lambda0 == doctest::Approx(2.5 * ta.e_lambda0).epsilon(1e-13));
  CHECK(tz.s_lambda0 == 0.0);
  CHECK(tz.e_lambda0 == 0.0);
  CHECK(integrate_bulk_tadpole(z).a_lambda0 == 0.0);
}

TEST_CASE("surface tadpole argument errors") {
  CHECK_THROWS_AS(integrate_surface_tadpole(config(BoundaryKind::dirichlet(), 10.0)), std::invalid_argument);
  CHECK_THROWS_AS(integrate_surface_tadpole(config(BoundaryKind::bulk(), 10.0)), std::invalid_argument);
}

TEST_CASE("fold identity: contacts plus smooth part equal relevant plus remainder") {
  // Folding at lambda0 gives the contact terms alone.
  FlowConfig cfg = config(BoundaryKind::robin(1.0), 20.0);
  auto t = integrate_surface_tadpole(cfg);
  auto f1 = TestFunction::star_kernel(1.0, 0.5, cfg.bc), f2 = TestFunction::star_kernel(1.0, 1.0, cfg.bc);
  double at0 = fold_surface_two_point(cfg, 20.0, t.s_lambda0, t.e_lambda0, f1, f2);
  double contacts = t.s_lambda0 * f1.value(0) * f2.value(0) +
                    t.e_lambda0 * (f1.value(0) * f2.derivative(0) + f1.derivative(0) * f2.value(0));
  CHECK(at0 == doctest::Approx(contacts).epsilon(1e-14));
  // The test-function moments reproduce the relevant terms: folding with the
  // half-line indicator at lambda = 0 gives s^0 = 0.
  double s0 = fold_surface_two_point(cfg, 0.0, t.s_lambda0, t.e_lambda0, TestFunction::char_halfline(),
                                     TestFunction::char_halfline());
  CHECK(std::abs(s0) < 1e-6 * std::abs(t.s_lambda0));
}

TEST_CASE("Dirichlet fold against nested quadrature") {
  FlowConfig cfg = config(BoundaryKind::dirichlet(), 20.0);
  auto bc = BoundaryKind::dirichlet();
  auto f1 = TestFunction::star_kernel(1.0, 0.5, bc), f2 = TestFunction::star_kernel(1.0, 1.0, bc);
  double v = fold_surface_two_point(cfg, 0.0, 0.0, 0.0, f1, f2);
  auto inner = [&](double L) {
    if (L < 1e-3) return 0.0;
    double tau = 1.0 / (L * L);
    auto f = [&](double z) { return surface_kernel_value(bc, tau, z, z) * f1.value(z) * f2.value(z); };
    return tadpole_prefactor(1.0, L, 1.0) * quad::gk(f, 0.0, 15.0, 1e-12);
  };
  double ref = -quad::gk(inner, 0.0, 20.0, 1e-10);
  CHECK(v == doctest::Approx(ref).epsilon(1e-7));
  auto check = dirichlet_surface_check(cfg, {40.0, 80.0});
  CHECK(check.cauchy);
  CHECK(check.relative_change < 0.05);
}

TEST_CASE("Robin to Dirichlet limit") {
  FlowConfig cfg = config(BoundaryKind::robin(1.0), 10.0);
  auto r = robin_dirichlet_limit(cfg, 0.0, {1.0, 10.0, 100.0, 1000.0});
  CHECK(r.decreasing);
  CHECK(r.gap.back() < r.gap.front());
  CHECK(r.extrapolation_error < 0.02);
  CHECK(r.neumann_gap > 5.0 * r.gap.back());
  CHECK_THROWS_AS(robin_dirichlet_limit(cfg, 0.0, {10.0, 1.0}), std::invalid_argument);
}

TEST_CASE("amputation asymmetry") {
  FlowConfig cfg = config(BoundaryKind::robin(1.0), 50.0);
  auto t = integrate_surface_tadpole(cfg);
  auto a = amputation_comparison(t.s_lambda0, t.e_lambda0, 1.0, 1.0, 0.5, 0.3, 0.7);
  CHECK(a.kappa == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
  CHECK(a.strict127);
  CHECK(a.strict128);
  CHECK_FALSE(a.degenerate);
  CHECK(a.lhs127 == doctest::Approx(a.lhs127_closed).epsilon(1e-5));
  CHECK(a.rhs127 == doctest::Approx(a.rhs127_closed).epsilon(1e-5));
  CHECK(a.lhs128 == doctest::Approx(a.lhs128_closed).epsilon(1e-5));
  CHECK(a.rhs128 == doctest::Approx(a.rhs128_closed).epsilon(1e-5));
  CHECK(a.interior == doctest::Approx(a.interior_closed).epsilon(1e-6));
  CHECK(a.dz_limit_y_then_z == doctest::Approx(-a.kappa).epsilon(1e-4));
  CHECK(a.dz_limit_z_then_y == doctest::Approx(1.0).epsilon(1e-4));

  auto d = amputation_comparison(t.s_lambda0, 0.0, 1.0, 1.0, 0.5, 0.3, 0.7);
  CHECK(d.degenerate);
  CHECK_FALSE(d.strict127);
  CHECK_FALSE(d.strict128);
  CHECK(d.lhs127_closed == d.rhs127_closed);
  CHECK(d.lhs128_closed == d.rhs128_closed);
  CHECK_THROWS_AS(amputation_comparison(0.1, 0.1, 1.0, 1.0, 0.5, 0.3, 0.0), std::invalid_argument);
}

TEST_CASE("power counting at one loop") {
  auto pc = power_counting_probe(config(BoundaryKind::neumann(), 50.0));
  CHECK(pc.gap == doctest::Approx(1.0).epsilon(0.2));
  CHECK(pc.bulk.exponent == doctest::Approx(1.0).epsilon(0.3));
  CHECK(pc.bulk.r2 > 0.99);
  auto lams = quad::logspace(2.0, 20.0, 41);
  auto s0 = power_counting_fit(config(BoundaryKind::neumann(), 50.0), ProbeFamily::Surface, 0, 0, lams);
  auto s1 = power_counting_fit(config(BoundaryKind::neumann(), 50.0), ProbeFamily::Surface, 1, 0, lams);
  CHECK(s0.exponent - s1.exponent == doctest::Approx(1.0).epsilon(0.3));
  auto b1 = power_counting_fit(config(BoundaryKind::neumann(), 50.0), ProbeFamily::Bulk, 1, 0, lams);
  CHECK(b1.vanishes);
  CHECK_THROWS_AS(power_counting_fit(config(BoundaryKind::neumann(), 50.0), ProbeFamily::Bulk, 0, 0, {2.0, 3.0}),
                  FitError);
}

TEST_CASE("four-point: c vanishes at zero and coupling scales quadratically") {
  FlowConfig cfg = config(BoundaryKind::neumann(), 20.0);
  auto f0 = one_loop_four_point(cfg, 0.0);
  for (double v : f0.c) CHECK(v == 0.0);
  auto f1 = one_loop_four_point(cfg, 2.0);
  FlowConfig big = cfg;
  big.coupling = 3.0;
  auto f3 = one_loop_four_point(big, 2.0);
  CHECK(f3.surface_folded == doctest::Approx(9.0 * f1.surface_folded).epsilon(1e-13));
  CHECK(f3.bulk_folded == doctest::Approx(9.0 * f1.bulk_folded).epsilon(1e-13));
  CHECK(f3.c[10] == doctest::Approx(9.0 * f1.c[10]).epsilon(1e-13));
  FourPointKinematics bad;
  bad.p[2] = 0.1;
  CHECK_THROWS_AS(one_loop_four_point(cfg, 0.0, bad), UnsupportedKinematics);
}

TEST_CASE("four-point against brute-force quadrature") {
  FourPointKinematics k;
  for (auto bc : {BoundaryKind::neumann(), BoundaryKind::robin(1.0), BoundaryKind::dirichlet()}) {
    FlowConfig cfg = config(bc, 4.0);
    auto fp = one_loop_four_point(cfg, 3.0, k);
    auto [bulk, surf] = fish_oracle(bc, 1.0, 1.0, 3.0, 4.0, k);
    CHECK(fp.bulk_folded - fp.contact_folded == doctest::Approx(bulk).epsilon(1e-6));
    CHECK(fp.surface_folded == doctest::Approx(surf).epsilon(1e-6));
  }
}

TEST_CASE("surface four-point is Cauchy in the cutoff without a counterterm") {
  for (auto bc : {BoundaryKind::neumann(), BoundaryKind::dirichlet(), BoundaryKind::robin(1.0)}) {
    CAPTURE(to_string(bc.kind));
    double v20 = one_loop_four_point(config(bc, 20.0), 0.0).surface_folded;
    double v40 = one_loop_four_point(config(bc, 40.0), 0.0).surface_folded;
    double v80 = one_loop_four_point(config(bc, 80.0), 0.0).surface_folded;
    // successive differences shrink geometrically, so the limit exists
    CHECK(std::abs(v80 - v40) < 0.7 * std::abs(v40 - v20));
    CHECK(std::abs(v80 - v40) / std::abs(v80) < 0.05);
  }
}

}  // TEST_SUITE
