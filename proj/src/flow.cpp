#include "hsf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "hsf/propagators.hpp"
#include "hsf/weights.hpp"

namespace hsf::flow {

namespace {

constexpr double kInvSqrt2Pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void check_config(const FlowConfig& cfg) {
  if (!(cfg.mass > 0.0)) throw std::invalid_argument("flow needs a positive mass");
  if (!(cfg.lambda0 > 0.0)) throw std::invalid_argument("lambda0 must be positive");
  if (!std::isfinite(cfg.coupling)) throw std::invalid_argument("coupling must be finite");
  if (cfg.steps_per_decade < 1) throw std::invalid_argument("steps_per_decade must be positive");
}

std::vector<double> schedule_or_default(const FlowConfig& cfg, const std::vector<double>& given) {
  std::vector<double> s = given.empty() ? cfg.grid().schedule : given;
  check_schedule(s);
  if (std::abs(s.front() - cfg.lambda0) > 1e-12 * cfg.lambda0)
    throw std::invalid_argument("schedule must start at lambda0");
  return s;
}

// Checkpoints of a downward schedule that lie above lambda, then lambda itself.
std::vector<double> down_to(const std::vector<double>& sched, double lambda) {
  std::vector<double> out;
  for (double x : sched)
    if (x > lambda) out.push_back(x);
  out.push_back(lambda);
  return out;
}

std::vector<double> reversed(std::vector<double> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<double> log_schedule(double lambda0, double lambda_min, int steps_per_decade) {
  if (!(lambda0 > lambda_min && lambda_min > 0.0))
    throw std::invalid_argument("log_schedule needs lambda0 > lambda_min > 0");
  int n = static_cast<int>(std::ceil(steps_per_decade * std::log10(lambda0 / lambda_min)));
  std::vector<double> s = quad::logspace(lambda0, lambda_min, n + 1);
  s.front() = lambda0;
  s.push_back(0.0);
  return s;
}

void check_schedule(const std::vector<double>& s) {
  if (s.size() < 2) throw IncompleteFlowError("schedule needs at least two checkpoints");
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (!(s[i] > s[i + 1])) throw std::invalid_argument("schedule must be strictly decreasing");
  }
  if (s.back() < 0.0) throw std::invalid_argument("schedule must stay nonnegative");
  if (s.back() != 0.0) throw IncompleteFlowError("schedule does not reach lambda = 0");
}

GridSpec GridSpec::standard(double mass, double lambda0, int z_nodes, double z_max,
                            int steps_per_decade, double lambda_min) {
  if (z_nodes < 3 || z_nodes % 2 == 0)
    throw std::invalid_argument("z grid needs an odd number of nodes, at least 3");
  GridSpec g;
  // z = L sinh(alpha u) / sinh(alpha): spacing near the surface is
  // ~ 2e-4 / m at 257 nodes, enough for kernels of width 1 / lambda0
  const double alpha = 8.0, len = z_max / mass;
  const int n = z_nodes - 1;
  const double h = 1.0 / n;
  g.z.resize(z_nodes);
  g.zw.resize(z_nodes);
  for (int i = 0; i <= n; ++i) {
    double u = i * h;
    g.z[i] = len * std::sinh(alpha * u) / std::sinh(alpha);
    double jac = len * alpha * std::cosh(alpha * u) / std::sinh(alpha);
    double simpson = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    g.zw[i] = h / 3.0 * simpson * jac;
  }
  g.schedule = log_schedule(lambda0, lambda_min * mass, steps_per_decade);
  return g;
}

void GridSpec::validate() const {
  if (z.empty() || z.front() != 0.0) throw std::invalid_argument("z grid must start at 0");
  if (zw.size() != z.size()) throw std::invalid_argument("z weights do not match the grid");
  for (std::size_t i = 0; i + 1 < z.size(); ++i)
    if (!(z[i] < z[i + 1])) throw std::invalid_argument("z grid must be strictly increasing");
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (!(p[i] < p[i + 1])) throw std::invalid_argument("p values must be strictly increasing");
  if (!schedule.empty()) check_schedule(schedule);
}

double GridSpec::integrate(const std::vector<double>& f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += zw[i] * f[i];
  return sum;
}

GridSpec FlowConfig::grid() const {
  return GridSpec::standard(mass, lambda0, z_nodes, z_max, steps_per_decade, lambda_min);
}

std::vector<Eigen::VectorXd> rk4(const Rhs& rhs, const Eigen::VectorXd& y0,
                                 const std::vector<double>& nodes) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(nodes.size());
  out.push_back(y0);
  Eigen::VectorXd y = y0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    double x = nodes[i], h = nodes[i + 1] - nodes[i];
    Eigen::VectorXd k1 = rhs(x, y);
    Eigen::VectorXd k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
    Eigen::VectorXd k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
    Eigen::VectorXd k4 = rhs(x + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(y);
  }
  return out;
}

double tadpole_prefactor(double coupling, double lambda, double mass) {
  if (lambda <= 0.0) return 0.0;
  return 0.5 * coupling * cdot_momentum_integral(lambda, mass);
}

double surface_moment(const BoundaryKind& bc, double lambda, int r) {
  if (lambda <= 0.0) return 0.0;
  const double tau = 1.0 / (lambda * lambda);
  auto f = [&](double z) { return std::pow(z, r) * surface_kernel_value(bc, tau, z, z); };
  // the integrand decays like exp(-2 lambda^2 z^2); the floor sits above the
  // roundoff of panels where it is of order lambda
  double scale = std::pow(lambda, -r);
  return quad::gk_split(f, 0.0, 9.0 / lambda, 1.0 / lambda, 1e-14 * scale, 1e-13);
}

double surface_moment_exp_sinh(const BoundaryKind& bc, double lambda, int r) {
  if (lambda <= 0.0) return 0.0;
  thread_local boost::math::quadrature::exp_sinh<double> integrator;
  const double tau = 1.0 / (lambda * lambda);
  // substitute z = x / lambda so the rule sees a unit-width integrand
  auto f = [&](double x) {
    double z = x / lambda;
    return std::pow(z, r) * surface_kernel_value(bc, tau, z, z) / lambda;
  };
  return integrator.integrate(f, 1e-15);
}

// ---------------------------------------------------------------------------
// correlation objects

void CorrelationObject::validate() const {
  if (n != 2 && n != 4) throw std::invalid_argument("only n = 2 and n = 4 objects are stored");
  if (zw.size() != z.size()) throw std::invalid_argument("grid weights do not match the grid");
  auto nz = z.size();
  for (const auto& row : a)
    if (row.size() != nz) throw std::invalid_argument("a profile does not match the grid");
  if (!a.empty() && a.size() != p.size()) throw std::invalid_argument("one a profile per momentum");
  if (!s.empty() && s.size() != nz) throw std::invalid_argument("s profile does not match the grid");
  if (!d.empty() && d.size() != nz) throw std::invalid_argument("d profile does not match the grid");
  if (!c.empty() && c.size() != nz) throw std::invalid_argument("c profile does not match the grid");
  if (!smooth.empty() && smooth.size() != p.size())
    throw std::invalid_argument("one smooth kernel per momentum");
  for (const auto& k : smooth) {
    if (k.rows() != static_cast<Eigen::Index>(nz) || k.cols() != static_cast<Eigen::Index>(nz))
      throw std::invalid_argument("smooth kernel does not match the grid");
    double scale = k.cwiseAbs().maxCoeff();
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300))
      throw std::invalid_argument("smooth kernel violates Bose symmetry");
  }
}

namespace {

// a(z1) at momentum index ip: diagonal coefficient plus the zeroth moment of K.
std::vector<double> a_moment(const CorrelationObject& o, std::size_t ip) {
  std::vector<double> out(o.z.size(), 0.0);
  if (!o.a.empty()) out = o.a[ip];
  if (!o.smooth.empty()) {
    Eigen::Map<const Eigen::VectorXd> w(o.zw.data(), static_cast<Eigen::Index>(o.zw.size()));
    Eigen::VectorXd m = o.smooth[ip] * w;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += m(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace

RelevantTerms extract_relevant_terms(const CorrelationObject& obj, TermKind kind) {
  obj.validate();
  if (obj.p.empty() || obj.p.front() != 0.0)
    throw PreconditionError("relevant terms are defined at zero external momenta");
  const std::size_t nz = obj.z.size();
  RelevantTerms t;
  if (kind == TermKind::Bulk) {
    if (obj.n == 4) {
      t.c = obj.c.empty() ? std::vector<double>(nz, 0.0) : obj.c;
      return t;
    }
    t.a = a_moment(obj, 0);
    t.s = obj.s.empty() ? std::vector<double>(nz, 0.0) : obj.s;
    t.d = obj.d.empty() ? std::vector<double>(nz, 0.0) : obj.d;
    t.b.assign(nz, 0.0);
    if (!obj.smooth.empty()) {
      const auto& k = obj.smooth[0];
      for (std::size_t i = 0; i < nz; ++i) {
        double s1 = 0.0, d1 = 0.0;
        for (std::size_t j = 0; j < nz; ++j) {
          double kij = k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * obj.zw[j];
          double dz = obj.z[i] - obj.z[j];
          s1 += dz * kij;
          d1 += dz * dz * kij;
        }
        t.s[i] += s1;
        t.d[i] -= 0.5 * d1;
      }
    }
    if (obj.p.size() > 1) {
      // stencil {0, h, 2h, 4h}; A is even in p so f''(0) = 2 b
      double h = obj.p[1];
      auto find = [&](double x) {
        for (std::size_t i = 0; i < obj.p.size(); ++i)
          if (std::abs(obj.p[i] - x) < 1e-12 * x) return i;
        throw PreconditionError("b extraction needs p values {0, h, 2h, 4h}");
      };
      std::size_t i1 = 1, i2 = find(2 * h), i4 = find(4 * h);
      auto a0 = t.a, a1 = a_moment(obj, i1), a2 = a_moment(obj, i2), a4 = a_moment(obj, i4);
      for (std::size_t i = 0; i < nz; ++i) {
        double dh = (-2.0 * a2[i] + 32.0 * a1[i] - 30.0 * a0[i]) / (12.0 * h * h);
        double d2h = (-2.0 * a4[i] + 32.0 * a2[i] - 30.0 * a0[i]) / (48.0 * h * h);
        t.b[i] = 0.5 * (16.0 * dh - d2h) / 15.0;
      }
    }
    return t;
  }
  // surface moments: 1, z2, z1
  t.s_surf = obj.s0;
  t.e_surf = obj.e0;
  t.h_surf = obj.e0;
  if (obj.n != 2) return t;
  if (!obj.a.empty()) {
    for (std::size_t i = 0; i < nz; ++i) {
      t.s_surf += obj.zw[i] * obj.a[0][i];
      t.e_surf += obj.zw[i] * obj.z[i] * obj.a[0][i];
      t.h_surf += obj.zw[i] * obj.z[i] * obj.a[0][i];
    }
  }
  if (!obj.smooth.empty()) {
    const auto& k = obj.smooth[0];
    for (std::size_t i = 0; i < nz; ++i)
      for (std::size_t j = 0; j < nz; ++j) {
        double v = obj.zw[i] * obj.zw[j] * k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        t.s_surf += v;
        t.e_surf += obj.z[j] * v;
        t.h_surf += obj.z[i] * v;
      }
  }
  return t;
}

TreeLevel tree_level_init(double coupling, const GridSpec& grid) {
  grid.validate();
  TreeLevel t;
  auto blank = [&](int n, bool surface) {
    CorrelationObject o;
    o.l = 0;
    o.n = n;
    o.surface = surface;
    o.z = grid.z;
    o.zw = grid.zw;
    o.p = {0.0};
    return o;
  };
  t.d2 = blank(2, false);
  t.d4 = blank(4, false);
  t.d4.c.assign(grid.z.size(), coupling);
  t.s2 = blank(2, true);
  t.s4 = blank(4, true);
  return t;
}

double fold_contact4(double coupling, const std::vector<double>& tau, const std::vector<double>& y) {
  if (tau.size() != y.size() || tau.empty()) throw std::invalid_argument("tau and y sizes differ");
  double A = 0.0, B = 0.0, C = 0.0, pre = 1.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > 0.0)) throw std::invalid_argument("tau must be positive");
    A += 1.0 / tau[i];
    B += y[i] / tau[i];
    C += y[i] * y[i] / tau[i];
    pre *= kInvSqrt2Pi / std::sqrt(tau[i]);
  }
  return coupling * pre * std::exp(-0.5 * (C - B * B / A)) * std::sqrt(2.0 * std::numbers::pi / A) *
         normal_cdf(B / std::sqrt(A));
}

// ---------------------------------------------------------------------------
// test functions

TestFunction TestFunction::bulk_kernel(double tau, double y) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  return {Kind::BulkKernel, tau, y, BoundaryKind::bulk()};
}

TestFunction TestFunction::star_kernel(double tau, double y, const BoundaryKind& bc) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  return {Kind::StarKernel, tau, y, bc};
}

TestFunction TestFunction::char_halfline() { return {Kind::CharHalfline, 1.0, 0.0, BoundaryKind::bulk()}; }

TestFunction TestFunction::boundary_probe(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  return {Kind::BoundaryProbe, tau, 0.0, BoundaryKind::bulk()};
}

double TestFunction::value(double z) const {
  switch (kind) {
    case Kind::BulkKernel: return p_bulk(tau, z, y);
    case Kind::StarKernel: return kernel_value(bc, tau, z, y);
    case Kind::CharHalfline: return z >= 0.0 ? 1.0 : 0.0;
    case Kind::BoundaryProbe: return z * p_bulk(tau, z, 0.0);
  }
  return 0.0;
}

double TestFunction::derivative(double z) const {
  auto dbulk = [&](double a, double b) { return -(a - b) / tau * p_bulk(tau, a, b); };
  switch (kind) {
    case Kind::BulkKernel: return dbulk(z, y);
    case Kind::StarKernel:
      switch (bc.kind) {
        case Bc::Bulk: return dbulk(z, y);
        case Bc::Dirichlet: return dbulk(z, y) - dbulk(z, -y);
        case Bc::Neumann: return dbulk(z, y) + dbulk(z, -y);
        case Bc::Robin: {
          double n = dbulk(z, y) + dbulk(z, -y);
          if (bc.c == 0.0) return n;
          // d/da of the image integral is c (I - p_B(tau; a, 0))
          double img = robin_image_closed(bc.c, tau, z, y);
          return n - 2.0 * bc.c * (img - p_bulk(tau, z + y, 0.0));
        }
      }
      return 0.0;
    case Kind::CharHalfline: return 0.0;
    case Kind::BoundaryProbe: return (1.0 - z * z / tau) * p_bulk(tau, z, 0.0);
  }
  return 0.0;
}

double TestFunction::extent() const {
  if (kind == Kind::CharHalfline) return std::numeric_limits<double>::infinity();
  return std::abs(y) + 12.0 * std::sqrt(tau);
}

// ---------------------------------------------------------------------------
// tadpoles

BulkTadpole integrate_bulk_tadpole(const FlowConfig& cfg, const std::vector<double>& schedule) {
  check_config(cfg);
  auto sched = schedule_or_default(cfg, schedule);
  auto rhs = [&](double L, const Eigen::VectorXd&) {
    Eigen::VectorXd d(1);
    d(0) = tadpole_prefactor(cfg.coupling, L, cfg.mass) * L * kInvSqrt2Pi;
    return d;
  };
  // a^0 = 0 fixes the relevant term; integrate upward to read off a^{lambda0}
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  auto up = rk4(rhs, zero, reversed(sched));
  BulkTadpole out;
  out.a_lambda0 = up.back()(0);
  auto down = rk4(rhs, up.back(), sched);
  out.series.reserve(sched.size());
  for (std::size_t i = 0; i < sched.size(); ++i) out.series.push_back({sched[i], down[i](0), 0.0, 0.0});
  out.a_zero = down.back()(0);

  GridSpec g = cfg.grid();
  CorrelationObject o;
  o.l = 1;
  o.n = 2;
  o.z = g.z;
  o.zw = g.zw;
  o.p = {0.0};
  o.s.assign(g.z.size(), 0.0);
  o.d.assign(g.z.size(), 0.0);
  o.a = {std::vector<double>(g.z.size(), out.a_lambda0)};
  out.at_lambda0 = o;
  o.a = {std::vector<double>(g.z.size(), out.a_zero)};
  out.at_zero = o;
  return out;
}

SurfaceTadpole integrate_surface_tadpole(const FlowConfig& cfg, const std::vector<double>& schedule) {
  check_config(cfg);
  if (cfg.bc.kind == Bc::Dirichlet)
    throw std::invalid_argument(
        "Dirichlet data fix S = 0 at lambda0 and leave no surface counterterm; "
        "use dirichlet_surface_check");
  if (cfg.bc.kind == Bc::Bulk) throw std::invalid_argument("surface tadpole needs a boundary condition");
  auto sched = schedule_or_default(cfg, schedule);
  const BoundaryKind bc = cfg.bc;
  auto rhs = [&](double L, const Eigen::VectorXd&) {
    double k = tadpole_prefactor(cfg.coupling, L, cfg.mass);
    Eigen::VectorXd d(3);
    if (k == 0.0) {
      d.setZero();
      return d;
    }
    d(0) = k * surface_moment(bc, L, 0);
    d(1) = k * surface_moment(bc, L, 1);
    d(2) = k * surface_moment_exp_sinh(bc, L, 1);
    return d;
  };
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  auto up = rk4(rhs, zero, reversed(sched));
  SurfaceTadpole out;
  out.s_lambda0 = up.back()(0);
  out.e_lambda0 = up.back()(1);
  out.h_lambda0 = up.back()(2);
  auto down = rk4(rhs, up.back(), sched);
  for (std::size_t i = 0; i < sched.size(); ++i)
    out.series.push_back({sched[i], down[i](0), down[i](1), down[i](2)});
  out.s_zero = down.back()(0);
  out.e_zero = down.back()(1);
  out.h_zero = down.back()(2);

  // smooth diagonal sigma(z) from sigma^{lambda0} = 0, and the additivity
  // residual of the flow integrand on the same grid
  GridSpec g = cfg.grid();
  const auto nz = static_cast<Eigen::Index>(g.z.size());
  double residual = 0.0;
  auto profile_rhs = [&](double L, const Eigen::VectorXd&) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(nz);
    double k = tadpole_prefactor(cfg.coupling, L, cfg.mass);
    if (k == 0.0) return d;
    double tau = 1.0 / (L * L);
    for (Eigen::Index i = 0; i < nz; ++i) {
      double z = g.z[static_cast<std::size_t>(i)];
      double ps = surface_kernel_value(bc, tau, z, z);
      double full = kernel_value(bc, tau, z, z);
      double pb = p_bulk(tau, z, z);
      residual = std::max(residual, std::abs(k * (pb + ps) - k * full) / std::max(std::abs(k * full), 1e-300));
      d(i) = k * ps;
    }
    return d;
  };
  auto prof = rk4(profile_rhs, Eigen::VectorXd::Zero(nz), sched);
  out.profile_zero.assign(prof.back().data(), prof.back().data() + nz);
  out.additivity_residual = residual;

  CorrelationObject o;
  o.l = 1;
  o.n = 2;
  o.surface = true;
  o.z = g.z;
  o.zw = g.zw;
  o.p = {0.0};
  o.s0 = out.s_lambda0;
  o.e0 = out.e_lambda0;
  o.a = {std::vector<double>(g.z.size(), 0.0)};
  out.at_lambda0 = o;
  o.a = {out.profile_zero};
  out.at_zero = o;
  return out;
}

double fold_surface_two_point(const FlowConfig& cfg, double lambda, double s_ct, double e_ct,
                              const TestFunction& f1, const TestFunction& f2) {
  check_config(cfg);
  if (cfg.bc.kind == Bc::Bulk) throw std::invalid_argument("surface object needs a boundary condition");
  if (lambda < 0.0 || lambda > cfg.lambda0) throw std::invalid_argument("lambda must lie in [0, lambda0]");
  const BoundaryKind bc = cfg.bc;
  double contacts = s_ct * f1.value(0.0) * f2.value(0.0) +
                    e_ct * (f1.value(0.0) * f2.derivative(0.0) + f1.derivative(0.0) * f2.value(0.0));
  const double zcap = std::min(f1.extent(), f2.extent());
  auto rhs = [&](double L, const Eigen::VectorXd&) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(1);
    double k = tadpole_prefactor(cfg.coupling, L, cfg.mass);
    if (k == 0.0) return d;
    double tau = 1.0 / (L * L);
    double top = std::min(9.0 / L, zcap);
    double width = std::min(1.0 / L, 0.5 * std::sqrt(std::min(f1.tau, f2.tau)));
    auto f = [&](double z) { return surface_kernel_value(bc, tau, z, z) * f1.value(z) * f2.value(z); };
    // a fixed-rule estimate sets the absolute floor of the adaptive pass
    int panels = std::max(1, static_cast<int>(std::ceil(top / width)));
    auto rule = quad::gauss_legendre<8>(quad::linspace(0.0, top, panels + 1));
    double crude = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) crude += rule.w[i] * std::abs(f(rule.x[i]));
    d(0) = k * quad::gk_split(f, 0.0, top, width, 1e-12 * crude, 1e-11);
    return d;
  };
  Eigen::VectorXd y0(1);
  y0(0) = contacts;
  auto sched = down_to(cfg.grid().schedule, lambda);
  return rk4(rhs, y0, sched).back()(0);
}

DirichletCheck dirichlet_surface_check(const FlowConfig& cfg, const std::vector<double>& lambda0s,
                                       double tau1, double y1, double tau2, double y2) {
  if (lambda0s.size() < 2) throw std::invalid_argument("need at least two cutoffs");
  DirichletCheck out;
  auto bc = BoundaryKind::dirichlet();
  auto f1 = TestFunction::star_kernel(tau1, y1, bc), f2 = TestFunction::star_kernel(tau2, y2, bc);
  for (double l0 : lambda0s) {
    FlowConfig c = cfg;
    c.bc = bc;
    c.lambda0 = l0;
    out.lambda0.push_back(l0);
    out.value.push_back(fold_surface_two_point(c, 0.0, 0.0, 0.0, f1, f2));
  }
  double a = out.value[out.value.size() - 2], b = out.value.back();
  out.relative_change = std::abs(b - a) / std::abs(b);
  out.cauchy = out.relative_change < 0.05;
  return out;
}

RobinLimit robin_dirichlet_limit(const FlowConfig& cfg, double lambda, const std::vector<double>& c_list,
                                 double tau1, double y1, double tau2, double y2) {
  if (c_list.size() < 2) throw std::invalid_argument("need at least two Robin parameters");
  for (std::size_t i = 0; i + 1 < c_list.size(); ++i)
    if (!(c_list[i] < c_list[i + 1] && c_list[i] > 0.0))
      throw std::invalid_argument("Robin parameters must be positive and increasing");
  auto folded = [&](const BoundaryKind& bc) {
    FlowConfig c = cfg;
    c.bc = bc;
    double s = 0.0, e = 0.0;
    if (bc.kind != Bc::Dirichlet) {
      auto t = integrate_surface_tadpole(c);
      s = t.s_lambda0;
      e = t.e_lambda0;
    }
    return fold_surface_two_point(c, lambda, s, e, TestFunction::star_kernel(tau1, y1, bc),
                                  TestFunction::star_kernel(tau2, y2, bc));
  };
  RobinLimit out;
  out.dirichlet = folded(BoundaryKind::dirichlet());
  out.neumann = folded(BoundaryKind::neumann());
  out.neumann_gap = std::abs(out.neumann - out.dirichlet);
  for (double c : c_list) {
    out.c.push_back(c);
    out.value.push_back(folded(BoundaryKind::robin(c)));
    out.gap.push_back(std::abs(out.value.back() - out.dirichlet));
  }
  out.decreasing = true;
  for (std::size_t i = 0; i + 1 < out.gap.size(); ++i)
    if (!(out.gap[i + 1] < out.gap[i])) out.decreasing = false;
  // V(c) = V_inf + A / c
  std::size_t n = out.c.size();
  double c1 = out.c[n - 2], c2 = out.c[n - 1];
  out.extrapolated = (c2 * out.value[n - 1] - c1 * out.value[n - 2]) / (c2 - c1);
  out.extrapolation_error = std::abs(out.extrapolated - out.dirichlet) / std::abs(out.dirichlet);
  return out;
}

// ---------------------------------------------------------------------------
// amputation

Amputation amputation_comparison(double s_ct, double e_ct, double c, double m, double p, double y1,
                                 double y2) {
  if (!(y2 > 0.0)) throw std::invalid_argument("y2 must be positive");
  if (!(y1 > 0.0)) throw std::invalid_argument("y1 must be positive");
  if (!(c >= 0.0) || !(m > 0.0)) throw std::invalid_argument("need c >= 0 and m > 0");
  const BoundaryKind bc = BoundaryKind::robin(c);
  auto C = [&](double z, double y) { return closed_form_propagator(bc, p, z, y, m); };
  Amputation a;
  a.kappa = std::sqrt(p * p + m * m);
  a.c00 = C(0.0, 0.0);
  a.c0y = C(0.0, y2);

  // one-sided second-order derivative at z = 0+
  auto dz0 = [&](double y) {
    double h = 1e-5 * (y > 0.0 ? std::min(y, 1.0 / a.kappa) : 1.0 / a.kappa);
    return (-3.0 * C(0.0, y) + 4.0 * C(h, y) - C(2.0 * h, y)) / (2.0 * h);
  };
  // s f1(0) f2(0) + e (f1(0) f2'(0) + f1'(0) f2(0))
  auto action = [&](double ya, double yb) {
    return s_ct * C(0.0, ya) * C(0.0, yb) + e_ct * (C(0.0, ya) * dz0(yb) + dz0(ya) * C(0.0, yb));
  };
  // y -> 0+ by Richardson extrapolation through t, t/2, t/4 (error O(t^3))
  auto limit0 = [&](auto g) {
    double t = 1e-3 / a.kappa;
    return (8.0 * g(0.25 * t) - 6.0 * g(0.5 * t) + g(t)) / 3.0;
  };
  const double g = s_ct + 2.0 * c * e_ct;
  a.interior = action(y1, y2);
  a.interior_closed = g * C(0.0, y1) * a.c0y;
  a.lhs127 = limit0([&](double t) { return action(t, y2); });
  a.rhs127 = action(0.0, y2);
  a.lhs127_closed = g * a.c00 * a.c0y;
  a.rhs127_closed = g * a.c00 * a.c0y - e_ct * (a.kappa + c) * a.c00 * a.c0y;
  a.lhs128 = limit0([&](double t1) { return limit0([&](double t2) { return action(t1, t2); }); });
  a.rhs128 = action(0.0, 0.0);
  a.lhs128_closed = g * a.c00 * a.c00;
  a.rhs128_closed = g * a.c00 * a.c00 - 2.0 * e_ct * (a.kappa + c) * a.c00 * a.c00;
  a.dz_limit_y_then_z = dz0(0.0) / a.c00;
  a.dz_limit_z_then_y = limit0(dz0) / a.c00;
  a.degenerate = e_ct == 0.0;
  auto differ = [](double x, double y) {
    // well above the extrapolation and difference-quotient error
    return std::abs(x - y) > 1e-6 * std::max({std::abs(x), std::abs(y), 1e-300});
  };
  a.strict127 = differ(a.lhs127, a.rhs127);
  a.strict128 = differ(a.lhs128, a.rhs128);
  return a;
}

// ---------------------------------------------------------------------------
// power counting

ScalingFit power_counting_fit(const FlowConfig& cfg, ProbeFamily family, int r1, int r2,
                              const std::vector<double>& lambdas) {
  check_config(cfg);
  if (r1 < 0 || r2 < 0 || r1 > 2 || r2 > 2) throw std::invalid_argument("moments must lie in 0..2");
  if (lambdas.size() < 3) throw FitError("power counting needs at least three scales");
  ScalingFit fit;
  if (family == ProbeFamily::Bulk && r1 + r2 > 0) {
    // every (z1 - z2)^r moment of delta(z1 - z2) with r > 0 is zero
    fit.vanishes = true;
    fit.exponent = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  if (family == ProbeFamily::Surface && cfg.bc.kind == Bc::Bulk)
    throw std::invalid_argument("surface probe needs a boundary condition");
  std::vector<double> x, y;
  for (double L : lambdas) {
    double k = tadpole_prefactor(cfg.coupling, L, cfg.mass);
    double v = family == ProbeFamily::Bulk ? k * L * kInvSqrt2Pi : k * surface_moment(cfg.bc, L, r1 + r2);
    if (!(std::abs(v) > 0.0)) throw FitError("flow moment vanishes at a fit scale");
    x.push_back(std::log(L + cfg.mass));
    y.push_back(std::log(std::abs(v)));
  }
  auto f = quad::fit_line(x, y);
  fit.exponent = f.slope;
  fit.intercept = f.intercept;
  fit.r2 = f.r2;
  return fit;
}

PowerCounting power_counting_probe(const FlowConfig& cfg, int r1, int r2, int points) {
  PowerCounting pc;
  pc.lambda = quad::logspace(2.0 * cfg.mass, 20.0 * cfg.mass, points);
  pc.bulk = power_counting_fit(cfg, ProbeFamily::Bulk, 0, 0, pc.lambda);
  pc.surface = power_counting_fit(cfg, ProbeFamily::Surface, r1, r2, pc.lambda);
  pc.gap = pc.bulk.exponent - pc.surface.exponent;
  for (double L : pc.lambda) {
    double k = tadpole_prefactor(cfg.coupling, L, cfg.mass);
    pc.bulk_flow.push_back(k * L * kInvSqrt2Pi);
    pc.surface_flow.push_back(k * surface_moment(cfg.bc, L, r1 + r2));
  }
  return pc;
}

// ---------------------------------------------------------------------------
// fish diagram

namespace {

// p_B(ta; z, ya) p_B(tb; z, yb) = amp N(z; mu, var)
struct GaussPair {
  double amp, mu, var;
};

GaussPair pair_of(double ta, double ya, double tb, double yb) {
  return {p_bulk(ta + tb, ya, yb), (ya * tb + yb * ta) / (ta + tb), ta * tb / (ta + tb)};
}

double normal_pdf(double x, double mu, double var) {
  return kInvSqrt2Pi / std::sqrt(var) * std::exp(-0.5 * (x - mu) * (x - mu) / var);
}

// Rule in the proper time of one line: log-spaced Gauss-Legendre panels.
quad::Rule lambda_rule(double lo, double hi) {
  double a = std::log(lo), b = std::log(hi);
  int n = std::max(1, static_cast<int>(std::ceil(b - a)));
  quad::Rule t = quad::gauss_legendre<8>(quad::linspace(a, b, n + 1));
  for (std::size_t i = 0; i < t.size(); ++i) {
    t.x[i] = std::exp(t.x[i]);
    t.w[i] *= t.x[i];
  }
  return t;
}

// int d^3k/(2pi)^3 exp(-(l1 + l2)(k^2 + m^2))
double loop_factor(double S, double m) {
  return std::exp(-S * m * m) * std::pow(4.0 * std::numbers::pi * S, -1.5);
}

std::vector<double> graded_breaks(double lo, double hi, double first, double hmax) {
  std::vector<double> b{lo};
  double x = lo + first;
  while (x < hi) {
    b.push_back(x);
    x += std::min(std::max(x - lo, first), hmax);
  }
  b.push_back(hi);
  return b;
}

// Bulk channel: int int Phi_ab(z) p_B(v; z, z') Phi_cd(z') over the half-plane.
double bulk_channel(const GaussPair& P, const GaussPair& Q, double v) {
  double top = P.mu + 14.0 * std::sqrt(P.var);
  double sv = std::sqrt(v);
  auto br = graded_breaks(0.0, top, std::min(0.25 * sv, 0.25 * std::sqrt(P.var)), 0.25 * std::sqrt(P.var));
  auto rule = quad::gauss_legendre<8>(br);
  double sum = 0.0, var2 = v + Q.var, sig = std::sqrt(v * Q.var * var2);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    double z = rule.x[i];
    sum += rule.w[i] * normal_pdf(z, P.mu, P.var) * normal_pdf(z, Q.mu, var2) *
           normal_cdf((z * Q.var + Q.mu * v) / sig);
  }
  return P.amp * Q.amp * sum;
}

}  // namespace

FourPoint one_loop_four_point(const FlowConfig& cfg, double lambda, const FourPointKinematics& k) {
  check_config(cfg);
  if (k.tau.size() != 4 || k.y.size() != 4 || k.p.size() != 4)
    throw UnsupportedKinematics("four-point kinematics needs four legs");
  for (double p : k.p)
    if (p != 0.0) throw UnsupportedKinematics("only zero external momenta are supported");
  for (std::size_t i = 0; i < 4; ++i)
    if (!(k.tau[i] > 0.0) || !(k.y[i] >= 0.0)) throw std::invalid_argument("need tau > 0 and y >= 0");
  if (lambda < 0.0 || lambda >= cfg.lambda0) throw std::invalid_argument("lambda must lie in [0, lambda0)");
  if (cfg.bc.kind == Bc::Bulk) throw std::invalid_argument("surface fish needs a boundary condition");

  const double m = cfg.mass, g2 = cfg.coupling * cfg.coupling;
  const double lo = 1.0 / (cfg.lambda0 * cfg.lambda0);
  // exp(-60) of the infrared tail is dropped
  const double cap = 60.0 / (m * m);
  auto upper = [&](double L) { return L > 0.0 ? std::min(1.0 / (L * L), cap) : cap; };
  const quad::Rule lr = lambda_rule(lo, upper(lambda));
  const auto nl = lr.size();

  const int channels[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  FourPoint out;
  out.lambda = lambda;

  // bulk part of the fish
  double bulk = 0.0;
  for (const auto& ch : channels) {
    GaussPair P = pair_of(k.tau[ch[0]], k.y[ch[0]], k.tau[ch[1]], k.y[ch[1]]);
    GaussPair Q = pair_of(k.tau[ch[2]], k.y[ch[2]], k.tau[ch[3]], k.y[ch[3]]);
    for (std::size_t i = 0; i < nl; ++i)
      for (std::size_t j = 0; j < nl; ++j) {
        double l1 = lr.x[i], l2 = lr.x[j], S = l1 + l2;
        double w = lr.w[i] * lr.w[j] * loop_factor(S, m) / std::sqrt(2.0 * std::numbers::pi * S);
        bulk += w * bulk_channel(P, Q, l1 * l2 / S);
      }
  }
  bulk *= -0.5 * g2;

  // c(z1): BPHZ fixes c^0 = 0, so c^lambda = (3 g^2 / 2)(I_0 - I_lambda)
  GridSpec grid = cfg.grid();
  const quad::Rule lr0 = lambda_rule(lo, cap);
  auto moment = [&](const quad::Rule& r, double z) {
    double sum = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < r.size(); ++j) {
        double l1 = r.x[i], l2 = r.x[j], S = l1 + l2;
        sum += r.w[i] * r.w[j] * loop_factor(S, m) / std::sqrt(2.0 * std::numbers::pi * S) *
               normal_cdf(z * std::sqrt(S / (l1 * l2)));
      }
    return sum;
  };
  out.z = grid.z;
  out.c.resize(grid.z.size());
  out.c_ct.resize(grid.z.size());
  for (std::size_t i = 0; i < grid.z.size(); ++i) {
    double i0 = moment(lr0, grid.z[i]);
    double il = lambda > 0.0 ? moment(lr, grid.z[i]) : i0;
    out.c_ct[i] = 1.5 * g2 * i0;
    out.c[i] = 1.5 * g2 * (i0 - il);
  }
  // contact term c_ct(z) prod p_B(tau_i; z, y_i), integrated over the half-line
  {
    double smin = std::sqrt(*std::min_element(k.tau.begin(), k.tau.end()));
    double top = *std::max_element(k.y.begin(), k.y.end()) + 14.0 * smin;
    auto f = [&](double z) {
      double prod = 1.0;
      for (std::size_t i = 0; i < 4; ++i) prod *= p_bulk(k.tau[i], z, k.y[i]);
      return 1.5 * g2 * moment(lr0, z) * prod;
    };
    out.contact_folded = quad::gk_split(f, 0.0, top, 0.25 * smin, 1e-14, 1e-9);
  }
  out.bulk_folded = bulk + out.contact_folded;

  // surface part in u = z - z', w = z + z':
  // p* p* - pB pB = gB(l1; u) gI(l2; w) + gI(l1; w) gB(l2; u) + gI(l1; w) gI(l2; w)
  const BoundaryKind bc = cfg.bc;
  const double tmin = *std::min_element(k.tau.begin(), k.tau.end());
  const double tmax = *std::max_element(k.tau.begin(), k.tau.end());
  const double wtop = 2.0 * (*std::max_element(k.y.begin(), k.y.end()) + 14.0 * std::sqrt(tmax));
  const double hmax = 0.25 * std::sqrt(tmin);
  const quad::Rule wr = quad::gauss_legendre<8>(graded_breaks(0.0, wtop, 0.02 / cfg.lambda0, hmax));
  const auto nw = static_cast<Eigen::Index>(wr.size());
  const auto nL = static_cast<Eigen::Index>(nl);

  Eigen::MatrixXd G(nL, nw);
  for (Eigen::Index i = 0; i < nL; ++i)
    for (Eigen::Index j = 0; j < nw; ++j)
      G(i, j) = surface_kernel_value(bc, lr.x[static_cast<std::size_t>(i)], wr.x[static_cast<std::size_t>(j)], 0.0);
  Eigen::VectorXd W(nw);
  for (Eigen::Index j = 0; j < nw; ++j) W(j) = wr.w[static_cast<std::size_t>(j)];
  Eigen::MatrixXd lw(nL, nL);
  for (Eigen::Index i = 0; i < nL; ++i)
    for (Eigen::Index j = 0; j < nL; ++j) {
      double l1 = lr.x[static_cast<std::size_t>(i)], l2 = lr.x[static_cast<std::size_t>(j)];
      lw(i, j) = lr.w[static_cast<std::size_t>(i)] * lr.w[static_cast<std::size_t>(j)] * loop_factor(l1 + l2, m);
    }

  double surface = 0.0;
  for (const auto& ch : channels) {
    GaussPair P = pair_of(k.tau[ch[0]], k.y[ch[0]], k.tau[ch[1]], k.y[ch[1]]);
    GaussPair Q = pair_of(k.tau[ch[2]], k.y[ch[2]], k.tau[ch[3]], k.y[ch[3]]);
    auto F = [&](double u, double w) {
      double z = 0.5 * (w + u), zp = 0.5 * (w - u);
      return 0.5 * P.amp * normal_pdf(z, P.mu, P.var) * Q.amp * normal_pdf(zp, Q.mu, Q.var);
    };
    // M(l; w) = int F gB(l; u) du over |u| <= w, M0(w) without the kernel
    Eigen::MatrixXd M(nL, nw);
    Eigen::VectorXd M0(nw);
    for (Eigen::Index j = 0; j < nw; ++j) {
      double w = wr.x[static_cast<std::size_t>(j)];
      auto plain = quad::gauss_legendre<8>(graded_breaks(-w, w, std::min(hmax, w), hmax));
      double s0 = 0.0;
      for (std::size_t q = 0; q < plain.size(); ++q) s0 += plain.w[q] * F(plain.x[q], w);
      M0(j) = s0;
      for (Eigen::Index i = 0; i < nL; ++i) {
        double l = lr.x[static_cast<std::size_t>(i)], sl = std::sqrt(l);
        double half = std::min(w, 12.0 * sl);
        std::vector<double> br;
        auto right = graded_breaks(0.0, half, std::min(0.25 * sl, hmax), std::min(sl, hmax));
        for (auto it = right.rbegin(); it != right.rend(); ++it) br.push_back(-*it);
        br.insert(br.end(), right.begin() + 1, right.end());
        auto rule = quad::gauss_legendre<8>(br);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) s += rule.w[q] * F(rule.x[q], w) * p_bulk(l, rule.x[q], 0.0);
        M(i, j) = s;
      }
    }
    Eigen::MatrixXd cross = M * W.asDiagonal() * G.transpose();
    Eigen::MatrixXd image = G * (W.cwiseProduct(M0)).asDiagonal() * G.transpose();
    Eigen::MatrixXd T = cross + cross.transpose() + image;
    surface += lw.cwiseProduct(T).sum();
  }
  out.surface_folded = -0.5 * g2 * surface;
  return out;
}

}  // namespace hsf::flow
