#include "hsf/propagators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "hsf/quad.hpp"

namespace hsf {

namespace {

double part_kernel(const BoundaryKind& bc, Part part, double lam, double z, double zp) {
  switch (part) {
    case Part::Bulk: return p_bulk(lam, z, zp);
    case Part::Surface: return surface_kernel_value(bc, lam, z, zp);
    case Part::Full: return kernel_value(bc, lam, z, zp);
  }
  return 0.0;
}

void check_query(const PropagatorQuery& q) {
  check_context(q.ctx);
  if (!(q.p >= 0.0)) throw std::domain_error("momentum magnitude must be >= 0");
  if (!(q.z >= 0.0) || !(q.zp >= 0.0)) throw std::domain_error("propagators need z, z' >= 0");
}

// int_{lo}^{hi} dlam f(lam) in t = log(lam), on unit panels in t.
template <class F>
double log_integral(const F& f, double lo, double hi) {
  double a = std::log(lo), b = std::log(hi);
  auto g = [&](double t) {
    double lam = std::exp(t);
    return lam * f(lam);
  };
  return quad::gk_split(g, a, b, 1.0, 1e-13, 1e-13);
}

// Smallest lam_max with the analytic tail bound
// int_{lam_max}^inf 4 (2 pi lam)^{-1/2} e^{-lam k2} dlam < 1e-14.
double tail_cutoff(double k2, double start) {
  double lm = std::max(start, 1.0 / k2);
  while (4.0 / std::sqrt(2.0 * std::numbers::pi * lm) * std::exp(-lm * k2) / k2 > 1e-14) lm *= 1.5;
  return lm;
}

}  // namespace

Part parse_part(const std::string& name) {
  if (name == "full") return Part::Full;
  if (name == "bulk") return Part::Bulk;
  if (name == "surface") return Part::Surface;
  throw std::invalid_argument("unknown propagator part: " + name);
}

void check_cutoffs(const CutoffPair& cut) {
  if (!(cut.lambda0 > 0.0) || !std::isfinite(cut.lambda0)) throw std::domain_error("lambda0 must be finite and > 0");
  if (!(cut.lambda >= 0.0)) throw std::domain_error("lambda must be >= 0");
  if (cut.lambda > cut.lambda0) throw std::domain_error("lambda must not exceed lambda0");
}

double flowing_propagator(const PropagatorQuery& q, Part part) {
  check_query(q);
  check_cutoffs(q.cut);
  if (q.cut.lambda == q.cut.lambda0) return 0.0;
  const double k2 = q.p * q.p + q.ctx.mass * q.ctx.mass;
  auto f = [&](double lam) {
    return part_kernel(q.ctx.bc, part, lam, q.z, q.zp) * std::exp(-lam * k2);
  };
  double lo = 1.0 / (q.cut.lambda0 * q.cut.lambda0);
  double hi = q.cut.lambda > 0.0 ? 1.0 / (q.cut.lambda * q.cut.lambda) : tail_cutoff(k2, lo);
  return log_integral(f, lo, hi);
}

double cutoff_tails(const PropagatorQuery& q, Part part) {
  check_query(q);
  check_cutoffs(q.cut);
  const double k2 = q.p * q.p + q.ctx.mass * q.ctx.mass;
  auto f = [&](double lam) {
    return part_kernel(q.ctx.bc, part, lam, q.z, q.zp) * std::exp(-lam * k2);
  };
  double lo = 1.0 / (q.cut.lambda0 * q.cut.lambda0);
  // The UV piece: below lam ~ 1e-30 lo the integrand is bounded by
  // (2 pi lam)^{-1/2} and contributes less than 1e-15 lo^{1/2}.
  double uv = log_integral(f, lo * 1e-30, lo);
  double ir = 0.0;
  if (q.cut.lambda > 0.0) {
    double hi = 1.0 / (q.cut.lambda * q.cut.lambda);
    double top = tail_cutoff(k2, hi);
    if (top > hi) ir = log_integral(f, hi, top);
  }
  return uv + ir;
}

double closed_form_propagator(const BoundaryKind& bc, double p, double z, double zp, double m) {
  if (!(m > 0.0)) throw std::domain_error("mass must be > 0");
  if (!(p >= 0.0)) throw std::domain_error("momentum magnitude must be >= 0");
  if (!(z >= 0.0) || !(zp >= 0.0)) throw std::domain_error("propagators need z, z' >= 0");
  const double k = std::sqrt(p * p + m * m);
  const double direct = std::exp(-k * std::abs(z - zp));
  const double image = std::exp(-k * (z + zp));
  switch (bc.kind) {
    case Bc::Bulk: return direct / (2.0 * k);
    case Bc::Dirichlet: return (direct - image) / (2.0 * k);
    case Bc::Neumann: return (direct + image) / (2.0 * k);
    case Bc::Robin: {
      if (!(bc.c >= 0.0)) throw std::domain_error("Robin parameter c must be >= 0");
      double r = std::isinf(bc.c) ? -1.0 : (k - bc.c) / (k + bc.c);
      return (direct + r * image) / (2.0 * k);
    }
  }
  return 0.0;
}

double proper_time_propagator(const BoundaryKind& bc, double p, double z, double zp, double m) {
  if (!(m > 0.0)) throw std::domain_error("mass must be > 0");
  if (!(p >= 0.0)) throw std::domain_error("momentum magnitude must be >= 0");
  if (!(z >= 0.0) || !(zp >= 0.0)) throw std::domain_error("propagators need z, z' >= 0");
  const double k = std::numbers::sqrt2 * std::sqrt(p * p + m * m);
  const double direct = std::exp(-k * std::abs(z - zp));
  const double image = std::exp(-k * (z + zp));
  switch (bc.kind) {
    case Bc::Bulk: return direct / k;
    case Bc::Dirichlet: return (direct - image) / k;
    case Bc::Neumann: return (direct + image) / k;
    case Bc::Robin: {
      if (!(bc.c >= 0.0)) throw std::domain_error("Robin parameter c must be >= 0");
      double r = std::isinf(bc.c) ? -1.0 : (k - bc.c) / (k + bc.c);
      return (direct + r * image) / k;
    }
  }
  return 0.0;
}

double cdot(double lambda, double p, double m) {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be > 0");
  return -2.0 / (lambda * lambda * lambda) * std::exp(-(p * p + m * m) / (lambda * lambda));
}

double propagator_derivative(const PropagatorQuery& q, Part part) {
  check_query(q);
  if (!(q.cut.lambda > 0.0)) throw std::domain_error("propagator derivative needs lambda > 0");
  double lam = 1.0 / (q.cut.lambda * q.cut.lambda);
  return cdot(q.cut.lambda, q.p, q.ctx.mass) * part_kernel(q.ctx.bc, part, lam, q.z, q.zp);
}

double cdot_momentum_integral(double lambda, double m) {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be > 0");
  return -std::exp(-m * m / (lambda * lambda)) / (4.0 * std::pow(std::numbers::pi, 1.5));
}

CovarianceReport covariance_bound_check(int w_order, const std::vector<double>& poly, double m) {
  if (w_order < 0 || w_order > 3) throw std::domain_error("w_order must be in 0..3");
  if (!(m > 0.0)) throw std::domain_error("mass must be > 0");
  CovarianceReport rep;
  rep.w_order = w_order;
  int pdeg = 0;
  for (int k = 0; k < static_cast<int>(poly.size()); ++k)
    if (poly[k] != 0.0) pdeg = k;
  rep.degree = pdeg + w_order;

  // |d^w_{p_1} cdot| at p = (p, 0, 0) through Hermite polynomials in p/L.
  auto lhs = [&](double p, double L) {
    double s = p / L;
    double h0 = 1.0, h1 = 2.0 * s, hw = w_order == 0 ? h0 : h1;
    for (int n = 1; n < w_order; ++n) {
      double h2 = 2.0 * s * h1 - 2.0 * n * h0;
      h0 = h1;
      h1 = h2;
      hw = h2;
    }
    double P = 0.0, sp = 1.0;
    for (double c : poly) {
      P += c * sp;
      sp *= s;
    }
    double v = 2.0 / (L * L * L) * std::exp(-(p * p + m * m) / (L * L)) * std::pow(L, -w_order) *
               std::abs(hw) * std::abs(P);
    return v * std::pow(L + m, 3 + w_order);
  };

  auto sweep = [&](int np, int nl, auto&& visit) {
    auto lams = quad::logspace(1e-2 * m, 1e2 * m, nl);
    for (double L : lams)
      for (double p : quad::linspace(0.0, 12.0 * (L + m), np)) visit(p, L);
  };

  // K = sup of lhs / (1+x)^D: a coarse scan in x per L, refined by Brent
  double K = 0.0;
  auto ratio = [&](double x, double L) { return lhs(x * (L + m), L) / std::pow(1.0 + x, rep.degree); };
  for (double L : quad::logspace(1e-2 * m, 1e2 * m, 1001)) {
    auto xs = quad::linspace(0.0, 12.0, 121);
    std::size_t best = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = ratio(xs[i], L);
      rep.sup_fit_grid = std::max(rep.sup_fit_grid, lhs(xs[i] * (L + m), L));
      if (r > ratio(xs[best], L)) best = i;
    }
    double lo = xs[best == 0 ? 0 : best - 1], hi = xs[std::min(best + 1, xs.size() - 1)];
    auto refined = boost::math::tools::brent_find_minima([&](double t) { return -ratio(t, L); }, lo, hi, 50);
    K = std::max({K, -refined.second, ratio(xs[best], L)});
  }
  rep.scale = K;
  for (int k = 0; k <= rep.degree; ++k)
    rep.coefficients.push_back(K * std::tgamma(rep.degree + 1.0) /
                               (std::tgamma(k + 1.0) * std::tgamma(rep.degree - k + 1.0)));
  sweep(397, 253, [&](double p, double L) {
    double env = K * std::pow(1.0 + p / (L + m), rep.degree);
    rep.worst_ratio = std::max(rep.worst_ratio, lhs(p, L) / env);
  });
  rep.finite = std::isfinite(K) && std::isfinite(rep.worst_ratio);
  return rep;
}

}  // namespace hsf
