#include "hsf/kernels.hpp"

#include <cmath>
#include <numbers>

#include "hsf/quad.hpp"

namespace hsf {

namespace {

constexpr double kInvSqrtPi = 0.56418958354775628695;  // 1/sqrt(pi)
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void require_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::domain_error("heat time tau must be > 0");
}

void require_half_line(double z, double zp) {
  if (!(z >= 0.0) || !(zp >= 0.0))
    throw std::domain_error("boundary kernels need z, z' >= 0");
}

// erfcx for x >= 0 by a Lentz-evaluated continued fraction.
double erfcx_cf(double x) {
  // erfc(x) e^{x^2} = (1/sqrt(pi)) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  const double tiny = 1e-300;
  double f = x, C = x, D = 0.0;
  for (int n = 1; n < 500; ++n) {
    double a = 0.5 * n;
    D = x + a * D;
    if (std::abs(D) < tiny) D = tiny;
    C = x + a / C;
    if (std::abs(C) < tiny) C = tiny;
    D = 1.0 / D;
    double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return kInvSqrtPi / f;
}

}  // namespace

BoundaryKind BoundaryKind::robin(double c) {
  if (!(c >= 0.0)) throw std::domain_error("Robin parameter c must be >= 0");
  return {Bc::Robin, c};
}

std::string to_string(Bc bc) {
  switch (bc) {
    case Bc::Bulk: return "bulk";
    case Bc::Dirichlet: return "dirichlet";
    case Bc::Neumann: return "neumann";
    case Bc::Robin: return "robin";
  }
  return "?";
}

Bc parse_bc(std::string_view name) {
  if (name == "bulk" || name == "B") return Bc::Bulk;
  if (name == "dirichlet" || name == "D") return Bc::Dirichlet;
  if (name == "neumann" || name == "N") return Bc::Neumann;
  if (name == "robin" || name == "R") return Bc::Robin;
  throw std::invalid_argument("unknown boundary kind: " + std::string(name));
}

void check_context(const KernelContext& ctx) {
  if (!(ctx.mass > 0.0)) throw std::domain_error("mass must be > 0");
  if (ctx.bc.kind == Bc::Robin && !(ctx.bc.c >= 0.0))
    throw std::domain_error("Robin parameter c must be >= 0");
}

double p_bulk(double tau, double z, double zp) noexcept {
  double d = z - zp;
  return kInvSqrt2Pi / std::sqrt(tau) * std::exp(-d * d / (2.0 * tau));
}

double erfcx(double x) noexcept {
  if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
  if (x < 2.0) return std::exp(x * x) * std::erfc(x);
  return erfcx_cf(x);
}

// int_0^inf dw e^{-w} p_B(tau; z, -w/c - z'), a = z + z' >= 0.
// Completing the square gives (c/2) e^{-a^2/(2 tau)} erfcx((a + c tau)/sqrt(2 tau)).
double robin_image_closed(double c, double tau, double z, double zp) noexcept {
  if (std::isinf(c)) return p_bulk(tau, z, -zp);
  double a = z + zp;
  double u = (a + c * tau) / std::sqrt(2.0 * tau);
  return 0.5 * c * std::exp(-a * a / (2.0 * tau)) * erfcx(u);
}

double kernel_value(const BoundaryKind& bc, double tau, double z, double zp) noexcept {
  double direct = p_bulk(tau, z, zp);
  switch (bc.kind) {
    case Bc::Bulk: return direct;
    case Bc::Dirichlet: return direct - p_bulk(tau, z, -zp);
    case Bc::Neumann: return direct + p_bulk(tau, z, -zp);
    case Bc::Robin:
      if (bc.c == 0.0) return direct + p_bulk(tau, z, -zp);
      return direct + p_bulk(tau, z, -zp) - 2.0 * robin_image_closed(bc.c, tau, z, zp);
  }
  return direct;
}

double surface_kernel_value(const BoundaryKind& bc, double tau, double z, double zp) noexcept {
  switch (bc.kind) {
    case Bc::Bulk: return 0.0;
    case Bc::Dirichlet: return -p_bulk(tau, z, -zp);
    case Bc::Neumann: return p_bulk(tau, z, -zp);
    case Bc::Robin:
      if (bc.c == 0.0) return p_bulk(tau, z, -zp);
      return p_bulk(tau, z, -zp) - 2.0 * robin_image_closed(bc.c, tau, z, zp);
  }
  return 0.0;
}

double eval_bulk(const KernelQuery& q) {
  require_tau(q.tau);
  return p_bulk(q.tau, q.z, q.zp);
}

double eval_kernel(const KernelContext& ctx, const KernelQuery& q) {
  check_context(ctx);
  require_tau(q.tau);
  if (ctx.bc.kind != Bc::Bulk) require_half_line(q.z, q.zp);
  if (ctx.bc.kind == Bc::Robin && ctx.bc.c > 0.0) {
    double v = p_bulk(q.tau, q.z, q.zp) + p_bulk(q.tau, q.z, -q.zp) -
               2.0 * robin_image_integral(ctx, q);
    return v;
  }
  return kernel_value(ctx.bc, q.tau, q.z, q.zp);
}

double robin_image_quadrature(double c, double tau, double z, double zp) {
  require_tau(tau);
  if (!(c > 0.0)) throw SingularArgument("Robin image integral needs c > 0");
  // Substitute v = w / c so the Gaussian width sets the scale of the integrand.
  auto f = [&](double v) { return c * std::exp(-c * v) * p_bulk(tau, z, -v - zp); };
  // Both factors decrease in v, so truncating where either is e^{-40} of its
  // starting value leaves a relative error below e^{-40}.
  double a = z + zp;
  double len = std::min(40.0 / c, std::sqrt(a * a + 80.0 * tau) - a);
  return quad::gk_abs(f, 0.0, len, 0.0, 1e-13);
}

double robin_image_integral(const KernelContext& ctx, const KernelQuery& q) {
  check_context(ctx);
  require_tau(q.tau);
  require_half_line(q.z, q.zp);
  if (ctx.bc.kind != Bc::Robin) throw std::domain_error("robin_image_integral needs a Robin context");
  if (!(ctx.bc.c > 0.0)) throw SingularArgument("Robin image integral needs c > 0; use the Neumann branch");
  double fast = robin_image_closed(ctx.bc.c, q.tau, q.z, q.zp);
  double slow = robin_image_quadrature(ctx.bc.c, q.tau, q.z, q.zp);
  double scale = std::max(std::abs(slow), 1e-300);
  if (std::abs(fast - slow) > 1e-8 * scale && std::abs(fast - slow) > 1e-15)
    throw ValidationError("Robin image closed form disagrees with quadrature");
  return fast;
}

double eval_surface_kernel(const KernelContext& ctx, const KernelQuery& q) {
  check_context(ctx);
  require_tau(q.tau);
  require_half_line(q.z, q.zp);
  if (ctx.bc.kind == Bc::Bulk) throw std::domain_error("surface kernel needs a boundary condition");
  if (ctx.bc.kind == Bc::Robin && ctx.bc.c > 0.0)
    return p_bulk(q.tau, q.z, -q.zp) - 2.0 * robin_image_integral(ctx, q);
  return surface_kernel_value(ctx.bc, q.tau, q.z, q.zp);
}

double moment_constant(double delta, double delta_p, int r) {
  if (!(delta >= 0.0) || !(delta_p > delta)) throw std::domain_error("need 0 <= delta < delta'");
  if (r < 0) throw std::domain_error("moment order r must be >= 0");
  double pref = std::sqrt((1.0 + delta_p) / (1.0 + delta));
  if (r == 0) return pref;
  double k = (delta_p - delta) / ((1.0 + delta) * (1.0 + delta_p));
  return pref * std::pow(r / (k * std::numbers::e), 0.5 * r);
}

namespace identities {

double bulk_semigroup(double tau1, double tau2, double z1, double z2) {
  auto f = [&](double u) { return p_bulk(tau1, z1, u) * p_bulk(tau2, u, z2); };
  double w = 12.0 * std::sqrt(tau1 + tau2);
  double lo = std::min(z1, z2) - w, hi = std::max(z1, z2) + w;
  double h = std::sqrt(std::min(tau1, tau2));
  double v = quad::gk_split(f, lo, hi, h, 1e-14, 1e-12);
  return v - p_bulk(tau1 + tau2, z1, z2);
}

double star_semigroup(const BoundaryKind& bc, double tau1, double tau2, double z1, double z2) {
  auto f = [&](double u) { return kernel_value(bc, tau1, z1, u) * kernel_value(bc, tau2, u, z2); };
  double w = 14.0 * std::sqrt(tau1 + tau2);
  double hi = std::max(z1, z2) + w;
  double h = std::sqrt(std::min(tau1, tau2));
  double v = quad::gk_split(f, 0.0, hi, h, 1e-14, 1e-12);
  return v - kernel_value(bc, tau1 + tau2, z1, z2);
}

double completeness(double tau, double z) {
  auto f = [&](double u) { return p_bulk(tau, z, u); };
  double w = 14.0 * std::sqrt(tau);
  return quad::gk_abs(f, z - w, z + w, 1e-14, 1e-12) - 1.0;
}

double half_line_margin(double tau1, double tau2, double z1, double z2) {
  auto f = [&](double u) { return p_bulk(tau1, z1, u) * p_bulk(tau2, u, z2); };
  double w = 14.0 * std::sqrt(tau1 + tau2);
  double hi = std::max(z1, z2) + w;
  double half = quad::gk_split(f, 0.0, hi, std::sqrt(std::min(tau1, tau2)), 1e-15, 1e-12);
  return 2.0 * half - p_bulk(tau1 + tau2, z1, z2);
}

}  // namespace identities

}  // namespace hsf
