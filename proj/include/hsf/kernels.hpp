#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hsf {

enum class Bc { Bulk, Dirichlet, Neumann, Robin };

struct BoundaryKind {
  Bc kind = Bc::Neumann;
  double c = 0.0;  // Robin parameter, only meaningful for Bc::Robin

  static BoundaryKind bulk() { return {Bc::Bulk, 0.0}; }
  static BoundaryKind dirichlet() { return {Bc::Dirichlet, 0.0}; }
  static BoundaryKind neumann() { return {Bc::Neumann, 0.0}; }
  static BoundaryKind robin(double c);
};

std::string to_string(Bc bc);
Bc parse_bc(std::string_view name);

struct KernelContext {
  double mass = 1.0;
  BoundaryKind bc;
};

struct KernelQuery {
  double tau;
  double z;
  double zp;
};

// Raised when the closed-form and quadrature evaluations of the Robin image
// term disagree.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for the c = 0 Robin image integral, which has no weighted image.
class SingularArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void check_context(const KernelContext& ctx);

// Unchecked hot-path evaluations.
double p_bulk(double tau, double z, double zp) noexcept;
double erfcx(double x) noexcept;
double robin_image_closed(double c, double tau, double z, double zp) noexcept;
double kernel_value(const BoundaryKind& bc, double tau, double z, double zp) noexcept;
double surface_kernel_value(const BoundaryKind& bc, double tau, double z, double zp) noexcept;

// Checked API.
double eval_bulk(const KernelQuery& q);
double eval_kernel(const KernelContext& ctx, const KernelQuery& q);
double robin_image_quadrature(double c, double tau, double z, double zp);
double robin_image_integral(const KernelContext& ctx, const KernelQuery& q);
double eval_surface_kernel(const KernelContext& ctx, const KernelQuery& q);

// C_{delta,delta'} of the moment bound
// |z1-z2|^r p_B(tau_delta) <= C tau^{r/2} p_B(tau_delta').
double moment_constant(double delta, double delta_p, int r);

// Residuals of the kernel identities, used by tests and the acceptance suite.
namespace identities {
double bulk_semigroup(double tau1, double tau2, double z1, double z2);
double star_semigroup(const BoundaryKind& bc, double tau1, double tau2, double z1, double z2);
double completeness(double tau, double z);
// Returns 2 * int_{R+} p p - int_R p p, which must be nonnegative for z1, z2 >= 0.
double half_line_margin(double tau1, double tau2, double z1, double z2);
}  // namespace identities

}  // namespace hsf
