#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsf/kernels.hpp"
#include "hsf/quad.hpp"

namespace hsf::flow {

class IncompleteFlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedKinematics : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Strictly decreasing checkpoints from lambda0 down to lambda_min, then 0.
std::vector<double> log_schedule(double lambda0, double lambda_min, int steps_per_decade);

// Throws std::invalid_argument unless strictly decreasing and positive before
// the last entry; IncompleteFlowError unless the last entry is 0.
void check_schedule(const std::vector<double>& schedule);

struct GridSpec {
  std::vector<double> z;        // starts at 0, sinh-graded toward the surface
  std::vector<double> zw;       // composite Simpson weights in the graded variable
  std::vector<double> p{0.0};   // momentum magnitudes
  std::vector<double> schedule;

  // z_max and lambda_min are in units of 1/m and m
  static GridSpec standard(double mass, double lambda0, int z_nodes = 257, double z_max = 10.0,
                           int steps_per_decade = 400, double lambda_min = 1e-2);
  void validate() const;
  double integrate(const std::vector<double>& f) const;
};

struct FlowConfig {
  double coupling = 1.0;  // lambda
  double mass = 1.0;
  BoundaryKind bc = BoundaryKind::robin(1.0);
  double lambda0 = 50.0;
  int steps_per_decade = 400;
  double lambda_min = 1e-2;  // last positive checkpoint, in units of m
  int z_nodes = 257;
  double z_max = 10.0;       // in units of 1/m

  GridSpec grid() const;
};

// Classical RK4 along the given nodes (any direction). rhs(L, y) = dy/dL.
using Rhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
std::vector<Eigen::VectorXd> rk4(const Rhs& rhs, const Eigen::VectorXd& y0,
                                 const std::vector<double>& nodes);

// (lambda / 2) int_k cdot^L(k): the common prefactor of both tadpole flows.
double tadpole_prefactor(double coupling, double lambda, double mass);

// int_0^inf z^r p_S(1/L^2; z, z) dz by adaptive Gauss-Kronrod; the second
// form uses tanh-sinh and serves as the independent route for h.
double surface_moment(const BoundaryKind& bc, double lambda, int r);
double surface_moment_exp_sinh(const BoundaryKind& bc, double lambda, int r);

// Distributions in z at fixed |p|. Contact terms are coefficient arrays;
// only the smooth kernel lives on the grid.
struct CorrelationObject {
  int l = 0;
  int n = 2;
  bool surface = false;
  std::vector<double> z, zw, p;
  // n = 2: (a - s d/dz - d d^2/dz^2) delta(z1 - z2) with a depending on p
  std::vector<std::vector<double>> a;  // [p][z]
  std::vector<double> s, d;            // [z]
  std::vector<Eigen::MatrixXd> smooth; // [p](z1, z2); empty when absent
  // surface contacts: s0 d0 d0 + e0 (d0 d0' + d0' d0)
  double s0 = 0.0, e0 = 0.0;
  // n = 4 at zero momenta: c(z1) prod delta(z1 - z_i)
  std::vector<double> c;

  void validate() const;  // shapes and Bose symmetry of the smooth part
};

struct RelevantTerms {
  std::vector<double> a, s, d, b, c;  // bulk profiles on the grid
  double s_surf = 0.0, e_surf = 0.0, h_surf = 0.0;
};

enum class TermKind { Bulk, Surface };

// Needs p[0] = 0; b needs the stencil {0, h, 2h, 4h} in p as well.
RelevantTerms extract_relevant_terms(const CorrelationObject& obj, TermKind kind);

struct TreeLevel {
  CorrelationObject d2, d4, s2, s4;
};

TreeLevel tree_level_init(double coupling, const GridSpec& grid);

// lambda int_0^inf dz prod_i p_B(tau_i; z, y_i), closed form.
double fold_contact4(double coupling, const std::vector<double>& tau, const std::vector<double>& y);

struct TestFunction {
  enum class Kind { BulkKernel, StarKernel, CharHalfline, BoundaryProbe };
  Kind kind = Kind::BulkKernel;
  double tau = 1.0;
  double y = 0.0;
  BoundaryKind bc;

  static TestFunction bulk_kernel(double tau, double y);
  static TestFunction star_kernel(double tau, double y, const BoundaryKind& bc);
  static TestFunction char_halfline();
  static TestFunction boundary_probe(double tau);  // z p_B(tau; z, 0)

  double value(double z) const;
  double derivative(double z) const;  // d/dz, one-sided at 0
  double extent() const;              // support effectively inside [0, extent]
};

struct TadpoleCheckpoint {
  double lambda = 0.0;
  double s = 0.0, e = 0.0, h = 0.0;  // surface run; bulk runs use s for a
};

struct BulkTadpole {
  double a_lambda0 = 0.0;   // a_1 at Lambda = Lambda0: the bare counterterm
  double a_zero = 0.0;      // a_1 at Lambda = 0 after the downward run
  std::vector<TadpoleCheckpoint> series;  // downward from Lambda0
  CorrelationObject at_lambda0, at_zero;
};

BulkTadpole integrate_bulk_tadpole(const FlowConfig& cfg,
                                   const std::vector<double>& schedule = {});

struct SurfaceTadpole {
  double s_lambda0 = 0.0, e_lambda0 = 0.0, h_lambda0 = 0.0;
  double s_zero = 0.0, e_zero = 0.0, h_zero = 0.0;  // round trip residuals
  std::vector<TadpoleCheckpoint> series;  // downward from Lambda0
  std::vector<double> profile_zero;       // smooth diagonal sigma(z) at Lambda = 0
  CorrelationObject at_lambda0;           // pure contact terms
  CorrelationObject at_zero;              // contacts plus sigma(z) delta(z1 - z2)
  double additivity_residual = 0.0;       // max |bulk + surface - full| flow mismatch
};

SurfaceTadpole integrate_surface_tadpole(const FlowConfig& cfg,
                                         const std::vector<double>& schedule = {});

// S_{1,2} at scale lambda folded with phi1, phi2: contacts plus the smooth
// diagonal part integrated from lambda to lambda0.
double fold_surface_two_point(const FlowConfig& cfg, double lambda, double s_ct, double e_ct,
                              const TestFunction& f1, const TestFunction& f2);

struct DirichletCheck {
  std::vector<double> lambda0;
  std::vector<double> value;      // folded at Lambda = 0
  double relative_change = 0.0;   // between the last two entries
  bool cauchy = false;            // relative_change < 5%
};

DirichletCheck dirichlet_surface_check(const FlowConfig& cfg, const std::vector<double>& lambda0s,
                                       double tau1 = 1.0, double y1 = 0.5, double tau2 = 1.0,
                                       double y2 = 1.0);

struct RobinLimit {
  std::vector<double> c;
  std::vector<double> value;
  std::vector<double> gap;  // |value - dirichlet|
  double dirichlet = 0.0;
  double neumann = 0.0;
  double neumann_gap = 0.0;
  double extrapolated = 0.0;  // Richardson in 1/c from the last two entries
  double extrapolation_error = 0.0;
  bool decreasing = false;
};

RobinLimit robin_dirichlet_limit(const FlowConfig& cfg, double lambda, const std::vector<double>& c_list,
                                 double tau1 = 1.0, double y1 = 0.5, double tau2 = 1.0,
                                 double y2 = 1.0);

struct Amputation {
  double kappa = 0.0;
  double c00 = 0.0, c0y = 0.0;    // closed-form C_R(p; 0, 0), C_R(p; 0, y2)
  double interior = 0.0;          // (s + 2 c e) C(0,y1) C(0,y2) contact action at y1 > 0
  double interior_closed = 0.0;
  double lhs127 = 0.0, rhs127 = 0.0, lhs127_closed = 0.0, rhs127_closed = 0.0;
  double lhs128 = 0.0, rhs128 = 0.0, lhs128_closed = 0.0, rhs128_closed = 0.0;
  double dz_limit_y_then_z = 0.0; // lim_{z->0} lim_{y->0} d_z C / C(0,0) = -kappa
  double dz_limit_z_then_y = 0.0; // lim_{y->0} lim_{z->0} d_z C / C(0,0) = +c
  bool degenerate = false;        // e = 0
  bool strict127 = false, strict128 = false;
};

Amputation amputation_comparison(double s_ct, double e_ct, double c, double m, double p, double y1,
                                 double y2);

enum class ProbeFamily { Bulk, Surface };

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool vanishes = false;  // moment identically zero
};

struct PowerCounting {
  ScalingFit bulk, surface;
  double gap = 0.0;  // bulk exponent minus surface exponent
  std::vector<double> lambda, bulk_flow, surface_flow;
};

// |d/dL of the (r1, r2) moment| against L + m over [2m, 20m].
ScalingFit power_counting_fit(const FlowConfig& cfg, ProbeFamily family, int r1, int r2,
                              const std::vector<double>& lambdas);
PowerCounting power_counting_probe(const FlowConfig& cfg, int r1 = 0, int r2 = 0, int points = 41);

struct FourPointKinematics {
  std::vector<double> tau{1.0, 1.0, 1.0, 1.0};
  std::vector<double> y{0.5, 0.5, 0.5, 0.5};
  std::vector<double> p{0.0, 0.0, 0.0, 0.0};
};

struct FourPoint {
  double lambda = 0.0;
  double bulk_folded = 0.0;     // D_{1,4} with its BPHZ contact term
  double surface_folded = 0.0;  // S_{1,4}, no counterterm
  double contact_folded = 0.0;  // the contact part of bulk_folded
  std::vector<double> z, c;     // c_1(z) at lambda
  std::vector<double> c_ct;     // c_1(z) at lambda0
};

FourPoint one_loop_four_point(const FlowConfig& cfg, double lambda, const FourPointKinematics& k = {});

}  // namespace hsf::flow
