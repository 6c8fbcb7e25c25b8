#pragma once

#include <vector>

#include "hsf/kernels.hpp"

namespace hsf {

struct CutoffPair {
  double lambda = 0.0;    // infrared flow scale
  double lambda0 = 1.0;   // ultraviolet cutoff
};

struct PropagatorQuery {
  double p = 0.0;  // momentum magnitude
  double z = 0.0;
  double zp = 0.0;
  KernelContext ctx;
  CutoffPair cut;
};

enum class Part { Full, Bulk, Surface };

Part parse_part(const std::string& name);

void check_cutoffs(const CutoffPair& cut);

// Proper-time integral over lambda in [1/lambda0^2, 1/lambda^2].
double flowing_propagator(const PropagatorQuery& q, Part part);

// The same integrand over [0, 1/lambda0^2] plus [1/lambda^2, inf); the exact
// difference between the closed form and flowing_propagator.
double cutoff_tails(const PropagatorQuery& q, Part part);

double closed_form_propagator(const BoundaryKind& bc, double p, double z, double zp, double m);

// Exact value of the proper-time integral over (0, inf) of the kernels in
// kernels.hpp. p_B has variance tau, so the decay rate is sqrt(2) kappa and
// the normalization 1 / (sqrt(2) kappa); closed_form_propagator is the same
// expression for a kernel of variance 2 tau.
double proper_time_propagator(const BoundaryKind& bc, double p, double z, double zp, double m);

// -(2/L^3) exp(-(p^2+m^2)/L^2)
double cdot(double lambda, double p, double m);
double propagator_derivative(const PropagatorQuery& q, Part part);

// int d^3k/(2 pi)^3 cdot(lambda, |k|, m) = -exp(-m^2/lambda^2) / (4 pi^{3/2})
double cdot_momentum_integral(double lambda, double m);

struct CovarianceReport {
  int w_order = 0;
  int degree = 0;                      // degree of the fitted envelope
  double scale = 0.0;                  // K in K (1+x)^degree
  std::vector<double> coefficients;    // K * binom(degree, k), k = 0..degree
  double sup_fit_grid = 0.0;           // max |d^w cdot P| (L+m)^{3+w} on the fit grid
  double worst_ratio = 0.0;            // max of lhs / envelope on a finer validation grid
  bool finite = false;
};

// Fits an envelope (L+m)^{-3-w} K (1+x)^D, x = p/(L+m), to |d^w_p cdot(p) P(p/L)|.
// poly holds the coefficients of P in increasing degree.
CovarianceReport covariance_bound_check(int w_order, const std::vector<double>& poly, double m = 1.0);

}  // namespace hsf
