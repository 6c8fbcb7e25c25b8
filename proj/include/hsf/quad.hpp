#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hsf::quad {

// Adaptive Gauss-Kronrod on [a, b]; either bound may be infinite.
template <class F>
double gk(F&& f, double a, double b, double rel_tol = 1e-12, double* err = nullptr,
          unsigned max_depth = 18) {
  double e = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      std::forward<F>(f), a, b, max_depth, rel_tol, &e);
  if (err) *err = e;
  return v;
}

// Adaptive GK with an absolute floor: splits until the error estimate is below
// max(abs_tol, rel_tol * |value|). Boost's integrator only stops on relative error.
template <class F>
double gk_abs(const F& f, double a, double b, double abs_tol, double rel_tol = 1e-13,
              int depth = 0) {
  double e = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &e);
  if (e <= std::max(abs_tol, rel_tol * std::abs(v)) || depth > 20) return v;
  double m = 0.5 * (a + b);
  return gk_abs(f, a, m, 0.5 * abs_tol, rel_tol, depth + 1) +
         gk_abs(f, m, b, 0.5 * abs_tol, rel_tol, depth + 1);
}

// gk_abs over panels no wider than h, so narrow peaks are not stepped over.
template <class F>
double gk_split(const F& f, double a, double b, double h, double abs_tol, double rel_tol = 1e-13) {
  int n = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
  double sum = 0.0, step = (b - a) / n;
  for (int i = 0; i < n; ++i)
    sum += gk_abs(f, a + i * step, a + (i + 1) * step, abs_tol / n, rel_tol);
  return sum;
}

// Composite Gauss-Legendre rule on a list of sorted breakpoints.
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

template <unsigned N = 8>
Rule gauss_legendre(const std::vector<double>& breaks) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  Rule r;
  r.x.reserve(N * breaks.size());
  r.w.reserve(N * breaks.size());
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    double a = breaks[p], b = breaks[p + 1];
    if (!(b > a)) continue;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    // boost stores the nonnegative half of a symmetric rule
    for (std::size_t i = 0; i < ab.size(); ++i) {
      if (ab[i] == 0.0) {
        r.x.push_back(c);
        r.w.push_back(h * wt[i]);
      } else {
        r.x.push_back(c - h * ab[i]);
        r.w.push_back(h * wt[i]);
        r.x.push_back(c + h * ab[i]);
        r.w.push_back(h * wt[i]);
      }
    }
  }
  return r;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

inline std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = n == 1 ? a : std::exp(std::log(a) + (std::log(b) - std::log(a)) * i / (n - 1));
  return v;
}

// Least squares fit y = c0 + c1 x; returns {c0, c1, r2}.
struct LineFit {
  double intercept;
  double slope;
  double r2;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icpt = (sy - slope * sx) / n;
  double ss_tot = 0, ss_res = 0, my = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (icpt + slope * x[i]);
    ss_res += r * r;
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  return {icpt, slope, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

}  // namespace hsf::quad
