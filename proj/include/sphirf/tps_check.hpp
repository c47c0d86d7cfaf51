#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sphirf/spectral_model.hpp"
#include "sphirf/sphere.hpp"

namespace sphirf {

/// Kernel of the spherical angle d in [0, pi].
using AngularKernel = std::function<double(double)>;

/// k(d) ~ sum_l b_l P_l(cos d).
struct LegendreExpansion {
  std::string kernel_name;
  std::vector<double> coeffs; // b_0 .. b_L
  int quad_order = 0;
  /// Largest change of any b_l when the quadrature order is doubled.
  double doubling_shift = 0.0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double evaluate(double d) const;
};

/// Default Gauss-Legendre order for L coefficients: max(4L, 64).
int default_legendre_quad_order(int lmax);

/// b_l = (2l+1)/2 * integral_{-1}^{1} k(arccos t) P_l(t) dt for l = 0..lmax.
///
/// The integral is taken in the angle, t = cos d, with d = pi u^2 graded
/// toward d = 0 so that kernels with a logarithmic singularity at the origin
/// converge. Gauss-Legendre in u with `quad_order` nodes (>= 2 lmax). Throws
/// NumericalError(QuadratureTooCoarse) if doubling the order moves any b_l by
/// more than 1e-10.
LegendreExpansion legendre_coefficients(const AngularKernel& kernel, int lmax, int quad_order,
                                        std::string name = "kernel");
LegendreExpansion legendre_coefficients(const AngularKernel& kernel, int lmax, std::string name = "kernel");

/// Thin-plate radial function d^2 log d with E(0) = 0.
template <class Scalar>
Scalar tps_kernel(Scalar d) {
  if (d == Scalar(0)) {
    return Scalar(0);
  }
  return d * d * std::log(d);
}

struct PdVerdict {
  bool pass = true;
  int min_degree = 0;
  std::vector<std::pair<int, double>> negatives; // (l, b_l) with b_l < -tol, l >= min_degree
};

/// Conditional positive definiteness on the sphere: every b_l with
/// l >= min_degree must be nonnegative (tolerance 1e-10).
PdVerdict check_conditional_pd(const LegendreExpansion& expansion, int min_degree);

/// Legendre series of the Wahba spline kernel,
///   K(d) = (1/4pi) sum_{l=1}^{lmax} (2l+1) / (l^m (l+1)) P_l(cos d).
/// Requires m even and m >= 2.
double wahba_kernel(double d, int m, int lmax);

/// Bound on the neglected part of the series at any angle:
///   sum_{l > L} (2l+1)/(4pi l^m (l+1)) <= 1/(2pi (m-1) L^{m-1}).
double wahba_tail_bound(int m, int lmax);

/// Spectral model with D = {0} and a_l = 1/(l^m (l+1)), whose phi is wahba_kernel.
SpectralModel wahba_model(int m, int lmax, double sigma2 = 0.0);

/// Spline on the sphere f(x) = d + sum_i c_i K(x, x_i) with sum_i c_i = 0,
/// fitted from (K + alpha I) c + d 1 = w by a dense LU of the bordered system.
struct WahbaSpline {
  double d = 0.0;
  Eigen::VectorXd c;
  std::vector<SpherePoint> sites;
  int m = 2;
  int lmax = 0;

  double evaluate(const SpherePoint& x) const;
};

WahbaSpline fit_wahba_spline(std::span<const SpherePoint> sites, const Eigen::VectorXd& values, double alpha, int m,
                             int lmax);

struct TpsReport {
  LegendreExpansion expansion;
  PdVerdict verdict;
};

/// Legendre expansion of the thin-plate kernel under the spherical distance
/// and its order-2 verdict.
TpsReport run_tps_check(int lmax);

} // namespace sphirf
