#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "sphirf/harmonics.hpp"
#include "sphirf/spectral_model.hpp"
#include "sphirf/sphere.hpp"

namespace sphirf {

/// Nil-space functions p_1..p_dN with p_nu(tau_mu) = delta_{nu mu}.
///
/// p_nu(x) = q(x)^T coeff.col(nu), where coeff is the inverse of the
/// d_N x d_N interpolation matrix Q(tau)(mu, k) = q_k(tau_mu).
struct CardinalBasis {
  DegreeSet degrees;
  std::vector<SpherePoint> taus;
  Eigen::MatrixXd coeff;
  /// 2-norm condition number of Q(tau).
  double condition = 0.0;

  /// (p_1(x), ..., p_dN(x)).
  Eigen::VectorXd evaluate(const SpherePoint& x) const;
};

/// Throws NumericalError(NonUnisolvent) if Q(tau) is singular or has
/// condition number above 1e10; ValidationError if the count is not d_N.
CardinalBasis cardinal_basis(std::span<const SpherePoint> taus, const DegreeSet& degrees);

/// Deterministic unisolvent points: the north pole for d_N = 1; the pole plus
/// three equatorial points at longitudes 0, 2pi/3, 4pi/3 for d_N = 4;
/// otherwise d_N points of a Fibonacci lattice chosen by column-pivoted QR.
std::vector<SpherePoint> default_cardinal_points(const DegreeSet& degrees);

/// Reproducing kernel H(x, y) of the native space built from phi and the
/// cardinal basis. The basis and the model must share the degree set.
double reproducing_kernel(const SpherePoint& x, const SpherePoint& y, const CardinalBasis& basis,
                          const SpectralModel& model);

/// Function of the form sum_nu b_nu q_nu(x) + sum_i c_i phi(d(x_i, x)) with
/// Q(centers)^T c = 0.
struct RepresentableFunction {
  Eigen::VectorXd b;
  std::vector<SpherePoint> centers;
  Eigen::VectorXd c;

  double evaluate(const SpherePoint& x, const SpectralModel& model) const;
};

/// Full native-space inner product sum_nu f(tau_nu) g(tau_nu) + <f, g>_D,
/// where the semi-inner product of kernel parts is c_f^T Phi(centers_f, centers_g) c_g.
double native_inner_product(const RepresentableFunction& f, const RepresentableFunction& g,
                            const CardinalBasis& basis, const SpectralModel& model);

/// H(x, .) written as a representable function.
RepresentableFunction kernel_section(const SpherePoint& x, const CardinalBasis& basis, const SpectralModel& model);

/// Minimizer f_alpha(x) = sum_nu b_nu q_nu(x) + sum_i c_i phi(d(x_i, x)) of
///   sum_i (w_i - f(x_i))^2 + alpha |f|^2.
struct SmoothingFit {
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<SpherePoint> sites;
  SpectralModel model;
  double alpha = 0.0;

  RepresentableFunction as_function() const { return {b, sites, c}; }
};

/// Solves (Psi + alpha I) c + Q b = w, Q^T c = 0 by the null-space method:
/// with Q = [F1 F2] [R; 0], c = F2 (F2^T (Psi + alpha I) F2)^-1 F2^T w and
/// R b = F1^T (w - (Psi + alpha I) c). Requires alpha > 0 and n > d_N.
SmoothingFit fit_smoothing_spline(std::span<const SpherePoint> sites, const Eigen::VectorXd& values,
                                  const SpectralModel& model, double alpha);

double evaluate_fit(const SmoothingFit& fit, const SpherePoint& x);

/// Roughness c^T Psi c of the kernel part.
double semi_norm_sq(const SmoothingFit& fit);

struct DualResult {
  double smoothing = 0.0;
  double kriging = 0.0;
  double gap = 0.0;
};

/// Smoothing spline with alpha against universal kriging with sigma2 = alpha at x0.
DualResult dual_kriging_equivalence(std::span<const SpherePoint> sites, const Eigen::VectorXd& values,
                                    const SpectralModel& model, double alpha, const SpherePoint& x0);

} // namespace sphirf
