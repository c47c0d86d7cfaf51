#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sphirf/harmonics.hpp"
#include "sphirf/sphere.hpp"

namespace sphirf {

/// Parametric origin of a model's coefficients, kept for serialization.
struct CoefficientFamily {
  enum class Kind { Explicit, PowerLaw };
  Kind kind = Kind::Explicit;
  double scale = 0.0;    // power law c
  double exponent = 0.0; // power law s
};

/// Spectral description of an intrinsic covariance:
///   phi(d) = sum_{l not in D, l <= lmax} (2l+1)/(4pi) a_l P_l(cos d).
///
/// Construction does not validate; use validate_model() for user-supplied
/// coefficient lists. phi(0) is cached.
class SpectralModel {
public:
  SpectralModel(DegreeSet degrees, std::vector<double> coefficients, double sigma2,
                CoefficientFamily family = {}, std::optional<double> tail_bound = 0.0);

  const DegreeSet& degrees() const { return degrees_; }
  /// a_l for l = 0..lmax.
  const std::vector<double>& coefficients() const { return coeffs_; }
  /// a_l, zero beyond lmax.
  double coefficient(int l) const;
  int lmax() const { return static_cast<int>(coeffs_.size()) - 1; }
  double sigma2() const { return sigma2_; }
  double phi0() const { return phi0_; }
  const CoefficientFamily& family() const { return family_; }

  /// Upper bound on sum_{l > lmax} (2l+1) a_l of the untruncated family.
  /// Zero for explicit (band-limited) lists; empty if unknown.
  std::optional<double> tail_bound() const { return tail_bound_; }

  /// Same spectrum with a different noise variance.
  SpectralModel with_sigma2(double sigma2) const;

private:
  DegreeSet degrees_;
  std::vector<double> coeffs_;
  double sigma2_;
  CoefficientFamily family_;
  std::optional<double> tail_bound_;
  double phi0_ = 0.0;
};

/// a_l = c (l+1)^{-s} for l not in D, zero on D. Requires c > 0, s > 2, sigma2 >= 0.
SpectralModel power_law_model(const DegreeSet& degrees, double c, double s, double sigma2, int lmax);

/// Integral bound c * 2 (lmax+1)^{2-s} / (s-2) on the neglected summability tail.
double power_law_tail_bound(double c, double s, int lmax);

/// Intrinsic covariance phi(d) for an angle d in [0, pi].
double intrinsic_cov(const SpectralModel& model, double d);

/// Psi(i, j) = phi(d(x_i, x_j)), plus sigma2 on the diagonal if add_noise.
Eigen::MatrixXd cov_matrix(const SpectralModel& model, std::span<const SpherePoint> points, bool add_noise);

/// (phi(d(x_1, x0)), ..., phi(d(x_n, x0))).
Eigen::VectorXd cov_vector(const SpectralModel& model, std::span<const SpherePoint> points, const SpherePoint& x0);

struct ModelReport {
  bool valid = true;
  std::vector<std::string> reasons;
};

ModelReport validate_model(const SpectralModel& model);

} // namespace sphirf
