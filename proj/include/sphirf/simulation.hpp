#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "sphirf/harmonics.hpp"
#include "sphirf/spectral_model.hpp"
#include "sphirf/sphere.hpp"

namespace sphirf {

/// Band-limited field Z(x) = sum_{l <= lmax} sum_m Z_{l,m} Y_l^m(x).
struct HarmonicField {
  int lmax = 0;
  Eigen::VectorXd coeffs; // flat_index order
  std::uint64_t seed = 0;

  double coefficient(const HarmonicIndex& idx) const { return coeffs(flat_index(idx.l, idx.m)); }
  double evaluate(const SpherePoint& x) const { return sph_harm_all(lmax, x).dot(coeffs); }
};

/// Variance a_l assigned to each Z_{l,m}, l not in D; zero on D.
Eigen::VectorXd coefficient_variances(const SpectralModel& model);

/// Draws Z_{l,m} ~ N(0, a_l) independently for l not in D (in flat_index
/// order from a single mt19937_64 seeded with `seed`); coefficients on D come
/// from `low_coeffs` and default to zero. Entries of `low_coeffs` outside D
/// are rejected.
HarmonicField simulate_irf(const SpectralModel& model, const std::map<HarmonicIndex, double>& low_coeffs,
                           std::uint64_t seed);

/// Zeroes every coefficient with degree in D.
HarmonicField truncate_field(const HarmonicField& field, const DegreeSet& degrees);

/// E[Z_D(x) Z_D(y)] from the sampler's variance assignment,
/// sum_i var_i Y_i(x) Y_i(y).
double analytic_field_covariance(const SpectralModel& model, const SpherePoint& x, const SpherePoint& y);

struct PairEstimate {
  SpherePoint x, y;   // original pair
  SpherePoint gx, gy; // the same pair under a random rotation
  double distance = 0.0;
  double phi = 0.0; // intrinsic covariance at `distance`
  double estimate = 0.0;
  double std_error = 0.0;
  double estimate_rotated = 0.0;
  double std_error_rotated = 0.0;
  /// |estimate - phi| / std_error
  double z = 0.0;
  /// |estimate_rotated - phi| / std_error_rotated
  double z_rotated = 0.0;
  /// |estimate - estimate_rotated| / sqrt(se^2 + se_rot^2)
  double z_pair = 0.0;
};

struct StationarityReport {
  int n_reps = 0;
  std::vector<PairEstimate> pairs;
  double max_deviation = 0.0; // max |estimate - phi| over both orientations
  double max_z = 0.0;         // max of z, z_rotated
  double max_pair_z = 0.0;    // max of z_pair
};

/// Monte Carlo estimate of cov(Z_D(x), Z_D(y)) over replicated fields at
/// random pairs and their rotated copies. Replicate r uses an independent
/// generator seeded from (seed, r).
StationarityReport empirical_stationarity_check(const SpectralModel& model, int n_reps, int n_pairs,
                                                std::uint64_t seed);

} // namespace sphirf
