#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sphirf/spectral_model.hpp"
#include "sphirf/sphere.hpp"

namespace sphirf {

struct KrigingProblem {
  std::vector<SpherePoint> sites;
  Eigen::VectorXd values;
  SpectralModel model;
  SpherePoint target;
};

struct KrigingSolution {
  Eigen::VectorXd eta; // weights on the data
  Eigen::VectorXd rho; // Lagrange multipliers, one per nil-space harmonic
  double prediction = 0.0;
  double variance = 0.0;
  /// The raw variance was in [-tol, 0) and has been set to zero.
  bool variance_clamped = false;
};

/// Bordered universal kriging system
///
///   [ Psi + sigma2 I   Q ] [eta]   [phi]
///   [ Q^T            0 ] [rho] = [ q ]
///
/// factored once by a pivoted LDL^T of the full (n + d_N) matrix and reused
/// for any number of targets. Throws NumericalError with kind TooFewSites
/// (n <= d_N), DuplicateSites (coincident sites at sigma2 = 0),
/// RankDeficientDesign (Q without full column rank) or SingularSystem.
class KrigingSystem {
public:
  KrigingSystem(std::vector<SpherePoint> sites, SpectralModel model);

  const std::vector<SpherePoint>& sites() const { return sites_; }
  const SpectralModel& model() const { return model_; }
  const Eigen::MatrixXd& design() const { return q_; }
  const Eigen::MatrixXd& covariance() const { return psi_; }

  /// Weights, multipliers and prediction variance for target x0.
  KrigingSolution solve(const SpherePoint& x0) const;
  /// As solve(x0), with prediction = eta^T values.
  KrigingSolution solve(const SpherePoint& x0, const Eigen::VectorXd& values) const;

  /// Solves the bordered system for an arbitrary right-hand side.
  Eigen::VectorXd solve_bordered(const Eigen::VectorXd& rhs) const;

private:
  std::vector<SpherePoint> sites_;
  SpectralModel model_;
  Eigen::MatrixXd psi_;      // without noise
  Eigen::MatrixXd q_;        // n x d_N
  Eigen::MatrixXd bordered_; // (n + d_N) square
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

KrigingSolution solve_universal_kriging(const KrigingProblem& problem);

struct GridPrediction {
  double prediction = 0.0;
  double variance = 0.0;
};

/// Predictions and variances at every grid point from one factorization.
std::vector<GridPrediction> predict_grid(std::span<const SpherePoint> sites, const Eigen::VectorXd& values,
                                         const SpectralModel& model, std::span<const SpherePoint> grid);

} // namespace sphirf
