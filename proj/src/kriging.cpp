#include "sphirf/kriging.hpp"

#include <limits>
#include <sstream>

#include "sphirf/errors.hpp"
#include "sphirf/harmonics.hpp"

namespace sphirf {

namespace {

constexpr double kUnbiasednessTol = 1e-9;
constexpr double kVarianceSlack = 1e-10;

void check_sites(const std::vector<SpherePoint>& sites, const SpectralModel& model) {
  const int d_n = model.degrees().nil_dimension();
  if (static_cast<int>(sites.size()) <= d_n || sites.empty()) {
    std::ostringstream os;
    os << "universal kriging needs more than " << d_n << " sites, got " << sites.size();
    throw NumericalError(NumericalError::Kind::TooFewSites, os.str());
  }
  if (model.sigma2() == 0.0) {
    for (std::size_t i = 0; i < sites.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (spherical_distance(sites[i], sites[j]) == 0.0) {
          std::ostringstream os;
          os << "sites " << j << " and " << i << " coincide and sigma2 = 0";
          throw NumericalError(NumericalError::Kind::DuplicateSites, os.str());
        }
      }
    }
  }
}

} // namespace

KrigingSystem::KrigingSystem(std::vector<SpherePoint> sites, SpectralModel model)
    : sites_(std::move(sites)), model_(std::move(model)) {
  check_sites(sites_, model_);
  const auto n = static_cast<Eigen::Index>(sites_.size());
  const Eigen::Index d_n = model_.degrees().nil_dimension();

  q_ = harmonic_design_matrix(sites_, model_.degrees());
  if (d_n > 0 && numerical_rank(q_) < d_n) {
    throw NumericalError(NumericalError::Kind::RankDeficientDesign,
                         "harmonic design matrix lacks full column rank; sites are not unisolvent");
  }
  psi_ = cov_matrix(model_, sites_, false);

  bordered_ = Eigen::MatrixXd::Zero(n + d_n, n + d_n);
  bordered_.topLeftCorner(n, n) = psi_;
  bordered_.topLeftCorner(n, n).diagonal().array() += model_.sigma2();
  bordered_.topRightCorner(n, d_n) = q_;
  bordered_.bottomLeftCorner(d_n, n) = q_.transpose();

  ldlt_.compute(bordered_);
  const Eigen::VectorXd d = ldlt_.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  const double floor = dmax * static_cast<double>(n + d_n) * std::numeric_limits<double>::epsilon();
  if (ldlt_.info() != Eigen::Success || !(dmax > 0.0) || d.cwiseAbs().minCoeff() <= floor) {
    throw NumericalError(NumericalError::Kind::SingularSystem, "bordered kriging matrix is numerically singular");
  }
}

Eigen::VectorXd KrigingSystem::solve_bordered(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = ldlt_.solve(rhs);
  // One step of iterative refinement.
  const Eigen::VectorXd r = rhs - bordered_ * x;
  x += ldlt_.solve(r);
  if (!x.allFinite()) {
    throw NumericalError(NumericalError::Kind::SingularSystem, "bordered kriging solve produced non-finite values");
  }
  return x;
}

KrigingSolution KrigingSystem::solve(const SpherePoint& x0) const {
  const auto n = static_cast<Eigen::Index>(sites_.size());
  const Eigen::Index d_n = q_.cols();
  const Eigen::VectorXd phi = cov_vector(model_, sites_, x0);
  const Eigen::VectorXd q0 = nil_basis(x0, model_.degrees());

  Eigen::VectorXd rhs(n + d_n);
  rhs << phi, q0;
  const Eigen::VectorXd x = solve_bordered(rhs);

  KrigingSolution sol;
  sol.eta = x.head(n);
  sol.rho = x.tail(d_n);

  if (d_n > 0) {
    const double unbiased = (q_.transpose() * sol.eta - q0).cwiseAbs().maxCoeff();
    if (!(unbiased <= kUnbiasednessTol)) {
      std::ostringstream os;
      os << "unbiasedness residual " << unbiased << " exceeds " << kUnbiasednessTol;
      throw NumericalError(NumericalError::Kind::SingularSystem, os.str());
    }
  }

  const double var = model_.sigma2() * sol.eta.squaredNorm() + sol.eta.dot(psi_ * sol.eta) - 2.0 * sol.eta.dot(phi) +
                     model_.phi0();
  const double slack = kVarianceSlack * std::max(1.0, model_.phi0() + model_.sigma2());
  if (var < 0.0) {
    if (var < -slack) {
      std::ostringstream os;
      os << "negative prediction variance " << var;
      throw NumericalError(NumericalError::Kind::SingularSystem, os.str());
    }
    sol.variance = 0.0;
    sol.variance_clamped = true;
  } else {
    sol.variance = var;
  }
  return sol;
}

KrigingSolution KrigingSystem::solve(const SpherePoint& x0, const Eigen::VectorXd& values) const {
  if (values.size() != static_cast<Eigen::Index>(sites_.size())) {
    throw ValidationError("kriging: values and sites differ in length");
  }
  KrigingSolution sol = solve(x0);
  sol.prediction = sol.eta.dot(values);
  return sol;
}

KrigingSolution solve_universal_kriging(const KrigingProblem& problem) {
  const KrigingSystem system(problem.sites, problem.model);
  return system.solve(problem.target, problem.values);
}

std::vector<GridPrediction> predict_grid(std::span<const SpherePoint> sites, const Eigen::VectorXd& values,
                                         const SpectralModel& model, std::span<const SpherePoint> grid) {
  const KrigingSystem system(std::vector<SpherePoint>(sites.begin(), sites.end()), model);
  std::vector<GridPrediction> out;
  out.reserve(grid.size());
  for (const auto& x0 : grid) {
    const KrigingSolution sol = system.solve(x0, values);
    out.push_back({sol.prediction, sol.variance});
  }
  return out;
}

} // namespace sphirf
