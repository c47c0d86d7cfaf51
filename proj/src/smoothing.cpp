#include "sphirf/smoothing.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "sphirf/errors.hpp"
#include "sphirf/kriging.hpp"

namespace sphirf {

namespace {

constexpr double kMaxCardinalCondition = 1e10;

double condition_number(const Eigen::MatrixXd& a) {
  if (a.size() == 0) {
    return 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

std::vector<SpherePoint> fibonacci_points(int count) {
  std::vector<SpherePoint> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    pts.emplace_back(i * golden, std::acos(z));
  }
  return pts;
}

} // namespace

Eigen::VectorXd CardinalBasis::evaluate(const SpherePoint& x) const {
  return coeff.transpose() * nil_basis(x, degrees);
}

CardinalBasis cardinal_basis(std::span<const SpherePoint> taus, const DegreeSet& degrees) {
  const int d_n = degrees.nil_dimension();
  if (static_cast<int>(taus.size()) != d_n) {
    std::ostringstream os;
    os << "cardinal_basis: need exactly " << d_n << " points, got " << taus.size();
    throw ValidationError(os.str());
  }
  CardinalBasis basis;
  basis.degrees = degrees;
  basis.taus.assign(taus.begin(), taus.end());
  const Eigen::MatrixXd qtau = harmonic_design_matrix(taus, degrees);
  basis.condition = condition_number(qtau);
  if (!(basis.condition <= kMaxCardinalCondition)) {
    std::ostringstream os;
    os << "cardinal points are not unisolvent (condition number " << basis.condition << ")";
    throw NumericalError(NumericalError::Kind::NonUnisolvent, os.str());
  }
  basis.coeff = qtau.fullPivLu().inverse();
  return basis;
}

std::vector<SpherePoint> default_cardinal_points(const DegreeSet& degrees) {
  const int d_n = degrees.nil_dimension();
  if (d_n == 0) {
    return {};
  }
  if (d_n == 1) {
    return {SpherePoint(0.0, 0.0)};
  }
  if (d_n == 4) {
    return {SpherePoint(0.0, 0.0), SpherePoint(0.0, kPi / 2), SpherePoint(kTwoPi / 3, kPi / 2),
            SpherePoint(2 * kTwoPi / 3, kPi / 2)};
  }
  // Unisolvency is invariant under rotation, so a bad lattice cannot be fixed
  // by tilting it. Instead pick d_N rows of a larger lattice by column-pivoted QR.
  const std::vector<SpherePoint> candidates = fibonacci_points(std::max(8 * d_n, 64));
  const Eigen::MatrixXd q = harmonic_design_matrix(candidates, degrees);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(q.transpose());
  std::vector<SpherePoint> pts;
  pts.reserve(static_cast<std::size_t>(d_n));
  for (int k = 0; k < d_n; ++k) {
    pts.push_back(candidates[static_cast<std::size_t>(qr.colsPermutation().indices()(k))]);
  }
  return pts;
}

double reproducing_kernel(const SpherePoint& x, const SpherePoint& y, const CardinalBasis& basis,
                          const SpectralModel& model) {
  const auto d_n = static_cast<Eigen::Index>(basis.taus.size());
  const Eigen::VectorXd px = basis.evaluate(x);
  const Eigen::VectorXd py = basis.evaluate(y);
  const Eigen::VectorXd phi_x = cov_vector(model, basis.taus, x);
  const Eigen::VectorXd phi_y = cov_vector(model, basis.taus, y);
  const Eigen::MatrixXd phi_tt = cov_matrix(model, basis.taus, false);

  double h = intrinsic_cov(model, spherical_distance(x, y));
  if (d_n > 0) {
    h -= phi_x.dot(py) + phi_y.dot(px);
    h += px.dot(phi_tt * py);
    h += px.dot(py);
  }
  return h;
}

double RepresentableFunction::evaluate(const SpherePoint& x, const SpectralModel& model) const {
  double v = 0.0;
  if (b.size() > 0) {
    v += nil_basis(x, model.degrees()).dot(b);
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    v += c(static_cast<Eigen::Index>(i)) * intrinsic_cov(model, spherical_distance(centers[i], x));
  }
  return v;
}

double native_inner_product(const RepresentableFunction& f, const RepresentableFunction& g,
                            const CardinalBasis& basis, const SpectralModel& model) {
  double s = 0.0;
  for (const auto& tau : basis.taus) {
    s += f.evaluate(tau, model) * g.evaluate(tau, model);
  }
  for (std::size_t i = 0; i < f.centers.size(); ++i) {
    for (std::size_t j = 0; j < g.centers.size(); ++j) {
      s += f.c(static_cast<Eigen::Index>(i)) * g.c(static_cast<Eigen::Index>(j)) *
           intrinsic_cov(model, spherical_distance(f.centers[i], g.centers[j]));
    }
  }
  return s;
}

RepresentableFunction kernel_section(const SpherePoint& x, const CardinalBasis& basis, const SpectralModel& model) {
  const auto d_n = static_cast<Eigen::Index>(basis.taus.size());
  const Eigen::VectorXd px = basis.evaluate(x);
  const Eigen::VectorXd phi_x = cov_vector(model, basis.taus, x);
  const Eigen::MatrixXd phi_tt = cov_matrix(model, basis.taus, false);

  RepresentableFunction h;
  h.centers.reserve(static_cast<std::size_t>(d_n + 1));
  h.centers.push_back(x);
  h.centers.insert(h.centers.end(), basis.taus.begin(), basis.taus.end());
  h.c.resize(d_n + 1);
  h.c(0) = 1.0;
  h.c.tail(d_n) = -px;
  // Coefficients on p_mu, then converted to the q basis.
  const Eigen::VectorXd beta = -phi_x + phi_tt * px + px;
  h.b = basis.coeff * beta;
  return h;
}

SmoothingFit fit_smoothing_spline(std::span<const SpherePoint> sites, const Eigen::VectorXd& values,
                                  const SpectralModel& model, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("fit_smoothing_spline: alpha must be positive and finite");
  }
  const auto n = static_cast<Eigen::Index>(sites.size());
  if (values.size() != n) {
    throw ValidationError("fit_smoothing_spline: values and sites differ in length");
  }
  const int d_n = model.degrees().nil_dimension();
  if (n <= d_n || n == 0) {
    std::ostringstream os;
    os << "smoothing spline needs more than " << d_n << " sites, got " << n;
    throw NumericalError(NumericalError::Kind::TooFewSites, os.str());
  }
  const Eigen::MatrixXd q = harmonic_design_matrix(sites, model.degrees());
  if (d_n > 0 && numerical_rank(q) < d_n) {
    throw NumericalError(NumericalError::Kind::RankDeficientDesign,
                         "harmonic design matrix lacks full column rank; sites are not unisolvent");
  }
  Eigen::MatrixXd m = cov_matrix(model, sites, false);
  m.diagonal().array() += alpha;

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  const Eigen::MatrixXd f = qr.householderQ();
  const Eigen::MatrixXd f1 = f.leftCols(d_n);
  const Eigen::MatrixXd f2 = f.rightCols(n - d_n);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(d_n, d_n).triangularView<Eigen::Upper>();

  const Eigen::MatrixXd reduced = f2.transpose() * m * f2;
  Eigen::LLT<Eigen::MatrixXd> llt(reduced);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(NumericalError::Kind::SingularSystem,
                         "projected smoothing matrix is not positive definite");
  }
  SmoothingFit fit{Eigen::VectorXd(d_n), f2 * llt.solve(f2.transpose() * values),
                   std::vector<SpherePoint>(sites.begin(), sites.end()), model, alpha};
  if (d_n > 0) {
    fit.b = r.triangularView<Eigen::Upper>().solve(f1.transpose() * (values - m * fit.c));
  }
  if (!fit.b.allFinite() || !fit.c.allFinite()) {
    throw NumericalError(NumericalError::Kind::SingularSystem, "smoothing solve produced non-finite values");
  }
  return fit;
}

double evaluate_fit(const SmoothingFit& fit, const SpherePoint& x) {
  return fit.as_function().evaluate(x, fit.model);
}

double semi_norm_sq(const SmoothingFit& fit) {
  if (fit.c.size() == 0) {
    return 0.0;
  }
  const Eigen::MatrixXd psi = cov_matrix(fit.model, fit.sites, false);
  return std::max(0.0, fit.c.dot(psi * fit.c));
}

DualResult dual_kriging_equivalence(std::span<const SpherePoint> sites, const Eigen::VectorXd& values,
                                    const SpectralModel& model, double alpha, const SpherePoint& x0) {
  const SmoothingFit fit = fit_smoothing_spline(sites, values, model, alpha);
  const KrigingSystem system(std::vector<SpherePoint>(sites.begin(), sites.end()), model.with_sigma2(alpha));
  DualResult out;
  out.smoothing = evaluate_fit(fit, x0);
  out.kriging = system.solve(x0, values).prediction;
  out.gap = std::abs(out.smoothing - out.kriging);
  return out;
}

} // namespace sphirf
