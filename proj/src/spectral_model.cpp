#include "sphirf/spectral_model.hpp"

#include <algorithm>
#include <sstream>

#include "sphirf/errors.hpp"

namespace sphirf {

SpectralModel::SpectralModel(DegreeSet degrees, std::vector<double> coefficients, double sigma2,
                             CoefficientFamily family, std::optional<double> tail_bound)
    : degrees_(std::move(degrees)), coeffs_(std::move(coefficients)), sigma2_(sigma2),
      family_(family), tail_bound_(tail_bound) {
  if (coeffs_.empty()) {
    throw ValidationError("SpectralModel: coefficient list is empty (lmax < 0)");
  }
  phi0_ = intrinsic_cov(*this, 0.0);
}

double SpectralModel::coefficient(int l) const {
  if (l < 0 || l > lmax()) {
    return 0.0;
  }
  return coeffs_[static_cast<std::size_t>(l)];
}

SpectralModel SpectralModel::with_sigma2(double sigma2) const {
  SpectralModel m = *this;
  m.sigma2_ = sigma2;
  return m;
}

double power_law_tail_bound(double c, double s, int lmax) {
  return c * 2.0 * std::pow(lmax + 1.0, 2.0 - s) / (s - 2.0);
}

SpectralModel power_law_model(const DegreeSet& degrees, double c, double s, double sigma2, int lmax) {
  if (!(s > 2.0)) {
    throw ValidationError("power_law_model: decay exponent s must exceed 2");
  }
  if (!(c > 0.0)) {
    throw ValidationError("power_law_model: scale c must be positive");
  }
  if (!(sigma2 >= 0.0)) {
    throw ValidationError("power_law_model: sigma2 must be nonnegative");
  }
  if (lmax < 0) {
    throw ValidationError("power_law_model: lmax must be nonnegative");
  }
  std::vector<double> a(static_cast<std::size_t>(lmax + 1), 0.0);
  for (int l = 0; l <= lmax; ++l) {
    if (!degrees.contains(l)) {
      a[static_cast<std::size_t>(l)] = c * std::pow(l + 1.0, -s);
    }
  }
  CoefficientFamily family{CoefficientFamily::Kind::PowerLaw, c, s};
  return SpectralModel(degrees, std::move(a), sigma2, family, power_law_tail_bound(c, s, lmax));
}

double intrinsic_cov(const SpectralModel& model, double d) {
  const double t = std::cos(d);
  const auto& a = model.coefficients();
  const auto& degrees = model.degrees();
  double p0 = 1.0, p1 = t;
  double sum = 0.0;
  for (int l = 0; l < static_cast<int>(a.size()); ++l) {
    double pl;
    if (l == 0) {
      pl = 1.0;
    } else if (l == 1) {
      pl = t;
    } else {
      pl = ((2.0 * l - 1.0) * t * p1 - (l - 1.0) * p0) / l;
      p0 = p1;
      p1 = pl;
    }
    if (!degrees.contains(l)) {
      sum += (2.0 * l + 1.0) * a[static_cast<std::size_t>(l)] * pl;
    }
  }
  return sum / kFourPi;
}

Eigen::MatrixXd cov_matrix(const SpectralModel& model, std::span<const SpherePoint> points, bool add_noise) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd psi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    psi(i, i) = model.phi0();
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = intrinsic_cov(model, spherical_distance(points[static_cast<std::size_t>(i)],
                                                               points[static_cast<std::size_t>(j)]));
      psi(i, j) = v;
      psi(j, i) = v;
    }
  }
  if (add_noise) {
    psi.diagonal().array() += model.sigma2();
  }
  return psi;
}

Eigen::VectorXd cov_vector(const SpectralModel& model, std::span<const SpherePoint> points, const SpherePoint& x0) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = intrinsic_cov(model, spherical_distance(points[i], x0));
  }
  return v;
}

ModelReport validate_model(const SpectralModel& model) {
  ModelReport report;
  auto fail = [&report](std::string reason) {
    report.valid = false;
    report.reasons.push_back(std::move(reason));
  };
  const auto& a = model.coefficients();
  for (int l = 0; l < static_cast<int>(a.size()); ++l) {
    const double al = a[static_cast<std::size_t>(l)];
    std::ostringstream os;
    if (!std::isfinite(al)) {
      os << "non-finite coefficient at l=" << l;
      fail(os.str());
    } else if (al < 0.0) {
      os << "negative coefficient at l=" << l;
      fail(os.str());
    } else if (al != 0.0 && model.degrees().contains(l)) {
      os << "nonzero coefficient at annihilated degree l=" << l;
      fail(os.str());
    }
  }
  if (!(model.sigma2() >= 0.0) || !std::isfinite(model.sigma2())) {
    fail("noise variance sigma2 must be finite and nonnegative");
  }
  if (!model.tail_bound().has_value()) {
    fail("no tail bound available for the truncated series");
  } else if (!std::isfinite(*model.tail_bound()) || *model.tail_bound() < 0.0) {
    fail("tail bound is not a finite nonnegative number");
  }
  if (model.family().kind == CoefficientFamily::Kind::PowerLaw && !(model.family().exponent > 2.0)) {
    fail("power-law exponent must exceed 2 for summability");
  }
  return report;
}

} // namespace sphirf
