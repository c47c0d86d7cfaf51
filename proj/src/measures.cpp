#include "sphirf/measures.hpp"

#include <algorithm>
#include <sstream>

#include "sphirf/errors.hpp"

namespace sphirf {

Eigen::VectorXd nil_moments(const SphericalMeasure& mu, const DegreeSet& degrees) {
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(degrees.nil_dimension());
  if (degrees.empty()) {
    return moments;
  }
  for (const auto& atom : mu.atoms) {
    moments += atom.weight * nil_basis(atom.point, degrees);
  }
  if (mu.density) {
    const auto& q = mu.density->quadrature;
    for (std::size_t k = 0; k < q.size(); ++k) {
      moments += (q.weights[k] * mu.density->evaluate(q.nodes[k])) * nil_basis(q.nodes[k], degrees);
    }
  }
  return moments;
}

AllowabilityReport is_allowable(const SphericalMeasure& mu, const DegreeSet& degrees, double tol) {
  if (!(tol > 0.0)) {
    throw ValidationError("is_allowable: tolerance must be positive");
  }
  const Eigen::VectorXd moments = nil_moments(mu, degrees);
  AllowabilityReport report;
  report.max_residual = moments.size() ? moments.cwiseAbs().maxCoeff() : 0.0;
  report.allowable = report.max_residual <= tol;
  return report;
}

SphericalMeasure kriging_measure(const SpherePoint& y, const DegreeSet& degrees, const SphereQuadrature& quad) {
  SphericalMeasure mu = SphericalMeasure::dirac(y);
  if (degrees.empty()) {
    return mu;
  }
  const int lmax = degrees.max_degree();
  if (quad.exact_degree < 2 * lmax) {
    std::ostringstream os;
    os << "kriging_measure: quadrature exact degree " << quad.exact_degree << " below required " << 2 * lmax;
    throw NumericalError(NumericalError::Kind::QuadratureTooCoarse, os.str());
  }
  Density density;
  density.lmax = lmax;
  density.coeffs = Eigen::VectorXd::Zero(harmonic_count(lmax));
  const Eigen::VectorXd y_all = sph_harm_all(lmax, y);
  for (int l : degrees.degrees()) {
    for (int m = -l; m <= l; ++m) {
      density.coeffs(flat_index(l, m)) = -y_all(flat_index(l, m));
    }
  }
  density.quadrature = quad;
  mu.density = std::move(density);
  return mu;
}

SphericalMeasure rotate_measure(const Rotation& g, const SphericalMeasure& mu) {
  SphericalMeasure out;
  out.atoms.reserve(mu.atoms.size());
  for (const auto& atom : mu.atoms) {
    out.atoms.push_back({g.apply(atom.point), atom.weight});
  }
  if (mu.density) {
    const Density& src = *mu.density;
    const auto& q = src.quadrature;
    if (q.exact_degree < src.lmax) {
      throw NumericalError(NumericalError::Kind::QuadratureTooCoarse,
                           "rotate_measure: density quadrature cannot re-expand its band limit");
    }
    const Rotation inv = g.inverse();
    Density rotated;
    rotated.lmax = src.lmax;
    rotated.quadrature = q;
    rotated.coeffs = Eigen::VectorXd::Zero(src.coeffs.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double value = src.evaluate(inv.apply(q.nodes[k]));
      rotated.coeffs += (q.weights[k] * value) * sph_harm_all(src.lmax, q.nodes[k]);
    }
    out.density = std::move(rotated);
  }
  return out;
}

namespace {

// integral phi(d(x, y)) rho(y) dy = sum_{l not in D} a_l sum_m rho_{l,m} Y_l^m(x)
double kernel_against_density(const SpherePoint& x, const Density& rho, const SpectralModel& model) {
  const int lmax = std::min(rho.lmax, model.lmax());
  if (lmax < 0) {
    return 0.0;
  }
  const Eigen::VectorXd y = sph_harm_all(lmax, x);
  double sum = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    if (model.degrees().contains(l)) {
      continue;
    }
    const double al = model.coefficient(l);
    for (int m = -l; m <= l; ++m) {
      sum += al * rho.coeffs(flat_index(l, m)) * y(flat_index(l, m));
    }
  }
  return sum;
}

void require_allowable(const SphericalMeasure& mu, const DegreeSet& degrees, double tol, const char* which) {
  const auto report = is_allowable(mu, degrees, tol);
  if (!report.allowable) {
    std::ostringstream os;
    os << "measure_covariance: " << which << " is not allowable (max residual " << report.max_residual << ")";
    throw NumericalError(NumericalError::Kind::NotAllowable, os.str());
  }
}

} // namespace

double measure_covariance(const SphericalMeasure& mu1, const SphericalMeasure& mu2, const SpectralModel& model,
                          double tol) {
  require_allowable(mu1, model.degrees(), tol, "first measure");
  require_allowable(mu2, model.degrees(), tol, "second measure");

  double sum = 0.0;
  for (const auto& a : mu1.atoms) {
    for (const auto& b : mu2.atoms) {
      sum += a.weight * b.weight * intrinsic_cov(model, spherical_distance(a.point, b.point));
    }
  }
  if (mu2.density) {
    for (const auto& a : mu1.atoms) {
      sum += a.weight * kernel_against_density(a.point, *mu2.density, model);
    }
  }
  if (mu1.density) {
    for (const auto& b : mu2.atoms) {
      sum += b.weight * kernel_against_density(b.point, *mu1.density, model);
    }
  }
  if (mu1.density && mu2.density) {
    const int lmax = std::min({mu1.density->lmax, mu2.density->lmax, model.lmax()});
    for (int l = 0; l <= lmax; ++l) {
      if (model.degrees().contains(l)) {
        continue;
      }
      for (int m = -l; m <= l; ++m) {
        sum += model.coefficient(l) * mu1.density->coeffs(flat_index(l, m)) * mu2.density->coeffs(flat_index(l, m));
      }
    }
  }
  return sum;
}

} // namespace sphirf
