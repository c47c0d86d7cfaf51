#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "sphirf/harmonics.hpp"
#include "sphirf/spectral_model.hpp"
#include "sphirf/sphere.hpp"

namespace sphirf {

struct Atom {
  SpherePoint point;
  double weight = 0.0;
};

/// Band-limited density rho(x) = sum_{l <= lmax} c_{l,m} Y_l^m(x), integrated
/// against test functions with `quadrature`.
struct Density {
  int lmax = 0;
  Eigen::VectorXd coeffs; // flat_index order, size harmonic_count(lmax)
  SphereQuadrature quadrature;

  double evaluate(const SpherePoint& x) const { return sph_harm_all(lmax, x).dot(coeffs); }
};

/// Finite signed measure: point masses plus an optional band-limited density.
struct SphericalMeasure {
  std::vector<Atom> atoms;
  std::optional<Density> density;

  static SphericalMeasure dirac(const SpherePoint& x, double weight = 1.0) {
    SphericalMeasure mu;
    mu.atoms.push_back({x, weight});
    return mu;
  }
};

/// f(mu) = sum_i w_i f(x_i) + quadrature of rho * f.
template <class F>
double apply(const SphericalMeasure& mu, F&& f) {
  double sum = 0.0;
  for (const auto& atom : mu.atoms) {
    sum += atom.weight * f(atom.point);
  }
  if (mu.density) {
    const auto& q = mu.density->quadrature;
    for (std::size_t k = 0; k < q.size(); ++k) {
      sum += q.weights[k] * mu.density->evaluate(q.nodes[k]) * f(q.nodes[k]);
    }
  }
  return sum;
}

/// Y_l^m(mu) for every l in D, in DegreeSet::indices() order.
Eigen::VectorXd nil_moments(const SphericalMeasure& mu, const DegreeSet& degrees);

struct AllowabilityReport {
  bool allowable = false;
  double max_residual = 0.0;
};

/// Whether mu annihilates every Y_l^m with l in D, up to tol.
AllowabilityReport is_allowable(const SphericalMeasure& mu, const DegreeSet& degrees, double tol = 1e-10);

/// lambda_y = delta_y - sum_{l in D} sum_m Y_l^m(y) Y_l^m(x) dx.
/// Requires quad.exact_degree >= 2 max(D).
SphericalMeasure kriging_measure(const SpherePoint& y, const DegreeSet& degrees, const SphereQuadrature& quad);

/// The pushforward g mu, with f(g mu) = integral of f(gx) mu(dx). The density
/// becomes rho(g^-1 x), re-expanded on the density's quadrature.
SphericalMeasure rotate_measure(const Rotation& g, const SphericalMeasure& mu);

/// Double integral of phi(d(x, y)) against mu1 x mu2. Both measures must be
/// allowable for model.degrees() at `tol`; throws NumericalError(NotAllowable)
/// otherwise. Density terms use the Funk-Hecke identity
///   integral phi(d(x, y)) Y_l^m(y) dy = a_l Y_l^m(x)   (l not in D),
/// so they are exact for any band limit.
double measure_covariance(const SphericalMeasure& mu1, const SphericalMeasure& mu2, const SpectralModel& model,
                          double tol = 1e-10);

} // namespace sphirf
