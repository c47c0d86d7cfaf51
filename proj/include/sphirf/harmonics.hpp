#pragma once

#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sphirf/errors.hpp"
#include "sphirf/sphere.hpp"

namespace sphirf {

/// Degree/order pair (l, m) of a real spherical harmonic, |m| <= l.
struct HarmonicIndex {
  int l = 0;
  int m = 0;

  HarmonicIndex() = default;
  HarmonicIndex(int degree, int order);

  friend auto operator<=>(const HarmonicIndex&, const HarmonicIndex&) = default;
};

/// Position of (l, m) in the canonical ordering l ascending, m from -l to l.
inline constexpr int flat_index(int l, int m) { return l * l + l + m; }
inline constexpr int harmonic_count(int lmax) { return (lmax + 1) * (lmax + 1); }

/// Finite set of annihilated degrees D. The nil space is span{Y_l^m : l in D}.
class DegreeSet {
public:
  DegreeSet() = default;
  DegreeSet(std::initializer_list<int> degrees);
  explicit DegreeSet(std::vector<int> degrees);

  /// {0, 1, ..., kappa - 1}, the classic IRF of order kappa.
  static DegreeSet below(int kappa);

  bool contains(int l) const;
  bool empty() const { return degrees_.empty(); }
  /// -1 when empty.
  int max_degree() const { return degrees_.empty() ? -1 : degrees_.back(); }
  /// Sum over l in D of (2l + 1).
  int nil_dimension() const;
  const std::vector<int>& degrees() const { return degrees_; }
  /// Nil-space harmonics in column order (l ascending, m ascending).
  std::vector<HarmonicIndex> indices() const;
  std::string to_string() const;

  friend bool operator==(const DegreeSet&, const DegreeSet&) = default;

private:
  std::vector<int> degrees_;
};

/// Legendre polynomial P_l(t) by the three-term recurrence.
template <class Scalar>
Scalar legendre_p(int l, Scalar t) {
  if (l < 0) {
    throw ValidationError("legendre_p: negative degree");
  }
  if (!(std::abs(t) <= Scalar(1) + Scalar(1e-12))) {
    throw ValidationError("legendre_p: argument outside [-1, 1]");
  }
  if (l == 0) {
    return Scalar(1);
  }
  Scalar p0 = 1, p1 = t;
  for (int k = 2; k <= l; ++k) {
    Scalar p2 = (Scalar(2 * k - 1) * t * p1 - Scalar(k - 1) * p0) / Scalar(k);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// Associated Legendre function P_l^m(t) without the Condon-Shortley phase,
/// (1 - t^2)^{m/2} d^m/dt^m P_l(t). Upward recurrence in l at fixed m.
template <class Scalar>
Scalar assoc_legendre(int l, int m, Scalar t) {
  if (m < 0 || m > l) {
    throw ValidationError("assoc_legendre: require 0 <= m <= l");
  }
  if (!(std::abs(t) <= Scalar(1) + Scalar(1e-12))) {
    throw ValidationError("assoc_legendre: argument outside [-1, 1]");
  }
  const Scalar s = std::sqrt(std::max(Scalar(0), (Scalar(1) - t) * (Scalar(1) + t)));
  Scalar pmm = 1;
  for (int k = 1; k <= m; ++k) {
    pmm *= Scalar(2 * k - 1) * s;
  }
  if (l == m) {
    return pmm;
  }
  Scalar p0 = pmm;
  Scalar p1 = Scalar(2 * m + 1) * t * pmm;
  for (int k = m + 2; k <= l; ++k) {
    Scalar p2 = (Scalar(2 * k - 1) * t * p1 - Scalar(k + m - 1) * p0) / Scalar(k - m);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// Real orthonormal spherical harmonic Y_l^m(x): cosine branch for m > 0,
/// sine branch for m < 0, sqrt((2l+1)/4pi) P_l for m = 0.
double real_sph_harm(const HarmonicIndex& idx, const SpherePoint& x);

/// All Y_l^m(x) for l <= lmax in flat_index order.
Eigen::VectorXd sph_harm_all(int lmax, const SpherePoint& x);

/// Nil-space basis q(x) = (q_1(x), ..., q_dN(x)) in DegreeSet::indices() order.
Eigen::VectorXd nil_basis(const SpherePoint& x, const DegreeSet& degrees);

/// n x d_N matrix Q with Q(i, nu) = q_nu(x_i).
Eigen::MatrixXd harmonic_design_matrix(std::span<const SpherePoint> points, const DegreeSet& degrees);

/// Rank from a column-pivoted QR with threshold rel_tol * |R_00|.
int numerical_rank(const Eigen::MatrixXd& a, double rel_tol = 1e-10);

} // namespace sphirf
