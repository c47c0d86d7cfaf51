#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sphirf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

/// A location on the unit sphere.
///
/// `psi` is longitude in [0, 2pi) and `zeta` is colatitude in [0, pi], zero at
/// the north pole. The Cartesian unit vector is cached because every distance
/// and rotation goes through it. At the poles longitude is canonicalized to 0.
class SpherePoint {
public:
  SpherePoint() : SpherePoint(0.0, 0.0) {}
  SpherePoint(double psi, double zeta);

  static SpherePoint from_vector(const Eigen::Vector3d& v);
  /// Geographic degrees (longitude, latitude) to internal radians.
  static SpherePoint from_lonlat_deg(double lon_deg, double lat_deg);

  double psi() const { return psi_; }
  double zeta() const { return zeta_; }
  const Eigen::Vector3d& vector() const { return xyz_; }

  double lon_deg() const { return psi_ * 180.0 / kPi; }
  double lat_deg() const { return 90.0 - zeta_ * 180.0 / kPi; }

  friend bool operator==(const SpherePoint& a, const SpherePoint& b) {
    return a.psi_ == b.psi_ && a.zeta_ == b.zeta_;
  }

private:
  double psi_;
  double zeta_;
  Eigen::Vector3d xyz_;
};

/// Great-circle angle between two points, in [0, pi].
double spherical_distance(const SpherePoint& x, const SpherePoint& y);

/// Proper rotation of the sphere (orthogonal, determinant +1).
class Rotation {
public:
  Rotation() : matrix_(Eigen::Matrix3d::Identity()) {}

  /// Throws ValidationError unless `m` is orthogonal with determinant 1 (to 1e-12).
  static Rotation from_matrix(const Eigen::Matrix3d& m);
  static Rotation about_axis(const Eigen::Vector3d& axis, double angle);
  /// Haar-uniform random rotation.
  template <class Rng>
  static Rotation random(Rng& rng);

  const Eigen::Matrix3d& matrix() const { return matrix_; }
  Rotation inverse() const { return Rotation(matrix_.transpose()); }
  SpherePoint apply(const SpherePoint& x) const;

  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return Rotation(a.matrix_ * b.matrix_);
  }

private:
  explicit Rotation(const Eigen::Matrix3d& m) : matrix_(m) {}
  Eigen::Matrix3d matrix_;
};

inline SpherePoint rotate(const Rotation& g, const SpherePoint& x) { return g.apply(x); }

template <class Rng>
Rotation Rotation::random(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  return Rotation(q.toRotationMatrix());
}

/// Uniformly distributed point on the sphere.
template <class Rng>
SpherePoint random_point(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  } while (v.norm() < 1e-8);
  return SpherePoint::from_vector(v);
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
///
/// Newton iteration on P_n from the Tricomi initial guess; exact for
/// polynomials of degree 2n-1.
template <class Scalar = double>
std::pair<std::vector<Scalar>, std::vector<Scalar>> gauss_legendre(int n) {
  std::vector<Scalar> nodes(static_cast<std::size_t>(n));
  std::vector<Scalar> weights(static_cast<std::size_t>(n));
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      Scalar dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 4 * std::numeric_limits<Scalar>::epsilon()) {
        break;
      }
    }
    // Recompute the derivative at the converged node.
    Scalar p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) {
    nodes[static_cast<std::size_t>(n / 2)] = 0;
  }
  return {std::move(nodes), std::move(weights)};
}

/// Quadrature rule on the sphere with weights summing to 4pi.
///
/// `exact_degree` is the largest L for which every product Y_l^m Y_l'^m' with
/// l, l' <= L is integrated exactly.
struct SphereQuadrature {
  std::vector<SpherePoint> nodes;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre in cos(zeta) times the uniform rule in longitude.
/// Exact degree is min(n_theta - 1, (n_phi - 1) / 2).
SphereQuadrature gauss_sphere_quadrature(int n_theta, int n_phi);

/// Smallest tensor rule whose exact degree is at least `degree`.
SphereQuadrature quadrature_for_degree(int degree);

} // namespace sphirf
