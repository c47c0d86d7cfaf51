#include "sphirf/sphere.hpp"

#include <algorithm>

#include "sphirf/errors.hpp"

namespace sphirf {

namespace {

double wrap_longitude(double psi) {
  double w = std::fmod(psi, kTwoPi);
  if (w < 0.0) {
    w += kTwoPi;
  }
  // fmod of a tiny negative value can round up to exactly 2pi.
  if (w >= kTwoPi) {
    w = 0.0;
  }
  return w;
}

} // namespace

SpherePoint::SpherePoint(double psi, double zeta)
    : psi_(wrap_longitude(psi)), zeta_(std::clamp(zeta, 0.0, kPi)) {
  if (zeta_ == 0.0 || zeta_ == kPi) {
    psi_ = 0.0;
  }
  const double s = std::sin(zeta_);
  xyz_ = Eigen::Vector3d(s * std::cos(psi_), s * std::sin(psi_), std::cos(zeta_));
  if (zeta_ == 0.0) {
    xyz_ = Eigen::Vector3d::UnitZ();
  } else if (zeta_ == kPi) {
    xyz_ = -Eigen::Vector3d::UnitZ();
  }
}

SpherePoint SpherePoint::from_vector(const Eigen::Vector3d& v) {
  const double r = v.norm();
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw ValidationError("SpherePoint::from_vector: zero or non-finite vector");
  }
  const Eigen::Vector3d u = v / r;
  const double rho = std::hypot(u.x(), u.y());
  const double zeta = std::atan2(rho, u.z());
  const double psi = rho == 0.0 ? 0.0 : std::atan2(u.y(), u.x());
  SpherePoint p(psi, zeta);
  // Keep the caller's direction exactly instead of a trig round trip.
  if (p.zeta_ != 0.0 && p.zeta_ != kPi) {
    p.xyz_ = u;
  }
  return p;
}

SpherePoint SpherePoint::from_lonlat_deg(double lon_deg, double lat_deg) {
  return SpherePoint(lon_deg * kPi / 180.0, (90.0 - lat_deg) * kPi / 180.0);
}

double spherical_distance(const SpherePoint& x, const SpherePoint& y) {
  // Equivalent to acos of the clamped cosine formula
  //   cos d = cos zx cos zy + sin zx sin zy cos(px - py),
  // but accurate for nearly coincident and nearly antipodal pairs.
  const Eigen::Vector3d& u = x.vector();
  const Eigen::Vector3d& v = y.vector();
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m) {
  const double orth = (m * m.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  const double det = m.determinant();
  if (!(orth <= 1e-12) || !(std::abs(det - 1.0) <= 1e-12)) {
    throw ValidationError("Rotation::from_matrix: matrix is not a proper rotation");
  }
  return Rotation(m);
}

Rotation Rotation::about_axis(const Eigen::Vector3d& axis, double angle) {
  if (!(axis.norm() > 0.0)) {
    throw ValidationError("Rotation::about_axis: zero axis");
  }
  return Rotation(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

SpherePoint Rotation::apply(const SpherePoint& x) const {
  return SpherePoint::from_vector(matrix_ * x.vector());
}

SphereQuadrature gauss_sphere_quadrature(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) {
    throw ValidationError("gauss_sphere_quadrature: sizes must be positive");
  }
  const auto [t, w] = gauss_legendre<double>(n_theta);
  SphereQuadrature q;
  q.nodes.reserve(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi));
  q.weights.reserve(q.nodes.capacity());
  const double dphi = kTwoPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double zeta = std::acos(std::clamp(t[static_cast<std::size_t>(i)], -1.0, 1.0));
    for (int j = 0; j < n_phi; ++j) {
      q.nodes.emplace_back(j * dphi, zeta);
      q.weights.push_back(w[static_cast<std::size_t>(i)] * dphi);
    }
  }
  q.exact_degree = std::min(n_theta - 1, (n_phi - 1) / 2);
  return q;
}

SphereQuadrature quadrature_for_degree(int degree) {
  if (degree < 0) {
    throw ValidationError("quadrature_for_degree: negative degree");
  }
  return gauss_sphere_quadrature(degree + 1, 2 * degree + 1);
}

} // namespace sphirf
