#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/QR>

#include "sphirf/harmonics.hpp"
#include "sphirf/spectral_model.hpp"
#include "sphirf/sphere.hpp"

namespace sphirf::test {

inline std::vector<SpherePoint> random_points(std::mt19937_64& rng, int n) {
  std::vector<SpherePoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pts.push_back(random_point(rng));
  }
  return pts;
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = normal(rng);
  }
  return v;
}

inline DegreeSet random_degree_set(std::mt19937_64& rng) {
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
  case 0: return DegreeSet{0};
  case 1: return DegreeSet{0, 1};
  default: return DegreeSet{0, 1, 2};
  }
}

/// P_l^m(t) without the Condon-Shortley sign via Rodrigues' formula:
/// (1-t^2)^{m/2} / (2^l l!) * d^{l+m}/dt^{l+m} (t^2 - 1)^l, in long double.
inline long double rodrigues_assoc_legendre(int l, int m, long double t) {
  std::vector<long double> poly(static_cast<std::size_t>(2 * l + 1), 0.0L);
  // (t^2 - 1)^l = sum_k C(l,k) (-1)^{l-k} t^{2k}
  long double binom = 1.0L;
  for (int k = 0; k <= l; ++k) {
    poly[static_cast<std::size_t>(2 * k)] = binom * ((l - k) % 2 ? -1.0L : 1.0L);
    binom = binom * (l - k) / (k + 1);
  }
  for (int r = 0; r < l + m; ++r) {
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
      poly[i] = poly[i + 1] * static_cast<long double>(i + 1);
    }
    poly.back() = 0.0L;
  }
  long double value = 0.0L;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
    value = value * t + *it;
  }
  long double scale = 1.0L;
  for (int k = 1; k <= l; ++k) {
    scale *= 2.0L * k;
  }
  return std::pow(1.0L - t * t, m / 2.0L) * value / scale;
}

/// Kriging weights by the null-space method: eta = eta_p + N z with
/// Q^T eta_p = q, Q^T N = 0, and z minimizing the prediction error
/// eta^T (Psi + sigma2 I) eta - 2 eta^T phi. Shares no code with the bordered solve.
inline Eigen::VectorXd kkt_oracle_weights(const std::vector<SpherePoint>& sites, const SpectralModel& model,
                                          const SpherePoint& x0) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd k(n, n);
  Eigen::VectorXd phi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double sum = 0;
      const double t = sites[static_cast<std::size_t>(i)].vector().dot(sites[static_cast<std::size_t>(j)].vector());
      for (int l = 0; l <= model.lmax(); ++l) {
        if (!model.degrees().contains(l)) {
          sum += (2 * l + 1) * model.coefficient(l) * std::legendre(static_cast<unsigned>(l), std::clamp(t, -1.0, 1.0));
        }
      }
      k(i, j) = sum / kFourPi + (i == j ? model.sigma2() : 0.0);
    }
    double sum = 0;
    const double t = sites[static_cast<std::size_t>(i)].vector().dot(x0.vector());
    for (int l = 0; l <= model.lmax(); ++l) {
      if (!model.degrees().contains(l)) {
        sum += (2 * l + 1) * model.coefficient(l) * std::legendre(static_cast<unsigned>(l), std::clamp(t, -1.0, 1.0));
      }
    }
    phi(i) = sum / kFourPi;
  }
  const auto idx = model.degrees().indices();
  const auto dn = static_cast<Eigen::Index>(idx.size());
  if (dn == 0) {
    return k.fullPivLu().solve(phi);
  }
  Eigen::MatrixXd q(n, dn);
  Eigen::VectorXd q0(dn);
  for (Eigen::Index j = 0; j < dn; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      q(i, j) = real_sph_harm(idx[static_cast<std::size_t>(j)], sites[static_cast<std::size_t>(i)]);
    }
    q0(j) = real_sph_harm(idx[static_cast<std::size_t>(j)], x0);
  }
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(q);
  const Eigen::MatrixXd full = qr.matrixQ();
  const Eigen::MatrixXd range = full.leftCols(dn);
  const Eigen::MatrixXd null = full.rightCols(n - dn);
  // Minimum-norm particular solution lies in range(Q): eta_p = range * y with (Q^T range) y = q0.
  const Eigen::VectorXd y = (q.transpose() * range).fullPivLu().solve(q0);
  const Eigen::VectorXd eta_p = range * y;
  const Eigen::MatrixXd reduced = null.transpose() * k * null;
  const Eigen::VectorXd z = reduced.fullPivLu().solve(null.transpose() * (phi - k * eta_p));
  return eta_p + null * z;
}

} // namespace sphirf::test
