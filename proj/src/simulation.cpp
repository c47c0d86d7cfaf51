#include "sphirf/simulation.hpp"

#include <algorithm>
#include <random>

#include "sphirf/errors.hpp"

namespace sphirf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace

Eigen::VectorXd coefficient_variances(const SpectralModel& model) {
  const int lmax = model.lmax();
  Eigen::VectorXd var = Eigen::VectorXd::Zero(harmonic_count(lmax));
  for (int l = 0; l <= lmax; ++l) {
    if (model.degrees().contains(l)) {
      continue;
    }
    for (int m = -l; m <= l; ++m) {
      var(flat_index(l, m)) = model.coefficient(l);
    }
  }
  return var;
}

HarmonicField simulate_irf(const SpectralModel& model, const std::map<HarmonicIndex, double>& low_coeffs,
                           std::uint64_t seed) {
  int lmax = model.lmax();
  for (const auto& [idx, value] : low_coeffs) {
    if (!model.degrees().contains(idx.l)) {
      throw ValidationError("simulate_irf: low-order coefficient outside the annihilated degree set");
    }
    lmax = std::max(lmax, idx.l);
  }
  const Eigen::VectorXd var = coefficient_variances(model);
  HarmonicField field;
  field.lmax = lmax;
  field.seed = seed;
  field.coeffs = Eigen::VectorXd::Zero(harmonic_count(lmax));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    if (var(i) > 0.0) {
      field.coeffs(i) = std::sqrt(var(i)) * normal(rng);
    }
  }
  for (const auto& [idx, value] : low_coeffs) {
    field.coeffs(flat_index(idx.l, idx.m)) = value;
  }
  return field;
}

HarmonicField truncate_field(const HarmonicField& field, const DegreeSet& degrees) {
  HarmonicField out = field;
  for (int l : degrees.degrees()) {
    if (l > field.lmax) {
      break;
    }
    for (int m = -l; m <= l; ++m) {
      out.coeffs(flat_index(l, m)) = 0.0;
    }
  }
  return out;
}

double analytic_field_covariance(const SpectralModel& model, const SpherePoint& x, const SpherePoint& y) {
  const Eigen::VectorXd var = coefficient_variances(model);
  const Eigen::VectorXd yx = sph_harm_all(model.lmax(), x);
  const Eigen::VectorXd yy = sph_harm_all(model.lmax(), y);
  return (var.array() * yx.array() * yy.array()).sum();
}

StationarityReport empirical_stationarity_check(const SpectralModel& model, int n_reps, int n_pairs,
                                                std::uint64_t seed) {
  if (n_reps < 2 || n_pairs < 1) {
    throw ValidationError("empirical_stationarity_check: need n_reps >= 2 and n_pairs >= 1");
  }
  StationarityReport report;
  report.n_reps = n_reps;

  std::mt19937_64 geometry(splitmix64(seed));
  const auto np = static_cast<std::size_t>(n_pairs);
  report.pairs.resize(np);
  std::vector<SpherePoint> points;
  points.reserve(4 * np);
  for (auto& pair : report.pairs) {
    pair.x = random_point(geometry);
    pair.y = random_point(geometry);
    const Rotation g = Rotation::random(geometry);
    pair.gx = g.apply(pair.x);
    pair.gy = g.apply(pair.y);
    pair.distance = spherical_distance(pair.x, pair.y);
    pair.phi = intrinsic_cov(model, pair.distance);
    points.insert(points.end(), {pair.x, pair.y, pair.gx, pair.gy});
  }

  // Synthesis matrix: row k holds every Y_l^m at points[k].
  const int lmax = model.lmax();
  Eigen::MatrixXd synth(static_cast<Eigen::Index>(points.size()), harmonic_count(lmax));
  for (std::size_t k = 0; k < points.size(); ++k) {
    synth.row(static_cast<Eigen::Index>(k)) = sph_harm_all(lmax, points[k]).transpose();
  }
  const Eigen::VectorXd sd = coefficient_variances(model).cwiseSqrt();

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * np));
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * np));
  Eigen::VectorXd z(sd.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < n_reps; ++r) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r) + 1)));
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z(i) = sd(i) > 0.0 ? sd(i) * normal(rng) : 0.0;
    }
    const Eigen::VectorXd values = synth * z;
    for (std::size_t p = 0; p < np; ++p) {
      const double prod = values(static_cast<Eigen::Index>(4 * p)) * values(static_cast<Eigen::Index>(4 * p + 1));
      const double prod_rot =
          values(static_cast<Eigen::Index>(4 * p + 2)) * values(static_cast<Eigen::Index>(4 * p + 3));
      sum(static_cast<Eigen::Index>(2 * p)) += prod;
      sum(static_cast<Eigen::Index>(2 * p + 1)) += prod_rot;
      sum_sq(static_cast<Eigen::Index>(2 * p)) += prod * prod;
      sum_sq(static_cast<Eigen::Index>(2 * p + 1)) += prod_rot * prod_rot;
    }
  }

  const double n = n_reps;
  auto moments = [&](Eigen::Index k, double& mean, double& se) {
    mean = sum(k) / n;
    const double var = std::max(0.0, (sum_sq(k) - n * mean * mean) / (n - 1.0));
    se = std::sqrt(var / n);
  };
  for (std::size_t p = 0; p < np; ++p) {
    auto& pair = report.pairs[p];
    moments(static_cast<Eigen::Index>(2 * p), pair.estimate, pair.std_error);
    moments(static_cast<Eigen::Index>(2 * p + 1), pair.estimate_rotated, pair.std_error_rotated);
    auto zscore = [](double diff, double se) { return se > 0.0 ? std::abs(diff) / se : (diff == 0.0 ? 0.0 : 1e300); };
    pair.z = zscore(pair.estimate - pair.phi, pair.std_error);
    pair.z_rotated = zscore(pair.estimate_rotated - pair.phi, pair.std_error_rotated);
    pair.z_pair = zscore(pair.estimate - pair.estimate_rotated,
                         std::hypot(pair.std_error, pair.std_error_rotated));
    report.max_deviation = std::max({report.max_deviation, std::abs(pair.estimate - pair.phi),
                                     std::abs(pair.estimate_rotated - pair.phi)});
    report.max_z = std::max({report.max_z, pair.z, pair.z_rotated});
    report.max_pair_z = std::max(report.max_pair_z, pair.z_pair);
  }
  return report;
}

} // namespace sphirf
