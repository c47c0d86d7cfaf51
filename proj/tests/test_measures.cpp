#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <gtest/gtest.h>

#include "sphirf/errors.hpp"
#include "sphirf/measures.hpp"
#include "support.hpp"

using namespace sphirf;

namespace {

SpectralModel single_mode(int l) {
  std::vector<double> a(static_cast<std::size_t>(l + 1), 0.0);
  a.back() = 1.0;
  return SpectralModel(DegreeSet{}, a, 0.0);
}

// Random atoms and a random band-limited density, then extra atoms chosen by
// least squares to cancel every nil moment.
SphericalMeasure random_allowable(std::mt19937_64& rng, const DegreeSet& d, int density_lmax) {
  SphericalMeasure mu;
  const int k = std::uniform_int_distribution<int>(1, 5)(rng);
  for (int i = 0; i < k; ++i) {
    mu.atoms.push_back({random_point(rng), test::uniform(rng, -2, 2)});
  }
  if (density_lmax >= 0) {
    Density rho;
    rho.lmax = density_lmax;
    rho.coeffs = test::random_vector(rng, harmonic_count(density_lmax));
    rho.quadrature = quadrature_for_degree(2 * density_lmax + 2);
    mu.density = rho;
  }
  const auto fix_points = test::random_points(rng, d.nil_dimension() + 2);
  const Eigen::MatrixXd q = harmonic_design_matrix(fix_points, d);
  const Eigen::VectorXd w = q.transpose().completeOrthogonalDecomposition().solve(-nil_moments(mu, d));
  for (std::size_t i = 0; i < fix_points.size(); ++i) {
    mu.atoms.push_back({fix_points[i], w(static_cast<Eigen::Index>(i))});
  }
  return mu;
}

// Brute-force double integral: atoms exactly, densities by quadrature of both variables.
double brute_force_covariance(const SphericalMeasure& a, const SphericalMeasure& b, const SpectralModel& model) {
  auto expand = [&](const SphericalMeasure& mu) {
    std::vector<Atom> pts = mu.atoms;
    if (mu.density) {
      // phi has band limit model.lmax(), so this rule integrates phi * rho exactly.
      const auto q = quadrature_for_degree(model.lmax() + mu.density->lmax);
      for (std::size_t k = 0; k < q.size(); ++k) {
        pts.push_back({q.nodes[k], q.weights[k] * mu.density->evaluate(q.nodes[k])});
      }
    }
    return pts;
  };
  const auto pa = expand(a), pb = expand(b);
  double sum = 0;
  for (const auto& x : pa) {
    for (const auto& y : pb) {
      sum += x.weight * y.weight * intrinsic_cov(model, spherical_distance(x.point, y.point));
    }
  }
  return sum;
}

} // namespace

TEST(Apply, DiracEvaluates) {
  const SpherePoint x(1.1, 0.7);
  const auto mu = SphericalMeasure::dirac(x);
  EXPECT_EQ(apply(mu, [](const SpherePoint& p) { return real_sph_harm({2, 1}, p); }), real_sph_harm({2, 1}, x));
}

TEST(Apply, OppositeAtomsCancel) {
  SphericalMeasure mu;
  const SpherePoint x(2.0, 2.0);
  mu.atoms = {{x, 1.0}, {x, -1.0}};
  EXPECT_EQ(apply(mu, [](const SpherePoint& p) { return std::exp(p.zeta()); }), 0.0);
}

TEST(Apply, DensityIntegratesAgainstHarmonic) {
  SphericalMeasure mu;
  Density rho;
  rho.lmax = 3;
  rho.coeffs = Eigen::VectorXd::Zero(harmonic_count(3));
  rho.coeffs(flat_index(3, 2)) = 1.0;
  rho.quadrature = quadrature_for_degree(6);
  mu.density = rho;
  EXPECT_NEAR(apply(mu, [](const SpherePoint& p) { return real_sph_harm({3, 2}, p); }), 1.0, 1e-10);
  EXPECT_NEAR(apply(mu, [](const SpherePoint& p) { return real_sph_harm({3, 1}, p); }), 0.0, 1e-12);
}

TEST(Allowable, DiracDifference) {
  SphericalMeasure mu;
  mu.atoms = {{SpherePoint(0.1, 0.5), 1.0}, {SpherePoint(2.0, 2.5), -1.0}};
  const auto r = is_allowable(mu, DegreeSet{0});
  EXPECT_TRUE(r.allowable);
  EXPECT_LT(r.max_residual, 1e-15);
  EXPECT_FALSE(is_allowable(mu, DegreeSet{0, 1}).allowable);
}

TEST(Allowable, SingleDirac) {
  const auto r = is_allowable(SphericalMeasure::dirac(SpherePoint(0.3, 0.3)), DegreeSet{0});
  EXPECT_FALSE(r.allowable);
  EXPECT_NEAR(r.max_residual, 1 / std::sqrt(kFourPi), 1e-15);
  EXPECT_THROW(is_allowable(SphericalMeasure{}, DegreeSet{0}, 0.0), ValidationError);
}

TEST(KrigingMeasure, EmptyDegreeSetIsDirac) {
  const SpherePoint y(0.4, 1.3);
  const auto mu = kriging_measure(y, DegreeSet{}, quadrature_for_degree(4));
  ASSERT_EQ(mu.atoms.size(), 1u);
  EXPECT_FALSE(mu.density.has_value());
  EXPECT_EQ(mu.atoms[0].weight, 1.0);
}

TEST(KrigingMeasure, AnnihilatesNilSpace) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 30; ++i) {
    const SpherePoint y = random_point(rng);
    const auto mu0 = kriging_measure(y, DegreeSet{0}, quadrature_for_degree(2));
    EXPECT_NEAR(apply(mu0, [](const SpherePoint& p) { return real_sph_harm({0, 0}, p); }), 0.0, 1e-12);
    const auto mu = kriging_measure(y, DegreeSet{0, 1}, quadrature_for_degree(2));
    EXPECT_NEAR(apply(mu, [](const SpherePoint& p) { return real_sph_harm({1, -1}, p); }), 0.0, 1e-10);
    EXPECT_TRUE(is_allowable(mu, DegreeSet{0, 1}).allowable);
    // Degrees outside D pass through untouched.
    EXPECT_NEAR(apply(mu, [](const SpherePoint& p) { return real_sph_harm({2, 1}, p); }), real_sph_harm({2, 1}, y),
                1e-12);
  }
}

TEST(KrigingMeasure, RejectsCoarseQuadrature) {
  try {
    kriging_measure(SpherePoint(0, 1), DegreeSet{0, 1, 2}, quadrature_for_degree(3));
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), NumericalError::Kind::QuadratureTooCoarse);
  }
}

TEST(RotateMeasure, IdentityAndDirac) {
  std::mt19937_64 rng(32);
  const SpherePoint x = random_point(rng);
  const Rotation g = Rotation::random(rng);
  const auto moved = rotate_measure(g, SphericalMeasure::dirac(x, 2.5));
  ASSERT_EQ(moved.atoms.size(), 1u);
  EXPECT_LT((moved.atoms[0].point.vector() - g.apply(x).vector()).norm(), 1e-15);
  EXPECT_EQ(moved.atoms[0].weight, 2.5);

  const auto mu = random_allowable(rng, DegreeSet{0, 1}, 3);
  const auto same = rotate_measure(Rotation(), mu);
  EXPECT_LT((same.density->coeffs - mu.density->coeffs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(is_allowable(same, DegreeSet{0, 1}).max_residual, is_allowable(mu, DegreeSet{0, 1}).max_residual,
              1e-12);
}

TEST(RotateMeasure, PushforwardIdentity) {
  // f(g mu) = integral of f(g x) mu(dx)
  std::mt19937_64 rng(33);
  const auto mu = random_allowable(rng, DegreeSet{0}, 4);
  const Rotation g = Rotation::random(rng);
  const auto gmu = rotate_measure(g, mu);
  auto f = [](const SpherePoint& p) { return real_sph_harm({3, -2}, p) + 0.5 * real_sph_harm({4, 4}, p); };
  EXPECT_NEAR(apply(gmu, f), apply(mu, [&](const SpherePoint& p) { return f(g.apply(p)); }), 1e-11);
}

TEST(RotateMeasure, AllowabilityPreserved) {
  std::mt19937_64 rng(34);
  for (int i = 0; i < 100; ++i) {
    const DegreeSet d = test::random_degree_set(rng);
    const auto mu = random_allowable(rng, d, i % 2 ? 3 : -1);
    ASSERT_TRUE(is_allowable(mu, d).allowable);
    const auto gmu = rotate_measure(Rotation::random(rng), mu);
    EXPECT_LT(is_allowable(gmu, d).max_residual, 1e-9);
  }
}

TEST(MeasureCovariance, DiracDifferenceSingleMode) {
  const auto model = single_mode(2);
  const SpherePoint x(0.5, 0.6), y(2.0, 2.1);
  SphericalMeasure mu;
  mu.atoms = {{x, 1.0}, {y, -1.0}};
  const double expect = 2 * (model.phi0() - intrinsic_cov(model, spherical_distance(x, y)));
  EXPECT_NEAR(measure_covariance(mu, mu, model), expect, 1e-14);
}

TEST(MeasureCovariance, NullMeasure) {
  const auto model = power_law_model(DegreeSet{0}, 1, 3, 0, 20);
  SphericalMeasure mu;
  mu.atoms = {{SpherePoint(0.5, 0.6), 1.0}, {SpherePoint(2.0, 2.1), -1.0}};
  EXPECT_EQ(measure_covariance(mu, SphericalMeasure{}, model), 0.0);
}

TEST(MeasureCovariance, RejectsNonAllowable) {
  const auto model = power_law_model(DegreeSet{0}, 1, 3, 0, 20);
  try {
    measure_covariance(SphericalMeasure::dirac(SpherePoint(0, 1)), SphericalMeasure{}, model);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.kind(), NumericalError::Kind::NotAllowable);
  }
}

TEST(MeasureCovariance, MatchesBruteForceQuadrature) {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 20; ++i) {
    const DegreeSet d = test::random_degree_set(rng);
    const auto model = power_law_model(d, 1, 3.5, 0, 12);
    const auto a = random_allowable(rng, d, 4);
    const auto b = random_allowable(rng, d, 3);
    const double ref = brute_force_covariance(a, b, model);
    EXPECT_NEAR(measure_covariance(a, b, model), ref, 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST(MeasureCovariance, RotationInvariant) {
  std::mt19937_64 rng(36);
  for (int i = 0; i < 20; ++i) {
    const DegreeSet d = test::random_degree_set(rng);
    const auto model = power_law_model(d, 1, 3, 0, 25);
    const auto a = random_allowable(rng, d, 3), b = random_allowable(rng, d, 2);
    const Rotation g = Rotation::random(rng);
    EXPECT_NEAR(measure_covariance(rotate_measure(g, a), rotate_measure(g, b), model), measure_covariance(a, b, model),
                1e-9);
  }
}

TEST(MeasureCovariance, GramMatrixIsPositiveSemidefinite) {
  std::mt19937_64 rng(37);
  const DegreeSet d{0, 1};
  const auto model = power_law_model(d, 1, 3, 0, 30);
  std::vector<SphericalMeasure> mus;
  for (int i = 0; i < 12; ++i) {
    mus.push_back(random_allowable(rng, d, i % 3 == 0 ? 2 : -1));
  }
  Eigen::MatrixXd g(12, 12);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      g(i, j) = measure_covariance(mus[static_cast<std::size_t>(i)], mus[static_cast<std::size_t>(j)], model);
    }
  }
  EXPECT_LT((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff(), -1e-10);
}

TEST(MeasureCovariance, KrigingMeasuresReproducePhi) {
  std::mt19937_64 rng(38);
  for (const DegreeSet& d : {DegreeSet{0}, DegreeSet{0, 1}, DegreeSet{0, 1, 2}}) {
    const auto model = power_law_model(d, 1, 3, 0, 30);
    const auto quad = quadrature_for_degree(2 * d.max_degree());
    for (int i = 0; i < 10; ++i) {
      const SpherePoint x = random_point(rng), y = random_point(rng);
      const double cov = measure_covariance(kriging_measure(x, d, quad), kriging_measure(y, d, quad), model);
      EXPECT_NEAR(cov, intrinsic_cov(model, spherical_distance(x, y)), 1e-9);
    }
  }
}
