#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <gtest/gtest.h>

#include "sphirf/errors.hpp"
#include "sphirf/kriging.hpp"
#include "sphirf/smoothing.hpp"
#include "support.hpp"

using namespace sphirf;

namespace {

NumericalError::Kind numerical_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const NumericalError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected NumericalError";
  return NumericalError::Kind::SingularSystem;
}

double objective(const SmoothingFit& fit, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                 const Eigen::VectorXd& w) {
  const Eigen::MatrixXd psi = cov_matrix(fit.model, fit.sites, false);
  const Eigen::MatrixXd q = harmonic_design_matrix(fit.sites, fit.model.degrees());
  const Eigen::VectorXd f = q * b + psi * c;
  return (w - f).squaredNorm() + fit.alpha * c.dot(psi * c);
}

// Semi-norm from harmonic coefficients of the kernel part extracted by quadrature.
double spectral_semi_norm(const SmoothingFit& fit) {
  const SpectralModel& model = fit.model;
  const int lmax = model.lmax();
  const auto quad = quadrature_for_degree(2 * lmax);
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(harmonic_count(lmax));
  for (std::size_t k = 0; k < quad.size(); ++k) {
    double g = 0;
    for (std::size_t i = 0; i < fit.sites.size(); ++i) {
      g += fit.c(static_cast<Eigen::Index>(i)) * intrinsic_cov(model, spherical_distance(fit.sites[i], quad.nodes[k]));
    }
    coeffs += quad.weights[k] * g * sph_harm_all(lmax, quad.nodes[k]);
  }
  double s = 0;
  for (int l = 0; l <= lmax; ++l) {
    if (model.degrees().contains(l) || model.coefficient(l) == 0.0) {
      continue;
    }
    for (int m = -l; m <= l; ++m) {
      s += coeffs(flat_index(l, m)) * coeffs(flat_index(l, m)) / model.coefficient(l);
    }
  }
  return s;
}

} // namespace

TEST(CardinalBasis, ConstantNilSpace) {
  const std::vector<SpherePoint> tau{SpherePoint(0.4, 1.0)};
  const auto basis = cardinal_basis(tau, DegreeSet{0});
  std::mt19937_64 rng(51);
  for (int i = 0; i < 10; ++i) {
    EXPECT_NEAR(basis.evaluate(random_point(rng))(0), 1.0, 1e-14);
  }
}

TEST(CardinalBasis, KroneckerAtCardinalPoints) {
  for (const DegreeSet& d : {DegreeSet{0, 1}, DegreeSet{0, 1, 2}, DegreeSet{0, 2}, DegreeSet{1}}) {
    const auto taus = default_cardinal_points(d);
    ASSERT_EQ(static_cast<int>(taus.size()), d.nil_dimension());
    const auto basis = cardinal_basis(taus, d);
    for (std::size_t mu = 0; mu < taus.size(); ++mu) {
      const Eigen::VectorXd p = basis.evaluate(taus[mu]);
      for (Eigen::Index nu = 0; nu < p.size(); ++nu) {
        EXPECT_NEAR(p(nu), nu == static_cast<Eigen::Index>(mu) ? 1.0 : 0.0, 1e-10);
      }
    }
    EXPECT_LT(basis.condition, 1e8);
  }
}

TEST(CardinalBasis, DefaultPointsForLinearNilSpace) {
  const auto taus = default_cardinal_points(DegreeSet{0, 1});
  EXPECT_EQ(taus[0].zeta(), 0.0);
  for (int k = 1; k < 4; ++k) {
    EXPECT_NEAR(taus[static_cast<std::size_t>(k)].zeta(), kPi / 2, 1e-15);
    EXPECT_NEAR(taus[static_cast<std::size_t>(k)].psi(), (k - 1) * kTwoPi / 3, 1e-15);
  }
}

TEST(CardinalBasis, GreatCircleIsNotUnisolvent) {
  const Rotation g = Rotation::about_axis(Eigen::Vector3d(0.2, 1.0, 0.5), 0.8);
  std::vector<SpherePoint> taus;
  for (int k = 0; k < 4; ++k) {
    taus.push_back(g.apply(SpherePoint(0.3 + 1.4 * k, kPi / 2)));
  }
  EXPECT_EQ(numerical_kind([&] { cardinal_basis(taus, DegreeSet{0, 1}); }), NumericalError::Kind::NonUnisolvent);
  EXPECT_THROW(cardinal_basis(std::vector<SpherePoint>(3), DegreeSet{0, 1}), ValidationError);
}

TEST(ReproducingKernel, SymmetricAndReproducesCardinals) {
  std::mt19937_64 rng(52);
  const DegreeSet d{0, 1};
  const auto model = power_law_model(d, 1, 3, 0, 30);
  const auto basis = cardinal_basis(default_cardinal_points(d), d);
  for (int i = 0; i < 50; ++i) {
    const SpherePoint x = random_point(rng), y = random_point(rng);
    EXPECT_NEAR(reproducing_kernel(x, y, basis, model), reproducing_kernel(y, x, basis, model), 1e-12);
    const Eigen::VectorXd p = basis.evaluate(y);
    for (std::size_t nu = 0; nu < basis.taus.size(); ++nu) {
      EXPECT_NEAR(reproducing_kernel(basis.taus[nu], y, basis, model), p(static_cast<Eigen::Index>(nu)), 1e-10);
    }
  }
}

TEST(ReproducingKernel, GramIsPositiveSemidefinite) {
  std::mt19937_64 rng(53);
  for (const DegreeSet& d : {DegreeSet{0}, DegreeSet{0, 1}, DegreeSet{0, 1, 2}}) {
    const auto model = power_law_model(d, 1, 3, 0, 30);
    const auto basis = cardinal_basis(default_cardinal_points(d), d);
    const auto pts = test::random_points(rng, 15);
    Eigen::MatrixXd h(15, 15);
    for (int i = 0; i < 15; ++i) {
      for (int j = 0; j < 15; ++j) {
        h(i, j) = reproducing_kernel(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)], basis, model);
      }
    }
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(ReproducingKernel, KernelSectionReproducesEvaluation) {
  // <f, H(x, .)> = f(x) for representable f, and H(x, .) evaluates to H(x, y).
  std::mt19937_64 rng(54);
  const DegreeSet d{0, 1};
  const auto model = power_law_model(d, 1, 3.5, 0, 25);
  const auto basis = cardinal_basis(default_cardinal_points(d), d);
  RepresentableFunction f;
  f.b = test::random_vector(rng, 4);
  f.centers = test::random_points(rng, 9);
  const Eigen::MatrixXd q = harmonic_design_matrix(f.centers, d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  const Eigen::MatrixXd full = qr.householderQ();
  f.c = full.rightCols(5) * test::random_vector(rng, 5); // Q^T c = 0
  for (int i = 0; i < 10; ++i) {
    const SpherePoint x = random_point(rng), y = random_point(rng);
    const auto hx = kernel_section(x, basis, model);
    EXPECT_NEAR(hx.evaluate(y, model), reproducing_kernel(x, y, basis, model), 1e-10);
    EXPECT_NEAR(native_inner_product(f, hx, basis, model), f.evaluate(x, model), 1e-9);
  }
}

TEST(SmoothingSpline, NilSpaceDataFitsExactly) {
  std::mt19937_64 rng(55);
  const DegreeSet d{0, 1};
  const auto model = power_law_model(d, 1, 3, 0, 30);
  const auto sites = test::random_points(rng, 20);
  const Eigen::VectorXd b0 = test::random_vector(rng, 4);
  const Eigen::VectorXd w = harmonic_design_matrix(sites, d) * b0;
  for (double alpha : {1e-3, 1.0, 1e3}) {
    const auto fit = fit_smoothing_spline(sites, w, model, alpha);
    EXPECT_LT(fit.c.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((fit.b - b0).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(semi_norm_sq(fit), 0.0, 1e-18);
  }
}

TEST(SmoothingSpline, SideConditionAndOptimality) {
  std::mt19937_64 rng(56);
  const DegreeSet d{0, 1};
  const auto model = power_law_model(d, 1, 3, 0, 30);
  const auto sites = test::random_points(rng, 25);
  const Eigen::VectorXd w = test::random_vector(rng, 25);
  const auto fit = fit_smoothing_spline(sites, w, model, 0.05);
  const Eigen::MatrixXd q = harmonic_design_matrix(sites, d);
  EXPECT_LT((q.transpose() * fit.c).cwiseAbs().maxCoeff(), 1e-9);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  const Eigen::MatrixXd full = qr.householderQ();
  const Eigen::MatrixXd null = full.rightCols(21);
  const double j0 = objective(fit, fit.b, fit.c, w);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd db = test::random_vector(rng, 4);
    Eigen::VectorXd dc = null * test::random_vector(rng, 21);
    const double scale = 1e-4 / std::sqrt(db.squaredNorm() + dc.squaredNorm());
    EXPECT_GE(objective(fit, fit.b + scale * db, fit.c + scale * dc, w), j0 - 1e-12);
  }
}

TEST(SmoothingSpline, LargeAlphaApproachesHarmonicRegression) {
  std::mt19937_64 rng(57);
  const DegreeSet d{0, 1, 2};
  const auto model = power_law_model(d, 1, 3, 0, 30);
  const auto sites = test::random_points(rng, 30);
  const Eigen::VectorXd w = test::random_vector(rng, 30);
  const auto fit = fit_smoothing_spline(sites, w, model, 1e12);
  EXPECT_LT(fit.c.norm(), 1e-6 * w.norm());
  const Eigen::MatrixXd q = harmonic_design_matrix(sites, d);
  const Eigen::VectorXd b_ls = q.colPivHouseholderQr().solve(w);
  EXPECT_LT((fit.b - b_ls).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SmoothingSpline, TinyAlphaInterpolates) {
  std::mt19937_64 rng(58);
  const auto model = power_law_model(DegreeSet{0, 1}, 1, 3, 0, 30);
  const auto sites = test::random_points(rng, 25);
  const Eigen::VectorXd w = test::random_vector(rng, 25);
  const auto fit = fit_smoothing_spline(sites, w, model, 1e-12);
  for (int i = 0; i < 25; ++i) {
    EXPECT_NEAR(evaluate_fit(fit, sites[static_cast<std::size_t>(i)]), w(i), 1e-6);
  }
}

TEST(SmoothingSpline, MonotoneInAlpha) {
  std::mt19937_64 rng(59);
  const auto model = power_law_model(DegreeSet{0}, 1, 3, 0, 30);
  const auto sites = test::random_points(rng, 30);
  const Eigen::VectorXd w = test::random_vector(rng, 30);
  double prev_norm = std::numeric_limits<double>::infinity(), prev_rss = -1;
  for (double alpha = 1e-4; alpha < 1e6; alpha *= 10) {
    const auto fit = fit_smoothing_spline(sites, w, model, alpha);
    double rss = 0;
    for (int i = 0; i < 30; ++i) {
      rss += std::pow(w(i) - evaluate_fit(fit, sites[static_cast<std::size_t>(i)]), 2);
    }
    EXPECT_LE(semi_norm_sq(fit), prev_norm * (1 + 1e-12));
    EXPECT_GE(rss, prev_rss * (1 - 1e-12));
    prev_norm = semi_norm_sq(fit);
    prev_rss = rss;
  }
}

TEST(SmoothingSpline, Errors) {
  std::mt19937_64 rng(60);
  const auto model = power_law_model(DegreeSet{0, 1}, 1, 3, 0, 30);
  const auto sites = test::random_points(rng, 10);
  const Eigen::VectorXd w = test::random_vector(rng, 10);
  EXPECT_THROW(fit_smoothing_spline(sites, w, model, 0.0), ValidationError);
  EXPECT_THROW(fit_smoothing_spline(sites, w, model, -1.0), ValidationError);
  EXPECT_THROW(fit_smoothing_spline(sites, w.head(5), model, 1.0), ValidationError);
  const std::vector<SpherePoint> few(sites.begin(), sites.begin() + 4);
  EXPECT_EQ(numerical_kind([&] { fit_smoothing_spline(few, w.head(4), model, 1.0); }),
            NumericalError::Kind::TooFewSites);
  std::vector<SpherePoint> equator;
  for (int k = 0; k < 10; ++k) {
    equator.emplace_back(k * kTwoPi / 10, kPi / 2);
  }
  EXPECT_EQ(numerical_kind([&] { fit_smoothing_spline(equator, w, model, 1.0); }),
            NumericalError::Kind::RankDeficientDesign);
}

TEST(SemiNorm, ClosedFormCases) {
  SmoothingFit fit{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(3), {}, power_law_model(DegreeSet{0}, 1, 3, 0, 5),
                   1.0};
  fit.sites = {SpherePoint(0, 1), SpherePoint(1, 1), SpherePoint(2, 2)};
  EXPECT_EQ(semi_norm_sq(fit), 0.0);
  EXPECT_NEAR(evaluate_fit(fit, SpherePoint(0.3, 0.3)), 1 / std::sqrt(kFourPi), 1e-15);

  const SpectralModel mode2(DegreeSet{0}, {0, 0, 0.7}, 0.0);
  const SmoothingFit one{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), {SpherePoint(1, 1)}, mode2, 1.0};
  EXPECT_NEAR(semi_norm_sq(one), 5 * 0.7 / kFourPi, 1e-15);
}

TEST(SemiNorm, MatchesSpectralDefinition) {
  std::mt19937_64 rng(61);
  for (const DegreeSet& d : {DegreeSet{0}, DegreeSet{0, 1}}) {
    const auto model = power_law_model(d, 1, 3, 0, 16);
    const auto sites = test::random_points(rng, 20);
    const auto fit = fit_smoothing_spline(sites, test::random_vector(rng, 20), model, 0.01);
    const double ref = spectral_semi_norm(fit);
    EXPECT_NEAR(semi_norm_sq(fit), ref, 1e-8 * std::max(1.0, ref));
  }
}

TEST(DualEquivalence, RandomInstances) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 30; ++trial) {
    const DegreeSet d = test::random_degree_set(rng);
    const auto model = power_law_model(d, 1, test::uniform(rng, 2.5, 4), 0, 30);
    const int n = std::uniform_int_distribution<int>(d.nil_dimension() + 2, 40)(rng);
    const auto sites = test::random_points(rng, n);
    const Eigen::VectorXd w = test::random_vector(rng, n);
    const double alpha = std::pow(10.0, test::uniform(rng, -6, 2));
    const auto r = dual_kriging_equivalence(sites, w, model, alpha, random_point(rng));
    EXPECT_LT(r.gap, 1e-9) << "alpha=" << alpha << " n=" << n;
  }
}

TEST(DualEquivalence, InterpolationLimitAndTrend) {
  std::mt19937_64 rng(63);
  const DegreeSet d{0, 1};
  const auto model = power_law_model(d, 1, 3, 0, 30);
  const auto sites = test::random_points(rng, 15);
  const Eigen::VectorXd w = test::random_vector(rng, 15);
  const auto r = dual_kriging_equivalence(sites, w, model, 1e-12, sites[4]);
  EXPECT_NEAR(r.smoothing, w(4), 1e-6);
  EXPECT_NEAR(r.kriging, w(4), 1e-6);

  const Eigen::VectorXd b0 = test::random_vector(rng, 4);
  const Eigen::VectorXd trend = harmonic_design_matrix(sites, d) * b0;
  const SpherePoint x0 = random_point(rng);
  const auto t = dual_kriging_equivalence(sites, trend, model, 0.3, x0);
  EXPECT_NEAR(t.smoothing, nil_basis(x0, d).dot(b0), 1e-9);
  EXPECT_NEAR(t.kriging, nil_basis(x0, d).dot(b0), 1e-9);
}
