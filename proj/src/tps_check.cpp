#include "sphirf/tps_check.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/LU>

#include "sphirf/errors.hpp"

namespace sphirf {

namespace {

constexpr double kDoublingTol = 1e-10;
constexpr double kNegativeTol = 1e-10;

std::vector<double> project_onto_legendre(const AngularKernel& kernel, int lmax, int order) {
  const auto [nodes, weights] = gauss_legendre<double>(order);
  std::vector<double> b(static_cast<std::size_t>(lmax + 1), 0.0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double u = 0.5 * (nodes[k] + 1.0);
    const double d = kPi * u * u;
    const double t = std::cos(d);
    const double w = 0.5 * weights[k] * 2.0 * kPi * u * std::sin(d) * kernel(d);
    double p0 = 1.0, p1 = t;
    for (int l = 0; l <= lmax; ++l) {
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
      b[static_cast<std::size_t>(l)] += w * pl;
    }
  }
  for (int l = 0; l <= lmax; ++l) {
    b[static_cast<std::size_t>(l)] *= (2.0 * l + 1.0) / 2.0;
  }
  return b;
}

} // namespace

double LegendreExpansion::evaluate(double d) const {
  const double t = std::cos(d);
  double sum = 0.0, p0 = 1.0, p1 = t;
  for (int l = 0; l <= degree(); ++l) {
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
    sum += coeffs[static_cast<std::size_t>(l)] * pl;
  }
  return sum;
}

int default_legendre_quad_order(int lmax) { return std::max(4 * lmax, 64); }

LegendreExpansion legendre_coefficients(const AngularKernel& kernel, int lmax, int quad_order, std::string name) {
  if (lmax < 0) {
    throw ValidationError("legendre_coefficients: negative degree");
  }
  if (quad_order < std::max(2 * lmax, 1)) {
    throw ValidationError("legendre_coefficients: quadrature order must be at least 2L");
  }
  LegendreExpansion out;
  out.kernel_name = std::move(name);
  out.quad_order = quad_order;
  out.coeffs = project_onto_legendre(kernel, lmax, quad_order);
  const std::vector<double> refined = project_onto_legendre(kernel, lmax, 2 * quad_order);
  for (std::size_t l = 0; l < refined.size(); ++l) {
    out.doubling_shift = std::max(out.doubling_shift, std::abs(refined[l] - out.coeffs[l]));
  }
  if (!(out.doubling_shift <= kDoublingTol)) {
    std::ostringstream os;
    os << "legendre_coefficients: doubling the quadrature order moves coefficients by " << out.doubling_shift;
    throw NumericalError(NumericalError::Kind::QuadratureTooCoarse, os.str());
  }
  return out;
}

LegendreExpansion legendre_coefficients(const AngularKernel& kernel, int lmax, std::string name) {
  return legendre_coefficients(kernel, lmax, default_legendre_quad_order(lmax), std::move(name));
}

PdVerdict check_conditional_pd(const LegendreExpansion& expansion, int min_degree) {
  if (expansion.degree() < min_degree) {
    throw ValidationError("check_conditional_pd: expansion shorter than the minimum degree");
  }
  PdVerdict verdict;
  verdict.min_degree = min_degree;
  for (int l = std::max(min_degree, 0); l <= expansion.degree(); ++l) {
    const double b = expansion.coeffs[static_cast<std::size_t>(l)];
    if (b < -kNegativeTol) {
      verdict.negatives.emplace_back(l, b);
    }
  }
  verdict.pass = verdict.negatives.empty();
  return verdict;
}

namespace {

void check_wahba_order(int m) {
  if (m < 2 || m % 2 != 0) {
    throw ValidationError("wahba kernel: m must be an even integer >= 2");
  }
}

double wahba_coefficient(int l, int m) { return 1.0 / (std::pow(double(l), m) * (l + 1.0)); }

} // namespace

double wahba_kernel(double d, int m, int lmax) {
  check_wahba_order(m);
  const double t = std::cos(d);
  double sum = 0.0, p0 = 1.0, p1 = t;
  for (int l = 1; l <= lmax; ++l) {
    double pl;
    if (l == 1) {
      pl = t;
    } else {
      pl = ((2.0 * l - 1.0) * t * p1 - (l - 1.0) * p0) / l;
      p0 = p1;
      p1 = pl;
    }
    sum += (2.0 * l + 1.0) * wahba_coefficient(l, m) * pl;
  }
  return sum / kFourPi;
}

double wahba_tail_bound(int m, int lmax) {
  check_wahba_order(m);
  // sum_{l > L} (2l+1)/(l^m (l+1)) <= 2 sum_{l > L} l^-m <= 2 L^{1-m} / (m-1)
  return 2.0 * std::pow(double(std::max(lmax, 1)), 1.0 - m) / (m - 1.0) / kFourPi;
}

SpectralModel wahba_model(int m, int lmax, double sigma2) {
  check_wahba_order(m);
  std::vector<double> a(static_cast<std::size_t>(lmax + 1), 0.0);
  for (int l = 1; l <= lmax; ++l) {
    a[static_cast<std::size_t>(l)] = wahba_coefficient(l, m);
  }
  return SpectralModel(DegreeSet{0}, std::move(a), sigma2, {}, kFourPi * wahba_tail_bound(m, lmax));
}

double WahbaSpline::evaluate(const SpherePoint& x) const {
  double v = d;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    v += c(static_cast<Eigen::Index>(i)) * wahba_kernel(spherical_distance(x, sites[i]), m, lmax);
  }
  return v;
}

WahbaSpline fit_wahba_spline(std::span<const SpherePoint> sites, const Eigen::VectorXd& values, double alpha, int m,
                             int lmax) {
  check_wahba_order(m);
  const auto n = static_cast<Eigen::Index>(sites.size());
  if (values.size() != n || n < 2) {
    throw ValidationError("fit_wahba_spline: need at least two sites with matching values");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = wahba_kernel(spherical_distance(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]),
                             m, lmax);
    }
    a(i, i) += alpha;
    a(i, n) = 1.0;
    a(n, i) = 1.0;
  }
  Eigen::VectorXd rhs(n + 1);
  rhs << values, 0.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw NumericalError(NumericalError::Kind::SingularSystem, "Wahba spline system is singular");
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  WahbaSpline spline;
  spline.c = x.head(n);
  spline.d = x(n);
  spline.sites.assign(sites.begin(), sites.end());
  spline.m = m;
  spline.lmax = lmax;
  return spline;
}

TpsReport run_tps_check(int lmax) {
  if (lmax < 2) {
    throw ValidationError("run_tps_check: need lmax >= 2");
  }
  TpsReport report;
  report.expansion = legendre_coefficients([](double d) { return tps_kernel(d); }, lmax, "thin_plate_d2_log_d");
  report.verdict = check_conditional_pd(report.expansion, 2);
  return report;
}

} // namespace sphirf
