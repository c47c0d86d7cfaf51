#include "sphirf/harmonics.hpp"

#include <algorithm>
#include <sstream>

#include <Eigen/QR>

namespace sphirf {

HarmonicIndex::HarmonicIndex(int degree, int order) : l(degree), m(order) {
  if (degree < 0 || std::abs(order) > degree) {
    throw ValidationError("HarmonicIndex: require |m| <= l");
  }
}

DegreeSet::DegreeSet(std::initializer_list<int> degrees) : DegreeSet(std::vector<int>(degrees)) {}

DegreeSet::DegreeSet(std::vector<int> degrees) : degrees_(std::move(degrees)) {
  for (int l : degrees_) {
    if (l < 0) {
      throw ValidationError("DegreeSet: negative degree");
    }
  }
  std::sort(degrees_.begin(), degrees_.end());
  degrees_.erase(std::unique(degrees_.begin(), degrees_.end()), degrees_.end());
}

DegreeSet DegreeSet::below(int kappa) {
  if (kappa < 0) {
    throw ValidationError("DegreeSet::below: negative order");
  }
  std::vector<int> d(static_cast<std::size_t>(kappa));
  for (int l = 0; l < kappa; ++l) {
    d[static_cast<std::size_t>(l)] = l;
  }
  return DegreeSet(std::move(d));
}

bool DegreeSet::contains(int l) const {
  return std::binary_search(degrees_.begin(), degrees_.end(), l);
}

int DegreeSet::nil_dimension() const {
  int n = 0;
  for (int l : degrees_) {
    n += 2 * l + 1;
  }
  return n;
}

std::vector<HarmonicIndex> DegreeSet::indices() const {
  std::vector<HarmonicIndex> out;
  out.reserve(static_cast<std::size_t>(nil_dimension()));
  for (int l : degrees_) {
    for (int m = -l; m <= l; ++m) {
      out.emplace_back(l, m);
    }
  }
  return out;
}

std::string DegreeSet::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < degrees_.size(); ++i) {
    os << (i ? "," : "") << degrees_[i];
  }
  return os.str();
}

namespace {

// Fully normalized Pbar_l^m(cos zeta) = sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m,
// for 0 <= m <= l <= lmax, stored at flat_index(l, m). The normalized
// recurrence stays in range for any degree.
void normalized_legendre_table(int lmax, double t, double s, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(harmonic_count(lmax)), 0.0);
  double pmm = 1.0 / std::sqrt(kFourPi);
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) {
      pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    }
    out[static_cast<std::size_t>(flat_index(m, m))] = pmm;
    if (m == lmax) {
      break;
    }
    double p0 = pmm;
    double p1 = std::sqrt(2.0 * m + 3.0) * t * pmm;
    out[static_cast<std::size_t>(flat_index(m + 1, m))] = p1;
    for (int l = m + 2; l <= lmax; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      const double p2 = a * (t * p1 - b * p0);
      out[static_cast<std::size_t>(flat_index(l, m))] = p2;
      p0 = p1;
      p1 = p2;
    }
  }
}

void colatitude_trig(const SpherePoint& x, double& t, double& s) {
  const Eigen::Vector3d& v = x.vector();
  t = std::clamp(v.z(), -1.0, 1.0);
  s = std::hypot(v.x(), v.y());
}

} // namespace

Eigen::VectorXd sph_harm_all(int lmax, const SpherePoint& x) {
  if (lmax < 0) {
    return Eigen::VectorXd(0);
  }
  double t = 0, s = 0;
  colatitude_trig(x, t, s);
  std::vector<double> pbar;
  normalized_legendre_table(lmax, t, s, pbar);
  Eigen::VectorXd y(harmonic_count(lmax));
  const double psi = x.psi();
  for (int m = 0; m <= lmax; ++m) {
    const double c = std::cos(m * psi);
    const double sn = std::sin(m * psi);
    for (int l = m; l <= lmax; ++l) {
      const double p = pbar[static_cast<std::size_t>(flat_index(l, m))];
      if (m == 0) {
        y(flat_index(l, 0)) = p;
      } else {
        y(flat_index(l, m)) = std::numbers::sqrt2 * p * c;
        y(flat_index(l, -m)) = std::numbers::sqrt2 * p * sn;
      }
    }
  }
  return y;
}

double real_sph_harm(const HarmonicIndex& idx, const SpherePoint& x) {
  const int am = std::abs(idx.m);
  double t = 0, s = 0;
  colatitude_trig(x, t, s);
  // Pbar_m^m, then upward in l at fixed m.
  double pmm = 1.0 / std::sqrt(kFourPi);
  for (int k = 1; k <= am; ++k) {
    pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  }
  double p = pmm;
  if (idx.l > am) {
    double p0 = pmm;
    double p1 = std::sqrt(2.0 * am + 3.0) * t * pmm;
    for (int l = am + 2; l <= idx.l; ++l) {
      const double ll = l, mm = am;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      const double p2 = a * (t * p1 - b * p0);
      p0 = p1;
      p1 = p2;
    }
    p = p1;
  }
  if (idx.m == 0) {
    return p;
  }
  const double arg = am * x.psi();
  return std::numbers::sqrt2 * p * (idx.m > 0 ? std::cos(arg) : std::sin(arg));
}

Eigen::VectorXd nil_basis(const SpherePoint& x, const DegreeSet& degrees) {
  Eigen::VectorXd q(degrees.nil_dimension());
  if (degrees.empty()) {
    return q;
  }
  const Eigen::VectorXd all = sph_harm_all(degrees.max_degree(), x);
  int col = 0;
  for (int l : degrees.degrees()) {
    for (int m = -l; m <= l; ++m) {
      q(col++) = all(flat_index(l, m));
    }
  }
  return q;
}

Eigen::MatrixXd harmonic_design_matrix(std::span<const SpherePoint> points, const DegreeSet& degrees) {
  Eigen::MatrixXd q(static_cast<Eigen::Index>(points.size()), degrees.nil_dimension());
  for (std::size_t i = 0; i < points.size(); ++i) {
    q.row(static_cast<Eigen::Index>(i)) = nil_basis(points[i], degrees).transpose();
  }
  return q;
}

int numerical_rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) {
    return 0;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const double top = std::abs(qr.matrixQR()(0, 0));
  if (top == 0.0) {
    return 0;
  }
  qr.setThreshold(rel_tol);
  return static_cast<int>(qr.rank());
}

} // namespace sphirf
