#include "sphirf/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "sphirf/errors.hpp"

namespace sphirf::io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return {};
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(s);
  while (std::getline(is, field, sep)) {
    out.push_back(trim(field));
  }
  if (!s.empty() && s.back() == sep) {
    out.emplace_back();
  }
  return out;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

template <class Int>
std::optional<Int> to_integer(const std::string& s) {
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

double require_double(const std::string& key, const std::string& value) {
  auto v = to_double(value);
  if (!v) {
    throw ValidationError("config: key '" + key + "' expects a number, got '" + value + "'");
  }
  return *v;
}

} // namespace

std::vector<SpherePoint> Dataset::points() const {
  std::vector<SpherePoint> pts;
  pts.reserve(records.size());
  for (const auto& r : records) {
    pts.push_back(SpherePoint::from_lonlat_deg(r.lon_deg, r.lat_deg));
  }
  return pts;
}

Eigen::VectorXd Dataset::values() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = records[i].value;
  }
  return v;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Dataset parse_dataset(const std::string& text, const std::string& source) {
  Dataset data;
  data.source = source;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::ostringstream errors;
  int n_errors = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (!header_seen) {
      if (t != kDataHeader) {
        throw ValidationError(source + ":" + std::to_string(line_no) + ": expected header '" + kDataHeader + "'");
      }
      header_seen = true;
      continue;
    }
    if (t.empty()) {
      continue;
    }
    const auto fields = split(t, ',');
    auto report = [&](const std::string& msg) {
      errors << "\n  " << source << ":" << line_no << ": " << msg;
      ++n_errors;
    };
    if (fields.size() != 3) {
      report("expected 3 fields, got " + std::to_string(fields.size()));
      continue;
    }
    const auto lon = to_double(fields[0]);
    const auto lat = to_double(fields[1]);
    const auto value = to_double(fields[2]);
    if (!lon || !lat || !value) {
      report("non-numeric field");
      continue;
    }
    if (!(*lon >= -180.0 && *lon < 360.0)) {
      report("longitude " + fields[0] + " outside [-180, 360)");
      continue;
    }
    if (!(*lat >= -90.0 && *lat <= 90.0)) {
      report("latitude " + fields[1] + " outside [-90, 90]");
      continue;
    }
    data.records.push_back({*lon, *lat, *value});
  }
  if (!header_seen) {
    throw ValidationError(source + ": missing header '" + std::string(kDataHeader) + "'");
  }
  if (n_errors > 0) {
    throw ValidationError(std::to_string(n_errors) + " malformed row(s):" + errors.str());
  }
  return data;
}

Dataset read_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_text(path), path.string());
}

std::string format_dataset(const Dataset& data) {
  std::string out = std::string(kDataHeader) + "\n";
  for (const auto& r : data.records) {
    out += format_double(r.lon_deg) + "," + format_double(r.lat_deg) + "," + format_double(r.value) + "\n";
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  static const std::set<std::string> known = {"degrees", "family", "c",     "s",        "coeffs",
                                              "lmax",    "sigma2", "alpha", "grid_deg", "seed"};
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!known.count(key)) {
      throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (key == "degrees") {
      cfg.degrees.clear();
      if (!value.empty()) {
        for (const auto& f : split(value, ',')) {
          const auto l = to_integer<int>(f);
          if (!l || *l < 0) {
            throw ValidationError("config: degrees must be nonnegative integers, got '" + f + "'");
          }
          cfg.degrees.push_back(*l);
        }
      }
    } else if (key == "family") {
      if (value != "power_law" && value != "explicit") {
        throw ValidationError("config: family must be power_law or explicit, got '" + value + "'");
      }
      cfg.family = value;
    } else if (key == "c") {
      cfg.c = require_double(key, value);
    } else if (key == "s") {
      cfg.s = require_double(key, value);
    } else if (key == "coeffs") {
      cfg.coeffs.clear();
      for (const auto& f : split(value, ',')) {
        cfg.coeffs.push_back(require_double(key, f));
      }
    } else if (key == "lmax") {
      const auto l = to_integer<int>(value);
      if (!l || *l < 0) {
        throw ValidationError("config: lmax must be a nonnegative integer");
      }
      cfg.lmax = *l;
    } else if (key == "sigma2") {
      cfg.sigma2 = require_double(key, value);
    } else if (key == "alpha") {
      cfg.alpha = require_double(key, value);
    } else if (key == "grid_deg") {
      cfg.grid_deg = require_double(key, value);
    } else if (key == "seed") {
      const auto s = to_integer<std::uint64_t>(value);
      if (!s) {
        throw ValidationError("config: seed must be an unsigned integer");
      }
      cfg.seed = *s;
    }
  }
  return cfg;
}

RunConfig read_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

std::string format_config(const RunConfig& config) {
  std::ostringstream os;
  os << "degrees=";
  for (std::size_t i = 0; i < config.degrees.size(); ++i) {
    os << (i ? "," : "") << config.degrees[i];
  }
  os << "\nfamily=" << config.family << "\n";
  if (config.c) {
    os << "c=" << format_double(*config.c) << "\n";
  }
  if (config.s) {
    os << "s=" << format_double(*config.s) << "\n";
  }
  if (!config.coeffs.empty()) {
    os << "coeffs=";
    for (std::size_t i = 0; i < config.coeffs.size(); ++i) {
      os << (i ? "," : "") << format_double(config.coeffs[i]);
    }
    os << "\n";
  }
  if (config.lmax) {
    os << "lmax=" << *config.lmax << "\n";
  }
  os << "sigma2=" << format_double(config.sigma2) << "\n";
  if (config.alpha) {
    os << "alpha=" << format_double(*config.alpha) << "\n";
  }
  if (config.grid_deg) {
    os << "grid_deg=" << format_double(*config.grid_deg) << "\n";
  }
  os << "seed=" << config.seed << "\n";
  return os.str();
}

SpectralModel model_from_config(const RunConfig& config) {
  const DegreeSet degrees(config.degrees);
  if (config.family == "power_law") {
    if (!config.c || !config.s || !config.lmax) {
      throw ValidationError("config: power_law family needs keys c, s and lmax");
    }
    return power_law_model(degrees, *config.c, *config.s, config.sigma2, *config.lmax);
  }
  if (config.coeffs.empty()) {
    throw ValidationError("config: explicit family needs a coeffs list");
  }
  if (config.lmax && *config.lmax + 1 != static_cast<int>(config.coeffs.size())) {
    throw ValidationError("config: lmax disagrees with the length of coeffs");
  }
  return SpectralModel(degrees, config.coeffs, config.sigma2);
}

RunConfig config_from_model(const SpectralModel& model) {
  RunConfig cfg;
  cfg.degrees = model.degrees().degrees();
  cfg.lmax = model.lmax();
  cfg.sigma2 = model.sigma2();
  if (model.family().kind == CoefficientFamily::Kind::PowerLaw) {
    cfg.family = "power_law";
    cfg.c = model.family().scale;
    cfg.s = model.family().exponent;
  } else {
    cfg.family = "explicit";
    cfg.coeffs = model.coefficients();
  }
  return cfg;
}

Grid make_grid(double resolution_deg) {
  if (!(resolution_deg > 0.0) || !(resolution_deg <= 180.0)) {
    throw ValidationError("grid resolution must be in (0, 180] degrees");
  }
  const double steps = 180.0 / resolution_deg;
  const long n_lat = std::lround(steps);
  if (std::abs(steps - static_cast<double>(n_lat)) > 1e-9) {
    throw ValidationError("grid resolution must divide 180 degrees");
  }
  const long n_lon = std::lround(360.0 / resolution_deg);
  Grid grid;
  for (long i = 0; i <= n_lat; ++i) {
    const double lat = 90.0 - static_cast<double>(i) * resolution_deg;
    if (i == 0 || i == n_lat) {
      grid.lon_deg.push_back(0.0);
      grid.lat_deg.push_back(i == 0 ? 90.0 : -90.0);
      continue;
    }
    for (long j = 0; j < n_lon; ++j) {
      grid.lon_deg.push_back(static_cast<double>(j) * resolution_deg);
      grid.lat_deg.push_back(lat);
    }
  }
  grid.points.reserve(grid.lon_deg.size());
  for (std::size_t k = 0; k < grid.lon_deg.size(); ++k) {
    grid.points.push_back(SpherePoint::from_lonlat_deg(grid.lon_deg[k], grid.lat_deg[k]));
  }
  return grid;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ValidationError("cannot write '" + tmp.string() + "'");
    }
    out << content;
    out.flush();
    if (!out) {
      throw ValidationError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ValidationError("cannot replace '" + path.string() + "'");
  }
}

} // namespace sphirf::io
