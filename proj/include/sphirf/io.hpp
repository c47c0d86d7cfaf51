#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sphirf/spectral_model.hpp"
#include "sphirf/sphere.hpp"

namespace sphirf::io {

struct Record {
  double lon_deg = 0.0;
  double lat_deg = 0.0;
  double value = 0.0;
};

/// Observations in geographic degrees. Longitude in [-180, 360), latitude in [-90, 90].
struct Dataset {
  std::vector<Record> records;
  std::string source;

  std::size_t count() const { return records.size(); }
  std::vector<SpherePoint> points() const;
  Eigen::VectorXd values() const;
};

inline constexpr const char* kDataHeader = "lon_deg,lat_deg,value";

/// Parses `lon_deg,lat_deg,value` CSV. All malformed rows are reported
/// together, with line numbers, in one ValidationError.
Dataset parse_dataset(const std::string& text, const std::string& source = "<memory>");
Dataset read_dataset(const std::filesystem::path& path);
std::string format_dataset(const Dataset& data);

/// Shortest round-trippable text for a double (17 significant digits).
std::string format_double(double x);

/// Flat key=value run configuration. Keys: degrees, family, c, s, coeffs,
/// lmax, sigma2, alpha, grid_deg, seed. Blank lines and '#' comments ignored.
struct RunConfig {
  std::vector<int> degrees;
  std::string family = "power_law"; // power_law | explicit
  std::optional<double> c;
  std::optional<double> s;
  std::vector<double> coeffs;
  std::optional<int> lmax;
  double sigma2 = 0.0;
  std::optional<double> alpha;
  std::optional<double> grid_deg;
  std::uint64_t seed = 0;
};

RunConfig parse_config(const std::string& text);
RunConfig read_config(const std::filesystem::path& path);
std::string format_config(const RunConfig& config);

/// Builds the spectral model described by the configuration.
SpectralModel model_from_config(const RunConfig& config);
/// Inverse of model_from_config for the model-related keys.
RunConfig config_from_model(const SpectralModel& model);

/// Equiangular lon/lat grid: latitudes 90, 90 - r, ..., -90 with each pole
/// appearing once at longitude 0, longitudes 0, r, ..., 360 - r elsewhere.
/// 180 / r must be an integer.
struct Grid {
  std::vector<double> lon_deg;
  std::vector<double> lat_deg;
  std::vector<SpherePoint> points;
};

Grid make_grid(double resolution_deg);

/// Writes via a temporary file in the same directory and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

} // namespace sphirf::io
