#include "isac/array.hpp"

#include <cmath>
#include <string>

namespace isac {

void validate(const ArrayGeometry& geom) {
  auto fail = [](const char* field, const char* what) {
    throw ValidationError(std::string("array.") + field + ": " + what);
  };
  if (geom.n_horizontal < 1) fail("n_horizontal", "must be positive");
  if (geom.n_vertical < 1) fail("n_vertical", "must be positive");
  if (!(geom.spacing_horizontal_wavelengths > 0) ||
      !std::isfinite(geom.spacing_horizontal_wavelengths))
    fail("spacing_horizontal_wavelengths", "must be positive and finite");
  if (!(geom.spacing_vertical_wavelengths > 0) ||
      !std::isfinite(geom.spacing_vertical_wavelengths))
    fail("spacing_vertical_wavelengths", "must be positive and finite");
  const auto& f = geom.fov;
  if (!(f.az_min_deg <= f.az_max_deg) || f.az_min_deg < -90 || f.az_max_deg > 90)
    fail("fov", "azimuth bounds must satisfy -90 <= min <= max <= 90");
  if (!(f.el_min_deg <= f.el_max_deg) || f.el_min_deg < -90 || f.el_max_deg > 90)
    fail("fov", "elevation bounds must satisfy -90 <= min <= max <= 90");
}

ArrayGeometry array_preset(std::string_view name) {
  if (name == "table1") {
    return {.n_horizontal = 8,
            .n_vertical = 4,
            .spacing_horizontal_wavelengths = 0.5,
            .spacing_vertical_wavelengths = 0.5,
            .fov = {-60.0, 60.0, -30.0, 30.0}};
  }
  if (name == "single") return {};
  throw ValidationError("array.preset: unknown preset '" + std::string(name) + "'");
}

Direction3 direction_vector(double azimuth_deg, double elevation_deg) {
  const double az = deg_to_rad(azimuth_deg);
  const double el = deg_to_rad(elevation_deg);
  return {std::cos(el) * std::sin(az), std::cos(el) * std::cos(az), std::sin(el)};
}

CVec steering_vector(const ArrayGeometry& geom, double azimuth_deg, double elevation_deg) {
  const auto dir = direction_vector(azimuth_deg, elevation_deg);
  const double kx = kTwoPi * geom.spacing_horizontal_wavelengths * dir.x;
  const double kz = kTwoPi * geom.spacing_vertical_wavelengths * dir.z;
  CVec psi(geom.n_elements());
  for (int w = 0; w < geom.n_vertical; ++w)
    for (int u = 0; u < geom.n_horizontal; ++u)
      psi[w * geom.n_horizontal + u] = std::polar(1.0, kx * u + kz * w);
  return psi;
}

cplx array_factor(const ArrayGeometry& geom, std::span<const cplx> weights,
                  double azimuth_deg, double elevation_deg) {
  const auto p = static_cast<std::size_t>(geom.n_elements());
  if (weights.size() != p)
    throw ShapeError("array_factor: " + std::to_string(weights.size()) +
                     " weights for " + std::to_string(p) + " elements");
  const auto psi = steering_vector(geom, azimuth_deg, elevation_deg);
  cplx acc{};
  for (std::size_t i = 0; i < p; ++i) acc += std::conj(weights[i]) * psi[i];
  return acc / std::sqrt(static_cast<double>(p));
}

BeamCodebook make_codebook(const ArrayGeometry& geom, std::span<const double> az_grid,
                           std::span<const double> el_grid) {
  validate(geom);
  if (az_grid.empty() || el_grid.empty())
    throw ValidationError("make_codebook: empty angle grid");
  BeamCodebook book;
  book.az_grid.assign(az_grid.begin(), az_grid.end());
  book.el_grid.assign(el_grid.begin(), el_grid.end());
  book.beams.reserve(az_grid.size() * el_grid.size());
  for (double el : el_grid) {
    for (double az : az_grid) {
      if (!geom.fov.contains(az, el))
        throw ValidationError("make_codebook: direction (" + std::to_string(az) + ", " +
                              std::to_string(el) + ") deg outside the field of view");
      book.beams.push_back({az, el, steering_vector(geom, az, el)});
    }
  }
  return book;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n, bool centred) {
  std::vector<double> g(n);
  if (n == 1 && !centred) {
    g[0] = 0.5 * (lo + hi);
    return g;
  }
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = centred ? lo + (hi - lo) * (i + 0.5) / n
                   : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  }
  return g;
}

std::vector<double> stepped_grid(double lo, double hi, double step) {
  if (!(step > 0)) throw ValidationError("stepped_grid: step must be positive");
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  g.reserve(n);
  for (std::size_t i = 0; i < n; ++i) g.push_back(lo + step * static_cast<double>(i));
  return g;
}

}  // namespace isac
