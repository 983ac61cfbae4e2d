#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "isac/common.hpp"

namespace isac {

struct FieldOfView {
  double az_min_deg = -90.0;
  double az_max_deg = 90.0;
  double el_min_deg = -90.0;
  double el_max_deg = 90.0;

  bool contains(double az_deg, double el_deg) const {
    return az_deg >= az_min_deg && az_deg <= az_max_deg && el_deg >= el_min_deg &&
           el_deg <= el_max_deg;
  }
};

/// Uniform planar array in the x-z plane, boresight +y. Element p sits at
/// column u = p % n_horizontal, row w = p / n_horizontal.
struct ArrayGeometry {
  int n_horizontal = 1;
  int n_vertical = 1;
  double spacing_horizontal_wavelengths = 0.5;
  double spacing_vertical_wavelengths = 0.5;
  FieldOfView fov;

  int n_elements() const { return n_horizontal * n_vertical; }
};

void validate(const ArrayGeometry& geom);

/// "table1" (8 x 4, half-wavelength) and "single" (1 x 1).
ArrayGeometry array_preset(std::string_view name);

/// Unit vector (cos(el) sin(az), cos(el) cos(az), sin(el)).
struct Direction3 {
  double x, y, z;
};
Direction3 direction_vector(double azimuth_deg, double elevation_deg);

CVec steering_vector(const ArrayGeometry& geom, double azimuth_deg, double elevation_deg);

/// weights^H * steering_vector / sqrt(P).
cplx array_factor(const ArrayGeometry& geom, std::span<const cplx> weights,
                  double azimuth_deg, double elevation_deg);

struct Beam {
  double azimuth_deg;
  double elevation_deg;
  CVec weights;
};

/// Phase-only beams on an az x el grid, azimuth index fastest.
struct BeamCodebook {
  std::vector<double> az_grid;
  std::vector<double> el_grid;
  std::vector<Beam> beams;

  std::size_t size() const { return beams.size(); }
  std::size_t index(std::size_t az_i, std::size_t el_i) const {
    return el_i * az_grid.size() + az_i;
  }
};

BeamCodebook make_codebook(const ArrayGeometry& geom, std::span<const double> az_grid,
                           std::span<const double> el_grid);

/// n evenly spaced points over [lo, hi] (bin centres when `centred`).
std::vector<double> linear_grid(double lo, double hi, std::size_t n, bool centred = false);
/// Points lo, lo+step, ... up to hi (inclusive within 1e-9).
std::vector<double> stepped_grid(double lo, double hi, double step);

}  // namespace isac
