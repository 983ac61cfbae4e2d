#pragma once

#include <span>
#include <utility>
#include <vector>

#include "isac/array.hpp"
#include "isac/cir.hpp"
#include "isac/doppler.hpp"
#include "isac/tensor.hpp"

namespace isac {

/// Bartlett power over an (elevation x azimuth) grid.
struct AngleSpectrum {
  std::vector<double> az_grid;
  std::vector<double> el_grid;
  RMatrix power;  ///< (n_el x n_az)

  /// (azimuth_deg, elevation_deg) of the strongest cell.
  std::pair<double, double> argmax() const;
};

/// Conventional beamformer with steering vectors precomputed for one grid.
class BartlettBeamformer {
 public:
  BartlettBeamformer(const ArrayGeometry& geom, std::vector<double> az_grid,
                     std::vector<double> el_grid);

  /// |psi(az, el)^H x|^2 / P for every grid point.
  AngleSpectrum spectrum(std::span<const cplx> snapshot) const;
  std::size_t n_elements() const { return n_elements_; }

 private:
  std::size_t n_elements_;
  std::vector<double> az_grid_;
  std::vector<double> el_grid_;
  std::vector<CVec> steering_;  ///< el-major, az fastest
};

AngleSpectrum angle_spectrum(std::span<const cplx> snapshot, const ArrayGeometry& geom,
                             std::span<const double> az_grid,
                             std::span<const double> el_grid);

/// Per-beam range profile power arranged on the codebook grid.
struct BeamScanMap {
  std::vector<double> az_grid;
  std::vector<double> el_grid;
  std::vector<double> range_axis_m;
  Tensor<double, 3> power;  ///< (tap x n_el x n_az)

  /// Strongest tap of each beam, (n_el x n_az).
  RMatrix peak_map() const;
  /// Beam (az index, el index) holding the largest peak-tap power.
  std::pair<std::size_t, std::size_t> argmax_beam() const;
};

BeamScanMap beam_scan_map(std::span<const RangeProfile> profiles,
                          const BeamCodebook& codebook);

/// Power over (range tap x Doppler bin x azimuth x elevation).
struct RadarCube {
  RTensor4 power;
  std::vector<double> range_axis_m;
  std::vector<double> velocity_axis_mps;
  std::vector<double> az_grid;
  std::vector<double> el_grid;
};

/// Slow-time transform per tap and element, then a Bartlett spectrum for every
/// range-Doppler cell. Only the first `max_taps` taps are kept when non-zero.
RadarCube build_cube(const CirMatrix& cir, const ArrayGeometry& geom,
                     std::span<const double> az_grid, std::span<const double> el_grid,
                     Window window, std::size_t max_taps = 0);

}  // namespace isac
