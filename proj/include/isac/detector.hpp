#pragma once

#include <vector>

#include "isac/angle.hpp"
#include "isac/array.hpp"
#include "isac/cir.hpp"
#include "isac/doppler.hpp"
#include "isac/tensor.hpp"

namespace isac {

struct CfarConfig {
  int guard_range = 2;
  int guard_doppler = 2;
  int training_range = 8;
  int training_doppler = 4;
  double false_alarm_rate = 1e-3;
  /// Cells more than this far below the map maximum are never detected.
  double relative_floor_db = 150.0;
  /// A local maximum sharing a range tap or Doppler bin (+-1) with a stronger
  /// kept peak is dropped when it is more than this many dB weaker and also
  /// below the envelope (sidelobe_scale_bins / (pi d))^2, d being the distance
  /// along the other axis in bins (range bins divided by the oversampling).
  double sidelobe_margin_db = 12.0;
  double sidelobe_scale_bins = 3.5;
};

void validate(const CfarConfig& cfg);

/// Cell-averaging CFAR. Doppler (column) axis wraps, range (row) axis is
/// truncated at the edges. alpha = T (Pfa^(-1/T) - 1) with T the number of
/// training cells actually used for that cell.
Mask cfar_2d(const RMatrix& power, const CfarConfig& cfg);
Mask cfar_2d(const RangeDopplerMap& map, const CfarConfig& cfg);

/// Range-only CA-CFAR over a profile of powers (uses the range fields of cfg).
std::vector<std::uint8_t> cfar_1d(std::span<const double> power, const CfarConfig& cfg);

struct PeakCell {
  std::size_t range_bin;
  std::size_t doppler_bin;
  double power;
};

/// Detected local maxima (8-neighbourhood, Doppler wraps) after sidelobe
/// blanking, strongest first.
std::vector<PeakCell> pick_peaks(const RMatrix& power, const Mask& mask,
                                 const CfarConfig& cfg, double range_oversampling = 1.0);

struct Detection {
  double range_m = 0.0;
  double velocity_mps = 0.0;
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double intensity = 0.0;  ///< linear power
  double x_m = 0.0;
  double y_m = 0.0;
  double z_m = 0.0;
};

using PointCloud = std::vector<Detection>;

/// range * (cos el sin az, cos el cos az, sin el).
Direction3 to_cartesian(double range_m, double azimuth_deg, double elevation_deg);

struct Spherical {
  double range_m;
  double azimuth_deg;
  double elevation_deg;
};
Spherical to_spherical(double x, double y, double z);

Detection make_detection(double range_m, double velocity_mps, double azimuth_deg,
                         double elevation_deg, double intensity);

/// Digital-array extraction. `spectrum` is doppler_transform of the CIR that
/// produced `map`; angles come from the Bartlett argmax of each peak cell's
/// element snapshot.
PointCloud extract_pointcloud(const RangeDopplerMap& map, const Mask& mask,
                              const CTensor3& spectrum, const ArrayGeometry& geom,
                              std::span<const double> az_grid,
                              std::span<const double> el_grid, const CfarConfig& cfg);

/// Single-element extraction: angles reported as boresight.
PointCloud extract_pointcloud(const RangeDopplerMap& map, const Mask& mask,
                              const CfarConfig& cfg);

/// Beam-scan extraction: range CFAR on the strongest beam per tap, angle from
/// the beam index. Taps closer than `min_range_m` are skipped.
PointCloud extract_pointcloud_beam_scan(const BeamScanMap& map, const CfarConfig& cfg,
                                        double min_range_m);

void sort_by_intensity(PointCloud& cloud);

}  // namespace isac
