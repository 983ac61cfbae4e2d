#pragma once

#include <cstdint>
#include <vector>

#include "isac/angle.hpp"
#include "isac/cir.hpp"
#include "isac/detector.hpp"
#include "isac/doppler.hpp"
#include "isac/scene.hpp"

namespace isac {

struct ProcessingConfig {
  RangeWindow range_window = RangeWindow::kRectangular;
  int range_oversampling = 1;
  int combine = 1;
  bool remove_static = true;
  Window doppler_window = Window::kHann;
  CfarConfig cfar;
  std::vector<double> az_grid{0.0};
  std::vector<double> el_grid{0.0};
  double max_range_m = 0.0;  ///< 0 keeps every tap
  double min_range_m = 0.0;  ///< beam-scan detections closer than this are skipped
};

enum class ReceiveModel { kFrequencyDomain, kTimeDomain };

struct ReceiverConfig {
  ReceiveModel model = ReceiveModel::kFrequencyDomain;
  FrontEndConfig front_end{std::nullopt, 1.0, false};
  /// Scale each element's ADC to its own peak |I| or |Q|.
  bool auto_full_scale = false;
};

/// Received grid Y (N_valid x Q x P). The time-domain model modulates the
/// frame, propagates per element, applies the front end and demodulates.
CTensor3 receive_frame(const Scene& scene, const OfdmNumerology& num,
                       const ArrayGeometry& geom, const ResourceGrid& frame,
                       const ReceiverConfig& rx, std::uint64_t seed,
                       const BeamSchedule* schedule = nullptr);

/// Keeps taps whose distance does not exceed max_range_m (all when <= 0).
CirMatrix crop_range(const CirMatrix& cir, double max_range_m);

struct SensingResult {
  CirMatrix cir;  ///< after combining, static removal and cropping
  CTensor3 spectrum;
  RangeDopplerMap map;
  Mask mask;
  PointCloud cloud;
};

/// Digital-array processing of an estimated channel.
SensingResult process_digital(const CTensor3& h_hat, const OfdmNumerology& num,
                              const ArrayGeometry& geom, const ProcessingConfig& proc);

SensingResult sense_digital(const Scene& scene, const OfdmNumerology& num,
                            const ArrayGeometry& geom, const ProcessingConfig& proc,
                            const ReceiverConfig& rx, std::uint64_t seed);

struct BeamScanResult {
  BeamCodebook codebook;
  CirMatrix cir;  ///< one column per beam after dwell averaging
  BeamScanMap map;
  PointCloud cloud;
};

/// Receive-beam scan: num.n_symbols_per_frame must be a multiple of the
/// codebook size; each beam dwells for that many symbols.
BeamScanResult sense_beam_scan(const Scene& scene, const OfdmNumerology& num,
                               const ArrayGeometry& geom, const BeamCodebook& codebook,
                               const ProcessingConfig& proc, std::uint64_t seed);

struct CombiningGain {
  int n;
  double measured_db;
  double theory_db;  ///< 10 log10(n)
};

/// Monte-Carlo SNR gain of coherent_combine on a static single-element
/// scene. Signal power is |slow-time mean|^2 at the strongest tap; noise is
/// the slow-time variance of taps in [L/4, 3L/4). Per-trial linear gains are
/// averaged before conversion to dB.
std::vector<CombiningGain> measure_combining_gain(const OfdmNumerology& num,
                                                  const std::vector<int>& factors,
                                                  int trials, double snr_db,
                                                  double range_m, std::uint64_t seed);

/// Sub-seeds derived from one run seed.
inline std::uint64_t payload_seed(std::uint64_t seed) { return seed; }
inline std::uint64_t noise_seed(std::uint64_t seed) { return seed + 0x5DEECE66DULL; }

}  // namespace isac
