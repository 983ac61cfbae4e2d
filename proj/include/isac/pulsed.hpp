#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/numerology.hpp"
#include "isac/scene.hpp"

namespace isac {

struct SwitchConfig {
  double switch_delay_s = 0.0;  ///< T_sw, end of packet to start of capture
  double rx_window_s = 0.0;
  CVec packet;
};

void validate(const SwitchConfig& cfg, const OfdmNumerology& num);

/// R_min = c T_sw / 2.
double blind_zone(const SwitchConfig& cfg);

/// First captured sample, counted from the first transmitted sample:
/// N_packet + ceil(T_sw f_s).
long capture_start_index(const SwitchConfig& cfg, const OfdmNumerology& num);

struct PulseCapture {
  CVec samples;
  long capture_start = 0;
  std::vector<long> captured_echo_samples;  ///< per scatterer
  std::vector<std::string> warnings;
};

/// Echoes (integer-sample delays) overlapping the receive window, plus noise.
/// No self-interference: the transmitter is off while receiving.
PulseCapture simulate_pulse_cycle(const Scene& scene, const SwitchConfig& cfg,
                                  const OfdmNumerology& num, std::uint64_t seed);

struct RangingConfig {
  double max_range_m = 30.0;
  double threshold_mads = 6.0;  ///< median + k * 1.4826 * MAD of the statistic
  /// Peaks further than this below the strongest one are not reported.
  double dynamic_range_db = 20.0;
  int max_echoes = 8;
};

struct RangePeak {
  double range_m;
  long lag;          ///< absolute delay = capture_start + lag samples
  double statistic;
};

struct RangingResult {
  std::vector<RangePeak> peaks;  ///< strongest first
  std::vector<double> statistic; ///< indexed by lag - min_lag
  long min_lag = 0;
  double threshold = 0.0;
};

/// Correlation of the capture with the packet, normalised by the root energy
/// of the packet samples overlapping the window at each lag. Echoes are
/// extracted strongest first, each subtracted before the next search.
RangingResult matched_filter_ranging(const PulseCapture& capture, const SwitchConfig& cfg,
                                     const OfdmNumerology& num, const RangingConfig& rcfg);

struct SweepPoint {
  double range_m;
  double detection_rate;
  int trials;
};

/// Detection rate versus range: a trial counts when a reported peak lies
/// within one sample of the true lag. `snr_db` is echo power per sample over
/// noise power.
std::vector<SweepPoint> blind_zone_sweep(const SwitchConfig& cfg, const OfdmNumerology& num,
                                         const std::vector<double>& ranges_m, double snr_db,
                                         int trials, const RangingConfig& rcfg,
                                         std::uint64_t seed);

/// One OFDM symbol (with CP) of the numerology, used as the probe packet.
CVec default_packet(const OfdmNumerology& num, std::uint64_t seed);

}  // namespace isac
