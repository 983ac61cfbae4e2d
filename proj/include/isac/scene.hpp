#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isac/array.hpp"
#include "isac/common.hpp"
#include "isac/numerology.hpp"
#include "isac/tensor.hpp"

namespace isac {

/// Point reflector. Positive radial velocity means approaching.
struct Scatterer {
  double range_m = 1.0;
  double radial_velocity_mps = 0.0;
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double reflectivity = 1.0;  ///< linear amplitude, path loss folded in
};

struct Scene {
  std::vector<Scatterer> scatterers;
  double si_amplitude = 0.0;      ///< linear, zero delay
  double si_suppression_db = 0.0; ///< cancellation before the ADC
  double noise_power = 0.0;       ///< per complex sample

  /// si_amplitude * 10^(-si_suppression_db / 20).
  double residual_si() const;
};

void validate(const Scene& scene);

struct FrontEndConfig {
  std::optional<int> adc_bits;  ///< nullopt: ideal converter
  double full_scale = 1.0;
  bool enabled = true;
};

/// Per-symbol transmit/receive beam weights for beam-scan sensing.
struct BeamSchedule {
  ArrayGeometry tx_geometry;
  ArrayGeometry rx_geometry;
  struct Slot {
    CVec tx_weights;
    CVec rx_weights;
  };
  std::vector<Slot> slots;  ///< one per OFDM symbol
};

/// Receive beams cycle through `codebook` with `dwell` consecutive symbols
/// each; the transmitter holds `tx_weights` on `tx_geometry` throughout.
BeamSchedule receive_scan_schedule(const ArrayGeometry& rx_geometry,
                                   const BeamCodebook& codebook, int dwell,
                                   const ArrayGeometry& tx_geometry, CVec tx_weights);

/// Default transmitter for beam scanning: one element, flat pattern.
BeamSchedule receive_scan_schedule(const ArrayGeometry& rx_geometry,
                                   const BeamCodebook& codebook, int dwell);

/// Frequency-domain channel H(m, q, p), shape (N_valid x Q x P).
/// Digital mode (no schedule): P = array elements. Beam-scan mode: P = 1 and
/// each scatterer is weighted by the Tx and Rx array factors of symbol q.
CTensor3 synth_channel(const Scene& scene, const OfdmNumerology& num,
                       const ArrayGeometry& geom,
                       const BeamSchedule* schedule = nullptr);

/// Y = H * X + W with circularly-symmetric Gaussian W of variance noise_power.
CTensor3 apply_channel(const CTensor3& h, const ResourceGrid& x, double noise_power,
                       std::uint64_t seed);

/// Clip I and Q to +-full_scale, then mid-rise quantize to adc_bits.
CVec front_end(std::span<const cplx> samples, const FrontEndConfig& fe);

/// Largest |I| or |Q| in the stream; used to scale an ADC to its input.
double peak_component(std::span<const cplx> samples);

struct PropagationOptions {
  double t0_offset_s = 0.0;  ///< absolute time of tx sample 0 (Doppler reference)
  std::uint64_t seed = 0;
  const ArrayGeometry* geometry = nullptr;  ///< receive element phase, if set
  int element = 0;
  bool include_si = true;
  bool add_noise = true;
};

/// r[n] = g_SI s[n] + sum_k a_k s[n - d_k] exp(j 2 pi f_D,k t_n) psi_p + w[n],
/// with integer-sample delays d_k = round(tau_k f_s). Output length covers
/// the input plus the largest delay.
CVec propagate_time_domain(const Scene& scene, std::span<const cplx> tx_samples,
                           const OfdmNumerology& num, const PropagationOptions& opts = {});

/// Integer delay in samples realised for a scatterer.
long delay_samples(const Scatterer& s, const OfdmNumerology& num);
double doppler_hz(const Scatterer& s, const OfdmNumerology& num);

/// Fills `out` with CN(0, noise_power) samples.
void add_complex_noise(std::span<cplx> out, double noise_power, std::uint64_t seed);

}  // namespace isac
