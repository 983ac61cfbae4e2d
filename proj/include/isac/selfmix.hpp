#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isac/doppler.hpp"
#include "isac/numerology.hpp"
#include "isac/scene.hpp"

namespace isac {

struct SelfmixConfig {
  int n_symbols = 256;
  int n_antennas = 1;  ///< 1-4, round-robin switched, one per symbol
  double antenna_spacing_wavelengths = 0.5;
  /// Slow-time spacing of consecutive symbols; defaults to T_sym. Packets on a
  /// real link are sparse, so Hz-scale Doppler needs a longer period.
  std::optional<double> symbol_period_s;
};

void validate(const SelfmixConfig& cfg);

/// Slow-time IF samples, one sequence per receive antenna.
struct IfSequence {
  std::vector<CVec> z;            ///< z[a][i]: antenna a, its i-th symbol
  std::vector<double> offset_s;   ///< time of each antenna's first symbol
  double symbol_interval_s = 0.0; ///< spacing within one antenna's sequence
  double wavelength_m = 0.0;
  std::vector<std::string> warnings;

  std::size_t n_antennas() const { return z.size(); }
};

/// z(q) = (1/N_fft) sum over the symbol body of r[n] conj(s[n]).
IfSequence selfmix_sequence(const Scene& scene, const OfdmNumerology& num,
                            const SelfmixConfig& cfg, std::uint64_t seed);

struct Spectrogram {
  RMatrix power;  ///< (segment x frequency bin), zero frequency at bin n/2
  std::vector<double> time_s;
  std::vector<double> frequency_hz;
  std::vector<double> velocity_mps;  ///< f * lambda / 2
};

/// Short-time transform with the segment mean removed before windowing.
Spectrogram doppler_spectrogram(std::span<const cplx> z, double interval_s,
                                double wavelength_m, int stft_len, int hop, Window window);

struct AntennaAngle {
  double azimuth_deg;
  double doppler_hz;
  double cross_phase_rad;
};

/// Coarse azimuth from the phase difference of two antenna sequences at the
/// dominant Doppler bin, corrected for the switching time offset.
AntennaAngle switched_antenna_phase(const IfSequence& seq, std::size_t antenna_a,
                                    std::size_t antenna_b, double spacing_wavelengths);

}  // namespace isac
