#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isac/common.hpp"

namespace isac {

/// OFDM parameter set. Valid subcarriers are split symmetrically around an
/// unused DC bin.
struct OfdmNumerology {
  double carrier_freq_hz = 0.0;
  double sample_rate_hz = 0.0;
  int fft_size = 0;
  int n_valid_subcarriers = 0;
  int cp_len_samples = 0;
  int n_symbols_per_frame = 0;

  int samples_per_symbol() const { return fft_size + cp_len_samples; }
  bool operator==(const OfdmNumerology&) const = default;
};

struct DerivedParams {
  double subcarrier_spacing_hz;
  double symbol_duration_s;
  double bandwidth_hz;
  double range_resolution_m;
  double wavelength_m;
  double tap_distance_m;           ///< c / (2 f_s), one delay tap
  double max_velocity_two_symbol_mps;  ///< lambda / (4 T_sym)
  double velocity_resolution_mps;  ///< lambda / (2 Q T_sym)
};

/// Throws ValidationError naming the first offending field.
void validate(const OfdmNumerology& num);

DerivedParams derive_params(const OfdmNumerology& num);

/// Named presets: "table1-60ghz", "nr100-30khz", "wifi20-5ghz".
OfdmNumerology numerology_preset(std::string_view name);
std::vector<std::string> numerology_preset_names();

/// Centered FFT bin (negative below DC) for every valid-subcarrier row.
std::vector<int> centered_bins(const OfdmNumerology& num);

/// Frequency-domain payload, one column per OFDM symbol.
class ResourceGrid {
 public:
  ResourceGrid() = default;
  ResourceGrid(int n_subcarriers, int n_symbols, std::vector<int> bins);

  int n_subcarriers() const { return n_subcarriers_; }
  int n_symbols() const { return n_symbols_; }
  const std::vector<int>& subcarrier_bins() const { return bins_; }

  cplx& at(int m, int q) { return cells_[idx(m, q)]; }
  const cplx& at(int m, int q) const { return cells_[idx(m, q)]; }

  /// Contiguous column of one symbol.
  std::span<cplx> symbol(int q) {
    return {cells_.data() + static_cast<std::size_t>(q) * n_subcarriers_,
            static_cast<std::size_t>(n_subcarriers_)};
  }
  std::span<const cplx> symbol(int q) const {
    return {cells_.data() + static_cast<std::size_t>(q) * n_subcarriers_,
            static_cast<std::size_t>(n_subcarriers_)};
  }

  bool operator==(const ResourceGrid&) const = default;

 private:
  std::size_t idx(int m, int q) const {
    return static_cast<std::size_t>(q) * n_subcarriers_ + m;
  }

  int n_subcarriers_ = 0;
  int n_symbols_ = 0;
  std::vector<int> bins_;
  CVec cells_;
};

/// Known payload drawn from the unit-modulus QPSK alphabet.
ResourceGrid generate_frame(const OfdmNumerology& num, std::uint64_t seed);

/// Unitary IFFT per symbol with cyclic prefix; Q (N_fft + N_cp) samples.
CVec modulate(const ResourceGrid& grid, const OfdmNumerology& num);

/// CP removal and unitary FFT per symbol.
ResourceGrid demodulate(std::span<const cplx> samples, const OfdmNumerology& num);

/// Peak-to-average power ratio of a sample stream in dB.
double papr_db(std::span<const cplx> samples);

}  // namespace isac
