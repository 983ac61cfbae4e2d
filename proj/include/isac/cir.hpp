#pragma once

#include <span>
#include <vector>

#include "isac/common.hpp"
#include "isac/numerology.hpp"
#include "isac/tensor.hpp"

namespace isac {

/// Delay-domain channel taps, shape (L x Q x P). Tap l is l * tap_spacing_s of
/// round-trip delay; slow-time samples are symbol_interval_s apart.
struct CirMatrix {
  CTensor3 taps;
  OfdmNumerology num;
  int range_oversampling = 1;
  int combined_symbols = 1;

  std::size_t n_taps() const { return taps.dim(0); }
  std::size_t n_symbols() const { return taps.dim(1); }
  std::size_t n_elements() const { return taps.dim(2); }

  double tap_spacing_s() const {
    return 1.0 / (num.sample_rate_hz * range_oversampling);
  }
  double tap_distance_m(double l) const {
    return l * kSpeedOfLight * tap_spacing_s() / 2.0;
  }
  double symbol_interval_s() const {
    return combined_symbols * num.samples_per_symbol() / num.sample_rate_hz;
  }
  double wavelength_m() const { return kSpeedOfLight / num.carrier_freq_hz; }
};

struct RangeProfile {
  std::vector<double> magnitude;
  double tap_distance_m = 0.0;

  std::size_t peak_index() const;
};

/// H_hat = Y / X. Rejects payload cells with |X| < 0.5.
CTensor3 estimate_channel(const CTensor3& y, const ResourceGrid& x);

enum class RangeWindow { kRectangular, kHann };

/// Places valid rows at their centred bins of an (oversampling * N_fft)-point
/// spectrum and takes the unitary inverse transform of every (q, p) column.
CirMatrix to_cir(const CTensor3& h_hat, const OfdmNumerology& num, int oversampling = 1,
                 RangeWindow window = RangeWindow::kRectangular);

/// Forward transform of a CIR back to the valid subcarriers (inverse of to_cir
/// with a rectangular window).
CTensor3 to_frequency(const CirMatrix& cir);

/// Subtracts the slow-time mean of every (tap, element) series.
CirMatrix remove_static(CirMatrix cir);

/// Averages n consecutive symbols; Q' = Q / n.
CirMatrix coherent_combine(const CirMatrix& cir, int n);

/// |mean over symbols| of one element, or of the element sum when element < 0.
RangeProfile range_profile(const CirMatrix& cir, int element = 0);

/// Sub-tap peak position from a 3-point parabola through values[i-1..i+1].
double quadratic_peak(std::span<const double> values, std::size_t i);

}  // namespace isac
