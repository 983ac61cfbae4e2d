#pragma once

#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "isac/common.hpp"
#include "isac/numerology.hpp"

namespace testing {

using isac::cplx;
using isac::CVec;

/// Plain O(N^2) unitary DFT, used as an oracle against the FFT wrapper.
inline CVec naive_dft(const CVec& x, int sign) {
  const std::size_t n = x.size();
  CVec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{};
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = sign * 2.0 * M_PI * static_cast<double>((k * i) % n) / n;
      acc += x[i] * cplx{std::cos(ang), std::sin(ang)};
    }
    out[k] = acc / std::sqrt(static_cast<double>(n));
  }
  return out;
}

inline double energy(const CVec& x) {
  double e = 0.0;
  for (const auto& v : x) e += std::norm(v);
  return e;
}

/// Small numerology for fast property tests.
inline isac::OfdmNumerology small_numerology(int q = 16) {
  return {.carrier_freq_hz = 60e9,
          .sample_rate_hz = 1.2288e9,
          .fft_size = 64,
          .n_valid_subcarriers = 56,
          .cp_len_samples = 16,
          .n_symbols_per_frame = q};
}

template <typename F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

inline bool contains(const std::string& s, const std::string& needle) {
  return s.find(needle) != std::string::npos;
}

}  // namespace testing
