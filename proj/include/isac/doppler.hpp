#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isac/cir.hpp"
#include "isac/tensor.hpp"

namespace isac {

enum class Window { kRectangular, kHann };

/// "rectangular" / "rect" / "hann"; anything else throws ValidationError.
Window parse_window(std::string_view name);
std::string window_name(Window w);
std::vector<double> window_coefficients(Window w, std::size_t n);

/// Power over (range tap x Doppler bin). Velocity axis is centred: bin
/// floor(Q/2) is zero velocity.
struct RangeDopplerMap {
  RMatrix power;
  std::vector<double> range_axis_m;
  std::vector<double> velocity_axis_mps;
  int range_oversampling = 1;

  std::size_t n_range() const { return power.dim(0); }
  std::size_t n_doppler() const { return power.dim(1); }
};

std::vector<double> velocity_axis(std::size_t n_symbols, double symbol_interval_s,
                                  double wavelength_m);

/// Windowed unitary slow-time DFT of every (tap, element) series, centred.
CTensor3 doppler_transform(const CirMatrix& cir, Window window);

/// |transform|^2 of one element, or summed over elements when element < 0.
RangeDopplerMap doppler_fft(const CirMatrix& cir, Window window, int element = -1);
RangeDopplerMap power_map(const CTensor3& spectrum, const CirMatrix& cir, int element = -1);

/// lambda / (4 pi T) * arg(h(q+1) conj(h(q))). Without q the product is
/// averaged over every consecutive pair first.
double two_symbol_velocity(const CirMatrix& cir, std::size_t tap,
                           std::optional<std::size_t> q = std::nullopt, int element = 0);

/// Apparent velocity after slow-time sampling at interval T: folds 2v/lambda
/// into [-1/(2T), 1/(2T)).
double folded_velocity(double v, double wavelength_m, double interval_s);

}  // namespace isac
