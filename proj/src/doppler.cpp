#include "isac/doppler.hpp"

#include <cmath>

#include "isac/fft.hpp"

namespace isac {

Window parse_window(std::string_view name) {
  if (name == "rectangular" || name == "rect") return Window::kRectangular;
  if (name == "hann") return Window::kHann;
  throw ValidationError("unknown window '" + std::string(name) +
                        "' (expected rectangular or hann)");
}

std::string window_name(Window w) {
  return w == Window::kHann ? "hann" : "rectangular";
}

std::vector<double> window_coefficients(Window w, std::size_t n) {
  std::vector<double> c(n, 1.0);
  if (w == Window::kHann)
    for (std::size_t i = 0; i < n; ++i) c[i] = 0.5 - 0.5 * std::cos(kTwoPi * i / n);
  return c;
}

std::vector<double> velocity_axis(std::size_t n, double interval_s, double wavelength_m) {
  std::vector<double> v(n);
  const double dv = wavelength_m / (2.0 * n * interval_s);
  const auto centre = static_cast<double>(n / 2);
  for (std::size_t i = 0; i < n; ++i) v[i] = (static_cast<double>(i) - centre) * dv;
  return v;
}

CTensor3 doppler_transform(const CirMatrix& cir, Window window) {
  const std::size_t nl = cir.n_taps(), nq = cir.n_symbols(), np = cir.n_elements();
  if (nq < 2) throw ValidationError("doppler_transform: needs at least 2 symbols");
  const auto w = window_coefficients(window, nq);
  CTensor3 out(cir.taps.shape());
  CVec series(nq);
  for (std::size_t l = 0; l < nl; ++l)
    for (std::size_t p = 0; p < np; ++p) {
      for (std::size_t q = 0; q < nq; ++q) series[q] = cir.taps(l, q, p) * w[q];
      fft::forward(series);
      fft::fftshift(series);
      for (std::size_t q = 0; q < nq; ++q) out(l, q, p) = series[q];
    }
  return out;
}

RangeDopplerMap power_map(const CTensor3& spectrum, const CirMatrix& cir, int element) {
  const std::size_t nl = spectrum.dim(0), nq = spectrum.dim(1), np = spectrum.dim(2);
  if (element >= static_cast<int>(np))
    throw ShapeError("power_map: element " + std::to_string(element) + " out of range");
  RangeDopplerMap map{RMatrix({nl, nq}), {}, {}};
  for (std::size_t l = 0; l < nl; ++l)
    for (std::size_t q = 0; q < nq; ++q) {
      double acc = 0.0;
      if (element >= 0) {
        acc = std::norm(spectrum(l, q, static_cast<std::size_t>(element)));
      } else {
        for (std::size_t p = 0; p < np; ++p) acc += std::norm(spectrum(l, q, p));
      }
      map.power(l, q) = acc;
    }
  map.range_axis_m.resize(nl);
  for (std::size_t l = 0; l < nl; ++l) map.range_axis_m[l] = cir.tap_distance_m(l);
  map.range_oversampling = cir.range_oversampling;
  map.velocity_axis_mps = velocity_axis(nq, cir.symbol_interval_s(), cir.wavelength_m());
  return map;
}

RangeDopplerMap doppler_fft(const CirMatrix& cir, Window window, int element) {
  return power_map(doppler_transform(cir, window), cir, element);
}

double two_symbol_velocity(const CirMatrix& cir, std::size_t tap,
                           std::optional<std::size_t> q, int element) {
  const std::size_t nq = cir.n_symbols();
  if (tap >= cir.n_taps() || element < 0 ||
      static_cast<std::size_t>(element) >= cir.n_elements())
    throw ShapeError("two_symbol_velocity: tap or element out of range");
  if (nq < 2) throw ValidationError("two_symbol_velocity: needs at least 2 symbols");
  const auto p = static_cast<std::size_t>(element);
  std::size_t first = 0, last = nq - 1;
  if (q) {
    if (*q + 1 >= nq) throw ShapeError("two_symbol_velocity: symbol index out of range");
    first = *q;
    last = *q + 1;
  }
  cplx acc{};
  for (std::size_t i = first; i < last; ++i) {
    const cplx a = cir.taps(tap, i, p), b = cir.taps(tap, i + 1, p);
    if (a == cplx{} || b == cplx{})
      throw ValidationError("two_symbol_velocity: no energy on tap " + std::to_string(tap));
    acc += b * std::conj(a);
  }
  if (acc == cplx{})
    throw ValidationError("two_symbol_velocity: no energy on tap " + std::to_string(tap));
  return cir.wavelength_m() / (4.0 * kPi * cir.symbol_interval_s()) * std::arg(acc);
}

double folded_velocity(double v, double wavelength_m, double interval_s) {
  const double cycles = 2.0 * v / wavelength_m * interval_s;
  const double folded = cycles - std::floor(cycles + 0.5);
  return folded / interval_s * wavelength_m / 2.0;
}

}  // namespace isac
