#include "helpers.hpp"
#include "isac/cir.hpp"
#include "isac/doppler.hpp"
#include "isac/scene.hpp"

using namespace isac;
using namespace testing;

namespace {

OfdmNumerology table1(int q) {
  auto n = numerology_preset("table1-60ghz");
  n.n_symbols_per_frame = q;
  return n;
}

CirMatrix cir_of(const Scene& sc, const OfdmNumerology& num) {
  return to_cir(synth_channel(sc, num, array_preset("single")), num);
}

std::size_t argmax_doppler(const RangeDopplerMap& m, std::size_t tap) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < m.n_doppler(); ++k)
    if (m.power(tap, k) > m.power(tap, best)) best = k;
  return best;
}

}  // namespace

TEST_CASE("velocity resolution of the table preset") {
  const auto num = table1(256);
  const auto cir = cir_of(Scene{}, num);
  const auto axis = velocity_axis(256, cir.symbol_interval_s(), cir.wavelength_m());
  CHECK(axis[128] == 0.0);
  const double dv = kSpeedOfLight / 60e9 / (2 * 256 * 1300 / 1.2288e9);
  CHECK(axis[129] - axis[128] == doctest::Approx(dv));
  CHECK(dv == doctest::Approx(9.2241).epsilon(1e-4));
}

TEST_CASE("static scatterer sits in the zero-velocity bin") {
  const auto num = table1(32);
  Scene sc;
  sc.scatterers.push_back({3.0, 0.0, 0.0, 0.0, 1.0});
  const auto m = doppler_fft(cir_of(sc, num), Window::kRectangular);
  CHECK(argmax_doppler(m, 25) == 16);
  for (std::size_t k = 0; k < 32; ++k)
    if (k != 16) CHECK(m.power(25, k) < 1e-20 * m.power(25, 16));
}

TEST_CASE("mover peaks at the nearest velocity bin") {
  const auto num = table1(256);
  Scene sc;
  sc.scatterers.push_back({3.0, 5.0, 0.0, 0.0, 1.0});
  const auto m = doppler_fft(cir_of(sc, num), Window::kHann);
  const std::size_t k = argmax_doppler(m, 25);
  CHECK(k == 129);
  CHECK(m.velocity_axis_mps[k] == doctest::Approx(9.2241).epsilon(1e-4));

  Scene neg;
  neg.scatterers.push_back({3.0, -2 * 9.22411, 0.0, 0.0, 1.0});
  CHECK(argmax_doppler(doppler_fft(cir_of(neg, num), Window::kHann), 25) == 126);
}

TEST_CASE("velocities beyond the unambiguous interval fold") {
  const auto num = table1(64);
  const auto cir = cir_of(Scene{}, num);
  const double lam = cir.wavelength_m(), t = cir.symbol_interval_s();
  const double vmax = lam / (4 * t);
  const double v = vmax * 1.3;
  const double folded = folded_velocity(v, lam, t);
  CHECK(folded == doctest::Approx(v - 2 * vmax).epsilon(1e-9));
  CHECK(folded_velocity(0.2 * vmax, lam, t) == doctest::Approx(0.2 * vmax));

  Scene sc;
  sc.scatterers.push_back({3.0, v, 0.0, 0.0, 1.0});
  const auto c = cir_of(sc, num);
  CHECK(two_symbol_velocity(c, 25) == doctest::Approx(folded).epsilon(1e-6));
  // lambda / (2 tau) aliases to zero
  CHECK(std::abs(folded_velocity(lam / (2 * t), lam, t)) < 1e-9);
}

TEST_CASE("two-symbol velocity") {
  const auto num = table1(8);
  Scene sc;
  sc.scatterers.push_back({3.0, 7.3, 0.0, 0.0, 1.0});
  const auto c = cir_of(sc, num);
  CHECK(std::abs(two_symbol_velocity(c, 25, 0) - 7.3) < 1e-6);
  CHECK(std::abs(two_symbol_velocity(c, 25) - 7.3) < 1e-6);

  Scene back;
  back.scatterers.push_back({3.0, -7.3, 0.0, 0.0, 1.0});
  CHECK(two_symbol_velocity(cir_of(back, num), 25) == doctest::Approx(-two_symbol_velocity(c, 25)));

  const auto silent = cir_of(Scene{}, num);
  CHECK(contains(error_of([&] { two_symbol_velocity(silent, 25); }), "no energy"));
}

TEST_CASE("FFT and two-symbol estimates agree within one bin") {
  const auto num = table1(128);
  for (double v : {-40.0, -9.0, 13.0, 55.0}) {
    Scene sc;
    sc.scatterers.push_back({3.0, v, 0.0, 0.0, 1.0});
    const auto c = cir_of(sc, num);
    const auto m = doppler_fft(c, Window::kHann);
    const double dv = m.velocity_axis_mps[1] - m.velocity_axis_mps[0];
    CHECK(std::abs(m.velocity_axis_mps[argmax_doppler(m, 25)] - two_symbol_velocity(c, 25)) <= dv);
  }
}

TEST_CASE("windows") {
  CHECK(parse_window("hann") == Window::kHann);
  CHECK(parse_window("rect") == Window::kRectangular);
  CHECK(parse_window("rectangular") == Window::kRectangular);
  CHECK(contains(error_of([] { parse_window("hamming"); }), "hamming"));
  CHECK(window_name(Window::kHann) == "hann");
  const auto w = window_coefficients(Window::kHann, 8);
  CHECK(w.size() == 8);
  CHECK(w[0] == doctest::Approx(0.0));
  for (double x : window_coefficients(Window::kRectangular, 5)) CHECK(x == 1.0);
}

TEST_CASE("rectangular Doppler transform preserves energy") {
  const auto num = small_numerology(12);
  Scene sc;
  sc.si_amplitude = 0.5;
  sc.scatterers.push_back({1.0, 17.0, 0.0, 0.0, 1.0});
  sc.scatterers.push_back({2.0, -60.0, 0.0, 0.0, 0.4});
  const auto c = cir_of(sc, num);
  const auto s = doppler_transform(c, Window::kRectangular);
  double a = 0, b = 0;
  for (const auto& v : c.taps.data()) a += std::norm(v);
  for (const auto& v : s.data()) b += std::norm(v);
  CHECK(b == doctest::Approx(a).epsilon(1e-12));
  const auto m = power_map(s, c);
  double tot = 0;
  for (double p : m.power.data()) tot += p;
  CHECK(tot == doctest::Approx(a).epsilon(1e-12));
}
