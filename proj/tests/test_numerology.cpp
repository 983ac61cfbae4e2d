#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "isac/fft.hpp"
#include "isac/numerology.hpp"

using namespace isac;
using namespace testing;

TEST_CASE("table1 derived parameters") {
  const auto num = numerology_preset("table1-60ghz");
  const auto d = derive_params(num);
  // hand arithmetic
  const double c = 299792458.0;
  CHECK(d.subcarrier_spacing_hz == doctest::Approx(1.2e6).epsilon(1e-12));
  CHECK(d.symbol_duration_s == doctest::Approx(1300.0 / 1.2288e9).epsilon(1e-12));
  CHECK(d.symbol_duration_s * 1e6 == doctest::Approx(1.057).epsilon(1e-3));
  CHECK(d.bandwidth_hz == doctest::Approx(1.08e9).epsilon(1e-12));
  CHECK(d.range_resolution_m == doctest::Approx(c / 2.16e9).epsilon(1e-12));
  CHECK(d.range_resolution_m == doctest::Approx(0.1389).epsilon(1e-3));
  CHECK(d.wavelength_m == doctest::Approx(c / 60e9).epsilon(1e-12));
  CHECK(d.tap_distance_m == doctest::Approx(c / (2 * 1.2288e9)).epsilon(1e-12));
  CHECK(d.max_velocity_two_symbol_mps ==
        doctest::Approx(d.wavelength_m / (4 * d.symbol_duration_s)));
  CHECK(d.velocity_resolution_mps ==
        doctest::Approx(d.wavelength_m / (2 * 256 * d.symbol_duration_s)));
}

TEST_CASE("doubling bandwidth halves range resolution exactly") {
  auto num = numerology_preset("table1-60ghz");
  const auto a = derive_params(num);
  num.sample_rate_hz *= 2;
  const auto b = derive_params(num);
  CHECK(b.bandwidth_hz == 2 * a.bandwidth_hz);
  CHECK(b.range_resolution_m == a.range_resolution_m / 2);
}

TEST_CASE("numerology validation names the field") {
  auto num = numerology_preset("table1-60ghz");
  num.sample_rate_hz = -1;
  CHECK(contains(error_of([&] { derive_params(num); }), "numerology.sample_rate_hz"));
  num = numerology_preset("table1-60ghz");
  num.carrier_freq_hz = std::nan("");
  CHECK(contains(error_of([&] { derive_params(num); }), "numerology.carrier_freq_hz"));
  num = numerology_preset("table1-60ghz");
  num.n_valid_subcarriers = 1024;
  CHECK(contains(error_of([&] { validate(num); }), "numerology.n_valid_subcarriers"));
  num = numerology_preset("table1-60ghz");
  num.cp_len_samples = -1;
  CHECK(contains(error_of([&] { validate(num); }), "numerology.cp_len_samples"));
  CHECK_THROWS_AS(numerology_preset("nope"), ValidationError);
}

TEST_CASE("presets") {
  for (const auto& name : numerology_preset_names()) CHECK_NOTHROW(validate(numerology_preset(name)));
  const auto nr = derive_params(numerology_preset("nr100-30khz"));
  CHECK(nr.subcarrier_spacing_hz == doctest::Approx(30e3).epsilon(1e-12));
}

TEST_CASE("centered bins skip DC and are symmetric") {
  for (int nv : {900, 52, 7}) {
    OfdmNumerology num = numerology_preset("table1-60ghz");
    num.n_valid_subcarriers = nv;
    const auto bins = centered_bins(num);
    std::set<int> uniq(bins.begin(), bins.end());
    CHECK(uniq.size() == bins.size());
    CHECK(uniq.count(0) == 0);
    const auto neg = std::count_if(bins.begin(), bins.end(), [](int b) { return b < 0; });
    CHECK(neg == nv / 2);
    CHECK(*uniq.begin() == -(nv / 2));
    CHECK(*uniq.rbegin() == nv - nv / 2);
  }
}

TEST_CASE("generate_frame determinism and alphabet") {
  const auto num = small_numerology();
  const auto a = generate_frame(num, 1), b = generate_frame(num, 1), c = generate_frame(num, 2);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  std::set<std::pair<double, double>> symbols;
  for (int q = 0; q < a.n_symbols(); ++q)
    for (const auto& v : a.symbol(q)) {
      CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
      symbols.insert({std::round(v.real() * 1e6), std::round(v.imag() * 1e6)});
    }
  CHECK(symbols.size() == 4);
}

TEST_CASE("single subcarrier modulates to a tone with cyclic prefix") {
  const auto num = small_numerology(2);
  ResourceGrid grid(num.n_valid_subcarriers, 2, centered_bins(num));
  const int row = 40;
  const int bin = centered_bins(num)[row];
  grid.at(row, 0) = 1.0;
  grid.at(row, 1) = cplx{0, 1};
  const auto x = modulate(grid, num);
  REQUIRE(x.size() == 2u * 80u);
  for (int q = 0; q < 2; ++q) {
    const cplx* s = x.data() + q * 80;
    for (int n = 0; n < 16; ++n) CHECK(std::abs(s[n] - s[64 + n]) == 0.0);
    for (int n = 0; n < 64; ++n) {
      const cplx expect =
          grid.at(row, q) * std::polar(1.0 / 8.0, 2 * M_PI * bin * n / 64.0);
      CHECK(std::abs(s[16 + n] - expect) < 1e-12);
    }
  }
}

TEST_CASE("modulate matches a naive inverse DFT") {
  const auto num = small_numerology(1);
  const auto grid = generate_frame(num, 5);
  CVec spec(64);
  const auto bins = centered_bins(num);
  for (int m = 0; m < num.n_valid_subcarriers; ++m) spec[(bins[m] + 64) % 64] = grid.at(m, 0);
  const auto ref = naive_dft(spec, +1);
  const auto x = modulate(grid, num);
  for (int n = 0; n < 64; ++n) CHECK(std::abs(x[16 + n] - ref[n]) < 1e-12);
}

TEST_CASE("round trip and Parseval over seeds") {
  const auto num = small_numerology(8);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto grid = generate_frame(num, seed);
    const auto x = modulate(grid, num);
    const auto back = demodulate(x, num);
    double err = 0.0;
    for (int q = 0; q < grid.n_symbols(); ++q) {
      double e_time = 0.0, e_freq = 0.0;
      for (int n = 0; n < 64; ++n) e_time += std::norm(x[q * 80 + 16 + n]);
      for (int m = 0; m < grid.n_subcarriers(); ++m) {
        err = std::max(err, std::abs(back.at(m, q) - grid.at(m, q)));
        e_freq += std::norm(grid.at(m, q));
      }
      CHECK(std::abs(e_time - e_freq) < 1e-9);
    }
    CHECK(err < 1e-9);
  }
}

TEST_CASE("shape errors") {
  const auto num = small_numerology(2);
  ResourceGrid wrong(10, 2, std::vector<int>(10, 1));
  const auto msg = error_of([&] { modulate(wrong, num); });
  CHECK(contains(msg, "10 subcarriers"));
  CHECK(contains(msg, "expected 56"));
  CVec x(80 * 2 + 7);
  CHECK(contains(error_of([&] { demodulate(x, num); }), "partial symbol of 7 samples"));
}

TEST_CASE("OFDM has high PAPR, a constant-modulus tone has none") {
  const auto num = numerology_preset("table1-60ghz");
  const auto x = modulate(generate_frame(num, 3), num);
  CHECK(papr_db(x) > 8.0);
  CVec tone(4096);
  for (std::size_t n = 0; n < tone.size(); ++n) tone[n] = std::polar(1.0, 0.37 * n);
  CHECK(std::abs(papr_db(tone)) < 1e-9);
}

TEST_CASE("fft wrapper is unitary and matches the naive DFT") {
  CVec x(12);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = cplx(std::sin(i * 1.3), std::cos(i * 0.7));
  auto y = x;
  fft::forward(y);
  const auto ref = naive_dft(x, -1);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - ref[i]) < 1e-12);
  CHECK(energy(y) == doctest::Approx(energy(x)).epsilon(1e-12));
  fft::inverse(y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
  CVec s{0, 1, 2, 3, 4};
  fft::fftshift(s);
  CHECK(s[2] == cplx(0));
}
