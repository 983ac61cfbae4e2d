#include <random>

#include "helpers.hpp"
#include "isac/detector.hpp"
#include "isac/pipeline.hpp"

using namespace isac;
using namespace testing;

namespace {

RMatrix exponential_map(std::size_t nr, std::size_t nd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  RMatrix m({nr, nd});
  for (auto& v : m.data()) v = e(rng);
  return m;
}

std::size_t count(const Mask& m) {
  return static_cast<std::size_t>(std::count(m.data().begin(), m.data().end(), 1));
}

}  // namespace

TEST_CASE("zero map gives no detections") {
  CfarConfig cfg;
  RMatrix m({64, 32}, 0.0);
  CHECK(count(cfar_2d(m, cfg)) == 0);
  CHECK(pick_peaks(m, cfar_2d(m, cfg), cfg).empty());
}

TEST_CASE("false-alarm rate on exponential noise") {
  CfarConfig cfg;
  cfg.false_alarm_rate = 1e-2;
  std::size_t hits = 0, cells = 0;
  for (std::uint64_t s = 1; s <= 4; ++s) {
    const auto m = exponential_map(256, 64, s);
    hits += count(cfar_2d(m, cfg));
    cells += m.size();
  }
  const double pfa = double(hits) / cells;
  CHECK(pfa > 0.7e-2);
  CHECK(pfa < 1.3e-2);
}

TEST_CASE("detections shrink as the false-alarm rate drops") {
  const auto m = exponential_map(128, 64, 9);
  CfarConfig cfg;
  std::size_t prev = m.size() + 1;
  for (double pfa : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    cfg.false_alarm_rate = pfa;
    const std::size_t n = count(cfar_2d(m, cfg));
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("a strong cell is detected and the mask is scale invariant") {
  auto m = exponential_map(64, 32, 3);
  m(30, 5) = 1e4;
  CfarConfig cfg;
  cfg.false_alarm_rate = 1e-6;
  const auto mask = cfar_2d(m, cfg);
  CHECK(mask(30, 5) == 1);
  const auto peaks = pick_peaks(m, mask, cfg);
  REQUIRE(!peaks.empty());
  CHECK(peaks[0].range_bin == 30);
  CHECK(peaks[0].doppler_bin == 5);

  auto big = m;
  for (auto& v : big.data()) v *= 1e7;
  CHECK(cfar_2d(big, cfg).data() == mask.data());
}

TEST_CASE("Doppler axis wraps") {
  RMatrix m({40, 16}, 1.0);
  m(20, 0) = 1e3;
  m(20, 15) = 1e3 * 0.999;
  CfarConfig cfg;
  cfg.false_alarm_rate = 1e-6;
  const auto mask = cfar_2d(m, cfg);
  const auto peaks = pick_peaks(m, mask, cfg);
  // the bin-15 cell neighbours bin 0 through the wrap, so only one local max
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].doppler_bin == 0);
}

TEST_CASE("sidelobe blanking keeps separated targets") {
  RMatrix m({80, 32}, 1.0);
  m(20, 8) = 1e6;
  m(21, 20) = 1e6 * 1e-3;  // 30 dB down, adjacent range: under the envelope
  m(60, 8) = 1e6 * 1e-2;   // 20 dB down, same Doppler, far range: kept
  m(40, 27) = 1e6 * 0.1;   // 10 dB down, inside the margin: kept
  CfarConfig cfg;
  cfg.false_alarm_rate = 1e-6;
  const auto peaks = pick_peaks(m, cfar_2d(m, cfg), cfg);
  REQUIRE(peaks.size() == 3);
  CHECK(peaks[0].range_bin == 20);
  CHECK(peaks[1].range_bin == 40);
  CHECK(peaks[2].range_bin == 60);
}

TEST_CASE("window larger than the map") {
  CfarConfig cfg;
  RMatrix small({10, 40}, 1.0);
  CHECK(contains(error_of([&] { cfar_2d(small, cfg); }), "too large"));
  cfg.false_alarm_rate = 2.0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
}

TEST_CASE("range-only CFAR") {
  std::vector<double> p(100, 1.0);
  p[50] = 1e4;
  CfarConfig cfg;
  cfg.false_alarm_rate = 1e-6;
  const auto hits = cfar_1d(p, cfg);
  CHECK(hits[50] == 1);
  CHECK(std::count(hits.begin(), hits.end(), 1) == 1);
}

TEST_CASE("cartesian conversion") {
  const auto d = to_cartesian(5.0, 0.0, 0.0);
  CHECK(d.y == doctest::Approx(5.0));
  CHECK(std::abs(d.x) < 1e-15);
  for (double az : {-50.0, -10.0, 0.0, 35.0})
    for (double el : {-25.0, 0.0, 15.0}) {
      const auto c = to_cartesian(3.7, az, el);
      const auto s = to_spherical(c.x, c.y, c.z);
      CHECK(s.range_m == doctest::Approx(3.7));
      CHECK(s.azimuth_deg == doctest::Approx(az));
      CHECK(s.elevation_deg == doctest::Approx(el));
    }
  const auto det = make_detection(2.0, 1.0, 30.0, 0.0, 5.0);
  CHECK(det.x_m == doctest::Approx(1.0));
  CHECK(det.z_m == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("three scatterers on the boresight path") {
  auto num = numerology_preset("table1-60ghz");
  num.n_symbols_per_frame = 64;
  const auto dv = derive_params(num).velocity_resolution_mps;
  Scene sc;
  sc.scatterers = {{2.0, 3 * dv, 0, 0, 1.0}, {5.0, -5 * dv, 0, 0, 0.8}, {8.0, 9 * dv, 0, 0, 0.6}};
  ProcessingConfig proc;
  proc.max_range_m = 12;
  proc.cfar.false_alarm_rate = 1e-8;
  auto res = sense_digital(sc, num, array_preset("single"), proc, {}, 4);
  REQUIRE(res.cloud.size() == 3);
  std::sort(res.cloud.begin(), res.cloud.end(),
            [](const Detection& a, const Detection& b) { return a.range_m < b.range_m; });
  const double dr = derive_params(num).range_resolution_m;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(res.cloud[i].range_m - sc.scatterers[i].range_m) < dr / 2);
    CHECK(std::abs(res.cloud[i].velocity_mps - sc.scatterers[i].radial_velocity_mps) < dv / 2);
  }
}

TEST_CASE("single target end to end with angles") {
  auto num = numerology_preset("table1-60ghz");
  num.n_symbols_per_frame = 256;
  const auto d = derive_params(num);
  Scene sc;
  sc.si_amplitude = 10;
  sc.noise_power = 1e-3;
  sc.scatterers.push_back({3.0, 5.0, 20.0, 10.0, 1.0});
  ProcessingConfig proc;
  proc.max_range_m = 20;
  proc.az_grid = stepped_grid(-60, 60, 1);
  proc.el_grid = stepped_grid(-30, 30, 1);
  proc.cfar.false_alarm_rate = 1e-8;
  const auto res = sense_digital(sc, num, array_preset("table1"), proc, {}, 1);
  REQUIRE(res.cloud.size() == 1);
  const auto& det = res.cloud[0];
  CHECK(std::abs(det.range_m - 3.0) < d.range_resolution_m / 2);
  CHECK(std::abs(det.velocity_mps - 5.0) < d.velocity_resolution_mps / 2);
  CHECK(std::abs(det.azimuth_deg - 20) <= 1);
  CHECK(std::abs(det.elevation_deg - 10) <= 1);
}
