#include "isac/pulsed.hpp"

#include <algorithm>
#include <cmath>

#include "isac/parallel.hpp"

namespace isac {

namespace {

constexpr std::uint64_t kTrialSeedStride = 7919;
// MAD scaled to a consistent estimate of a Gaussian standard deviation.
constexpr double kMadToSigma = 1.4826;

double mean_power(std::span<const cplx> s) {
  double e = 0.0;
  for (const auto& v : s) e += std::norm(v);
  return s.empty() ? 0.0 : e / static_cast<double>(s.size());
}

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<long>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

void validate(const SwitchConfig& cfg, const OfdmNumerology& num) {
  if (!(cfg.switch_delay_s >= 0.0) || !std::isfinite(cfg.switch_delay_s))
    throw ValidationError("pulse.switch_delay_s: must be finite and >= 0");
  if (cfg.packet.empty()) throw ValidationError("pulse.packet: empty");
  const double window = std::floor(cfg.rx_window_s * num.sample_rate_hz + 1e-9);
  if (!(window >= static_cast<double>(cfg.packet.size())))
    throw ValidationError("pulse.rx_window_s: shorter than one packet (" +
                          std::to_string(cfg.packet.size()) + " samples)");
}

double blind_zone(const SwitchConfig& cfg) {
  return kSpeedOfLight * cfg.switch_delay_s / 2.0;
}

long capture_start_index(const SwitchConfig& cfg, const OfdmNumerology& num) {
  return static_cast<long>(cfg.packet.size()) +
         static_cast<long>(std::ceil(cfg.switch_delay_s * num.sample_rate_hz - 1e-9));
}

PulseCapture simulate_pulse_cycle(const Scene& scene, const SwitchConfig& cfg,
                                  const OfdmNumerology& num, std::uint64_t seed) {
  validate(scene);
  validate(cfg, num);
  const long np = static_cast<long>(cfg.packet.size());
  const long start = capture_start_index(cfg, num);
  const long window = static_cast<long>(std::floor(cfg.rx_window_s * num.sample_rate_hz + 1e-9));
  const double fs = num.sample_rate_hz;
  const double lambda = kSpeedOfLight / num.carrier_freq_hz;

  PulseCapture cap;
  cap.capture_start = start;
  cap.samples.assign(static_cast<std::size_t>(window), cplx{});
  for (std::size_t k = 0; k < scene.scatterers.size(); ++k) {
    const auto& s = scene.scatterers[k];
    if (std::abs(s.radial_velocity_mps) * np / fs > lambda / 8.0)
      cap.warnings.push_back("scatterer[" + std::to_string(k) +
                             "] moves more than lambda/8 during the packet");
    const long d = delay_samples(s, num);
    const double per_sample = doppler_hz(s, num) / fs;
    const long lo = std::max(d, start), hi = std::min(d + np, start + window);
    cap.captured_echo_samples.push_back(std::max(0L, hi - lo));
    for (long n = lo; n < hi; ++n) {
      const double cyc = per_sample * static_cast<double>(n);
      cap.samples[static_cast<std::size_t>(n - start)] +=
          s.reflectivity * cfg.packet[static_cast<std::size_t>(n - d)] *
          std::polar(1.0, kTwoPi * (cyc - std::round(cyc)));
    }
  }
  add_complex_noise(cap.samples, scene.noise_power, seed);
  return cap;
}

RangingResult matched_filter_ranging(const PulseCapture& capture, const SwitchConfig& cfg,
                                     const OfdmNumerology& num, const RangingConfig& rcfg) {
  const auto& rx = capture.samples;
  const auto& s = cfg.packet;
  const long w = static_cast<long>(rx.size()), np = static_cast<long>(s.size());
  if (w < np)
    throw ShapeError("matched_filter_ranging: capture of " + std::to_string(w) +
                     " samples is shorter than the packet (" + std::to_string(np) + ")");
  const double fs = num.sample_rate_hz;
  const long max_delay = static_cast<long>(std::floor(2.0 * rcfg.max_range_m / kSpeedOfLight * fs));
  // An echo with delay d contributes r[i] = a s[i - lag] where lag = d - start.
  const long min_lag = std::max(-(np - 1), 1 - capture.capture_start);
  const long max_lag = std::min(w - 1, max_delay - capture.capture_start);

  RangingResult res;
  res.min_lag = min_lag;
  if (max_lag < min_lag) return res;

  // Prefix energy of the packet for the overlap normalisation.
  std::vector<double> pe(static_cast<std::size_t>(np) + 1, 0.0);
  for (long i = 0; i < np; ++i) pe[i + 1] = pe[i] + std::norm(s[i]);
  auto overlap_energy = [&](long lag) {
    const long i0 = std::max(0L, lag), i1 = std::min(w, lag + np);
    return pe[i1 - lag] - pe[i0 - lag];
  };
  auto correlate = [&](const CVec& x, long lag) {
    const long i0 = std::max(0L, lag), i1 = std::min(w, lag + np);
    cplx acc{};
    for (long i = i0; i < i1; ++i) acc += x[i] * std::conj(s[i - lag]);
    return acc;
  };

  const std::size_t n = static_cast<std::size_t>(max_lag - min_lag + 1);
  for (long lag = min_lag; lag <= max_lag; ++lag) {
    const double e = overlap_energy(lag);
    res.statistic.push_back(e > 0.0 ? std::abs(correlate(rx, lag)) / std::sqrt(e) : 0.0);
  }
  const double med = median_of(res.statistic);
  std::vector<double> dev;
  dev.reserve(n);
  for (double v : res.statistic) dev.push_back(std::abs(v - med));
  res.threshold = med + rcfg.threshold_mads * kMadToSigma * median_of(dev);

  // Strongest echo first, then subtract its fitted copy so partial-overlap
  // sidelobes do not masquerade as further echoes.
  CVec residual = rx;
  std::vector<double> stat = res.statistic;
  double floor = res.threshold;
  for (int iter = 0; iter < rcfg.max_echoes; ++iter) {
    const auto it = std::max_element(stat.begin(), stat.end());
    if (!(*it > floor)) break;
    const long lag = min_lag + static_cast<long>(it - stat.begin());
    const double delay = static_cast<double>(capture.capture_start + lag) / fs;
    res.peaks.push_back({kSpeedOfLight * delay / 2.0, lag, *it});
    if (iter == 0)
      floor = std::max(floor, *it * db_to_amplitude(-rcfg.dynamic_range_db));

    const cplx amp = correlate(residual, lag) / overlap_energy(lag);
    const long i0 = std::max(0L, lag), i1 = std::min(w, lag + np);
    for (long i = i0; i < i1; ++i) residual[i] -= amp * s[i - lag];
    for (long l = min_lag; l <= max_lag; ++l) {
      // only lags overlapping the cleaned span change
      if (l + np <= i0 || l >= i1) continue;
      const double e = overlap_energy(l);
      stat[static_cast<std::size_t>(l - min_lag)] =
          e > 0.0 ? std::abs(correlate(residual, l)) / std::sqrt(e) : 0.0;
    }
    stat[static_cast<std::size_t>(lag - min_lag)] = 0.0;
  }
  return res;
}

std::vector<SweepPoint> blind_zone_sweep(const SwitchConfig& cfg, const OfdmNumerology& num,
                                         const std::vector<double>& ranges_m, double snr_db,
                                         int trials, const RangingConfig& rcfg,
                                         std::uint64_t seed) {
  if (trials < 1) throw ValidationError("pulse.trials: must be >= 1");
  const double amp = std::sqrt(mean_power(cfg.packet));
  std::vector<SweepPoint> out;
  for (std::size_t r = 0; r < ranges_m.size(); ++r) {
    Scene scene;
    scene.scatterers.push_back({ranges_m[r], 0.0, 0.0, 0.0, 1.0});
    // per-sample echo SNR
    scene.noise_power = amp * amp * db_to_power(-snr_db);
    const long true_lag = delay_samples(scene.scatterers[0], num) - capture_start_index(cfg, num);
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(trials), 0);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
      const std::uint64_t s = seed + kTrialSeedStride * (r * static_cast<std::uint64_t>(trials) + t + 1);
      const auto cap = simulate_pulse_cycle(scene, cfg, num, s);
      const auto res = matched_filter_ranging(cap, cfg, num, rcfg);
      for (const auto& p : res.peaks)
        if (std::abs(p.lag - true_lag) <= 1) hit[t] = 1;
    });
    int count = 0;
    for (auto h : hit) count += h;
    out.push_back({ranges_m[r], static_cast<double>(count) / trials, trials});
  }
  return out;
}

CVec default_packet(const OfdmNumerology& num, std::uint64_t seed) {
  OfdmNumerology one = num;
  one.n_symbols_per_frame = 1;
  return modulate(generate_frame(one, seed), one);
}

}  // namespace isac
