#include "isac/selfmix.hpp"

#include <algorithm>
#include <cmath>

#include "isac/fft.hpp"

namespace isac {

namespace {

constexpr std::uint64_t kSymbolSeedStride = 1000003;

}  // namespace

void validate(const SelfmixConfig& cfg) {
  if (cfg.n_symbols < 2) throw ValidationError("selfmix.n_symbols: must be >= 2");
  if (cfg.n_antennas < 1 || cfg.n_antennas > 4)
    throw ValidationError("selfmix.n_antennas: must be 1 to 4");
  if (cfg.n_symbols < 2 * cfg.n_antennas)
    throw ValidationError("selfmix.n_symbols: need at least two symbols per antenna");
  if (!(cfg.antenna_spacing_wavelengths > 0.0))
    throw ValidationError("selfmix.antenna_spacing_wavelengths: must be positive");
  if (cfg.symbol_period_s && !(*cfg.symbol_period_s > 0.0))
    throw ValidationError("selfmix.symbol_period_s: must be positive");
}

IfSequence selfmix_sequence(const Scene& scene, const OfdmNumerology& num,
                            const SelfmixConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  validate(num);
  const double t_sym = num.samples_per_symbol() / num.sample_rate_hz;
  const double period = cfg.symbol_period_s.value_or(t_sym);
  if (period < t_sym)
    throw ValidationError("selfmix.symbol_period_s: shorter than one OFDM symbol");

  OfdmNumerology frame_num = num;
  frame_num.n_symbols_per_frame = cfg.n_symbols;
  const auto tx = modulate(generate_frame(frame_num, seed), frame_num);

  const std::size_t na = static_cast<std::size_t>(cfg.n_antennas);
  ArrayGeometry rx_array{cfg.n_antennas, 1, cfg.antenna_spacing_wavelengths, 0.5, {}};

  IfSequence out;
  out.z.resize(na);
  out.symbol_interval_s = period * static_cast<double>(na);
  out.wavelength_m = kSpeedOfLight / num.carrier_freq_hz;
  for (std::size_t a = 0; a < na; ++a) out.offset_s.push_back(period * static_cast<double>(a));
  for (std::size_t k = 0; k < scene.scatterers.size(); ++k)
    if (delay_samples(scene.scatterers[k], num) > num.cp_len_samples)
      out.warnings.push_back("scatterer[" + std::to_string(k) +
                             "] delay exceeds the cyclic prefix");

  const std::size_t ns = static_cast<std::size_t>(num.samples_per_symbol());
  const std::size_t cp = static_cast<std::size_t>(num.cp_len_samples);
  const std::size_t nfft = static_cast<std::size_t>(num.fft_size);
  const std::size_t usable = static_cast<std::size_t>(cfg.n_symbols) / na * na;
  for (std::size_t q = 0; q < usable; ++q) {
    const std::span<const cplx> s(tx.data() + q * ns, ns);
    PropagationOptions opt;
    opt.t0_offset_s = period * static_cast<double>(q);
    opt.seed = seed + kSymbolSeedStride * (q + 1);
    opt.geometry = &rx_array;
    opt.element = static_cast<int>(q % na);
    const auto r = propagate_time_domain(scene, s, num, opt);
    cplx acc{};
    for (std::size_t n = cp; n < cp + nfft; ++n) acc += r[n] * std::conj(s[n]);
    out.z[q % na].push_back(acc / static_cast<double>(nfft));
  }
  return out;
}

Spectrogram doppler_spectrogram(std::span<const cplx> z, double interval_s,
                                double wavelength_m, int stft_len, int hop, Window window) {
  if (hop <= 0) throw ValidationError("doppler_spectrogram: hop must be positive");
  if (stft_len < 4) throw ValidationError("doppler_spectrogram: stft_len must be >= 4");
  if (static_cast<std::size_t>(stft_len) > z.size())
    throw ValidationError("doppler_spectrogram: stft_len " + std::to_string(stft_len) +
                          " exceeds sequence length " + std::to_string(z.size()));
  const std::size_t n = static_cast<std::size_t>(stft_len);
  const std::size_t n_seg = (z.size() - n) / static_cast<std::size_t>(hop) + 1;
  const auto w = window_coefficients(window, n);

  Spectrogram sg{RMatrix({n_seg, n}), {}, {}, {}};
  for (std::size_t k = 0; k < n; ++k) {
    const double f = (static_cast<double>(k) - static_cast<double>(n / 2)) /
                     (static_cast<double>(n) * interval_s);
    sg.frequency_hz.push_back(f);
    sg.velocity_mps.push_back(f * wavelength_m / 2.0);
  }
  CVec seg(n);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const std::size_t start = s * static_cast<std::size_t>(hop);
    cplx mean{};
    for (std::size_t i = 0; i < n; ++i) mean += z[start + i];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) seg[i] = (z[start + i] - mean) * w[i];
    fft::forward(seg);
    fft::fftshift(seg);
    for (std::size_t k = 0; k < n; ++k) sg.power(s, k) = std::norm(seg[k]);
    sg.time_s.push_back((static_cast<double>(start) + 0.5 * static_cast<double>(n)) *
                        interval_s);
  }
  return sg;
}

AntennaAngle switched_antenna_phase(const IfSequence& seq, std::size_t antenna_a,
                                    std::size_t antenna_b, double spacing_wavelengths) {
  if (antenna_a >= seq.n_antennas() || antenna_b >= seq.n_antennas() ||
      antenna_a == antenna_b)
    throw ValidationError("switched_antenna_phase: need two distinct antennas");
  const std::size_t n = std::min(seq.z[antenna_a].size(), seq.z[antenna_b].size());
  if (n < 4) throw ValidationError("switched_antenna_phase: sequences too short");

  auto spectrum = [n](const CVec& z) {
    cplx mean{};
    for (std::size_t i = 0; i < n; ++i) mean += z[i];
    mean /= static_cast<double>(n);
    CVec s(z.begin(), z.begin() + static_cast<long>(n));
    for (auto& v : s) v -= mean;
    fft::forward(s);
    return s;
  };
  const auto sa = spectrum(seq.z[antenna_a]);
  const auto sb = spectrum(seq.z[antenna_b]);

  std::vector<double> pw(n);
  double energy = 0.0;
  for (std::size_t k = 0; k < n; ++k) pw[k] = std::norm(sa[k]) + std::norm(sb[k]);
  for (std::size_t i = 0; i < n; ++i)
    energy += std::norm(seq.z[antenna_a][i]) + std::norm(seq.z[antenna_b][i]);
  const auto kmax =
      static_cast<std::size_t>(std::max_element(pw.begin(), pw.end()) - pw.begin());
  auto sorted = pw;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(n / 2), sorted.end());
  const double median = sorted[n / 2];
  if (!(pw[kmax] > 1e-12 * energy) || pw[kmax] < db_to_power(10.0) * median)
    throw Error("switched_antenna_phase: no moving target");

  const long ks = kmax < (n + 1) / 2 ? static_cast<long>(kmax)
                                     : static_cast<long>(kmax) - static_cast<long>(n);
  const double fd = static_cast<double>(ks) / (static_cast<double>(n) * seq.symbol_interval_s);
  const double dt = seq.offset_s[antenna_b] - seq.offset_s[antenna_a];
  const double raw = std::arg(sb[kmax] * std::conj(sa[kmax]));
  const double phase = std::remainder(raw - kTwoPi * fd * dt, kTwoPi);
  const double pitch = spacing_wavelengths *
                       (static_cast<double>(antenna_b) - static_cast<double>(antenna_a));
  const double s = std::clamp(phase / (kTwoPi * pitch), -1.0, 1.0);
  return {rad_to_deg(std::asin(s)), fd, phase};
}

}  // namespace isac
