#include "isac/pipeline.hpp"

#include <cmath>

#include "isac/parallel.hpp"

namespace isac {

CTensor3 receive_frame(const Scene& scene, const OfdmNumerology& num,
                       const ArrayGeometry& geom, const ResourceGrid& frame,
                       const ReceiverConfig& rx, std::uint64_t seed,
                       const BeamSchedule* schedule) {
  if (rx.model == ReceiveModel::kFrequencyDomain) {
    const auto h = synth_channel(scene, num, geom, schedule);
    return apply_channel(h, frame, scene.noise_power, seed);
  }
  if (schedule)
    throw ValidationError("receiver.model: time-domain reception does not support beam scanning");
  const auto tx = modulate(frame, num);
  const std::size_t np = static_cast<std::size_t>(geom.n_elements());
  const std::size_t nv = static_cast<std::size_t>(num.n_valid_subcarriers);
  const std::size_t nq = static_cast<std::size_t>(frame.n_symbols());
  CTensor3 y({nv, nq, np});
  for (std::size_t p = 0; p < np; ++p) {
    PropagationOptions opt;
    opt.seed = seed + 104729 * p;
    opt.geometry = &geom;
    opt.element = static_cast<int>(p);
    auto r = propagate_time_domain(scene, tx, num, opt);
    r.resize(tx.size());
    if (rx.front_end.enabled && rx.front_end.adc_bits) {
      FrontEndConfig fe = rx.front_end;
      if (rx.auto_full_scale) {
        const double pk = peak_component(r);
        fe.full_scale = pk > 0.0 ? pk : 1.0;
      }
      r = front_end(r, fe);
    }
    const auto grid = demodulate(r, num);
    for (std::size_t q = 0; q < nq; ++q)
      for (std::size_t m = 0; m < nv; ++m)
        y(m, q, p) = grid.at(static_cast<int>(m), static_cast<int>(q));
  }
  return y;
}

CirMatrix crop_range(const CirMatrix& cir, double max_range_m) {
  if (max_range_m <= 0.0) return cir;
  std::size_t keep = 0;
  while (keep < cir.n_taps() && cir.tap_distance_m(static_cast<double>(keep)) <= max_range_m)
    ++keep;
  if (keep == cir.n_taps()) return cir;
  CirMatrix out = cir;
  out.taps = CTensor3({keep, cir.n_symbols(), cir.n_elements()});
  std::copy_n(cir.taps.data().begin(), out.taps.size(), out.taps.data().begin());
  return out;
}

SensingResult process_digital(const CTensor3& h_hat, const OfdmNumerology& num,
                              const ArrayGeometry& geom, const ProcessingConfig& proc) {
  auto cir = to_cir(h_hat, num, proc.range_oversampling, proc.range_window);
  if (proc.combine > 1) cir = coherent_combine(cir, proc.combine);
  if (proc.remove_static) cir = remove_static(std::move(cir));
  cir = crop_range(cir, proc.max_range_m);

  SensingResult res;
  res.spectrum = doppler_transform(cir, proc.doppler_window);
  res.map = power_map(res.spectrum, cir, -1);
  res.mask = cfar_2d(res.map, proc.cfar);
  if (cir.n_elements() > 1)
    res.cloud = extract_pointcloud(res.map, res.mask, res.spectrum, geom, proc.az_grid,
                                   proc.el_grid, proc.cfar);
  else
    res.cloud = extract_pointcloud(res.map, res.mask, proc.cfar);
  res.cir = std::move(cir);
  return res;
}

SensingResult sense_digital(const Scene& scene, const OfdmNumerology& num,
                            const ArrayGeometry& geom, const ProcessingConfig& proc,
                            const ReceiverConfig& rx, std::uint64_t seed) {
  const auto frame = generate_frame(num, payload_seed(seed));
  const auto y = receive_frame(scene, num, geom, frame, rx, noise_seed(seed));
  return process_digital(estimate_channel(y, frame), num, geom, proc);
}

BeamScanResult sense_beam_scan(const Scene& scene, const OfdmNumerology& num,
                               const ArrayGeometry& geom, const BeamCodebook& codebook,
                               const ProcessingConfig& proc, std::uint64_t seed) {
  const int nb = static_cast<int>(codebook.size());
  if (nb == 0 || num.n_symbols_per_frame % nb != 0)
    throw ValidationError("beam scan: " + std::to_string(num.n_symbols_per_frame) +
                          " symbols per frame is not a multiple of " + std::to_string(nb) +
                          " beams");
  const int dwell = num.n_symbols_per_frame / nb;
  const auto schedule = receive_scan_schedule(geom, codebook, dwell);
  const auto frame = generate_frame(num, payload_seed(seed));
  const auto y = receive_frame(scene, num, geom, frame, ReceiverConfig{}, noise_seed(seed),
                               &schedule);
  auto cir = to_cir(estimate_channel(y, frame), num, proc.range_oversampling,
                    proc.range_window);
  if (dwell > 1) cir = coherent_combine(cir, dwell);
  cir = crop_range(cir, proc.max_range_m);

  std::vector<RangeProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(nb));
  for (std::size_t b = 0; b < static_cast<std::size_t>(nb); ++b) {
    RangeProfile prof{std::vector<double>(cir.n_taps()), cir.tap_distance_m(1.0)};
    for (std::size_t l = 0; l < cir.n_taps(); ++l) prof.magnitude[l] = std::abs(cir.taps(l, b, 0));
    profiles.push_back(std::move(prof));
  }
  BeamScanResult res{codebook, std::move(cir), beam_scan_map(profiles, codebook), {}};
  res.cloud = extract_pointcloud_beam_scan(res.map, proc.cfar, proc.min_range_m);
  return res;
}

namespace {

struct SnrProbe {
  double signal;
  double noise;
};

SnrProbe probe_snr(const CirMatrix& cir) {
  const std::size_t nl = cir.n_taps(), nq = cir.n_symbols();
  std::vector<cplx> mean(nl);
  std::size_t peak = 0;
  for (std::size_t l = 0; l < nl; ++l) {
    for (std::size_t q = 0; q < nq; ++q) mean[l] += cir.taps(l, q, 0);
    mean[l] /= static_cast<double>(nq);
    if (std::norm(mean[l]) > std::norm(mean[peak])) peak = l;
  }
  double var = 0.0;
  std::size_t count = 0;
  for (std::size_t l = nl / 4; l < 3 * nl / 4; ++l) {
    for (std::size_t q = 0; q < nq; ++q) var += std::norm(cir.taps(l, q, 0) - mean[l]);
    count += nq - 1;
  }
  return {std::norm(mean[peak]), var / static_cast<double>(count)};
}

}  // namespace

std::vector<CombiningGain> measure_combining_gain(const OfdmNumerology& num,
                                                  const std::vector<int>& factors,
                                                  int trials, double snr_db,
                                                  double range_m, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("mc_snr.trials: must be >= 1");
  for (int n : factors)
    if (n < 1 || num.n_symbols_per_frame % n != 0 || num.n_symbols_per_frame / n < 2)
      throw ValidationError("mc_snr.factors: " + std::to_string(n) + " must divide " +
                            std::to_string(num.n_symbols_per_frame) +
                            " and leave at least two symbols");
  Scene scene;
  scene.scatterers.push_back({range_m, 0.0, 0.0, 0.0, 1.0});
  scene.noise_power = db_to_power(-snr_db);
  const auto geom = array_preset("single");

  std::vector<std::vector<double>> gains(static_cast<std::size_t>(trials));
  parallel_for(gains.size(), [&](std::size_t t) {
    const std::uint64_t s = seed + 15485863ULL * (t + 1);
    const auto frame = generate_frame(num, payload_seed(s));
    const auto y = apply_channel(synth_channel(scene, num, geom), frame, scene.noise_power,
                                 noise_seed(s));
    const auto cir = to_cir(estimate_channel(y, frame), num);
    const auto before = probe_snr(cir);
    for (int n : factors) {
      const auto after = probe_snr(coherent_combine(cir, n));
      gains[t].push_back((after.signal / after.noise) / (before.signal / before.noise));
    }
  });
  std::vector<CombiningGain> out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    double acc = 0.0;
    for (const auto& g : gains) acc += g[i];
    out.push_back({factors[i], power_to_db(acc / trials),
                   power_to_db(static_cast<double>(factors[i]))});
  }
  return out;
}

}  // namespace isac
