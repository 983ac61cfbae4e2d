#include "isac/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace isac {
namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

/// exp(j 2 pi cycles) with the integer part removed first.
cplx phasor(double cycles) {
  const double frac = cycles - std::round(cycles);
  return std::polar(1.0, kTwoPi * frac);
}

}  // namespace

double Scene::residual_si() const {
  return si_amplitude * db_to_amplitude(-si_suppression_db);
}

void validate(const Scene& scene) {
  for (std::size_t k = 0; k < scene.scatterers.size(); ++k) {
    const auto& s = scene.scatterers[k];
    const std::string who = "scene.scatterer[" + std::to_string(k) + "].";
    if (!(std::isfinite(s.range_m) && s.range_m > 0))
      throw ValidationError(who + "range_m: must be positive and finite");
    if (!std::isfinite(s.radial_velocity_mps))
      throw ValidationError(who + "radial_velocity_mps: must be finite");
    if (!(std::isfinite(s.azimuth_deg) && std::abs(s.azimuth_deg) <= 90))
      throw ValidationError(who + "azimuth_deg: must lie in [-90, 90]");
    if (!(std::isfinite(s.elevation_deg) && std::abs(s.elevation_deg) <= 90))
      throw ValidationError(who + "elevation_deg: must lie in [-90, 90]");
    if (!(std::isfinite(s.reflectivity) && s.reflectivity > 0))
      throw ValidationError(who + "reflectivity: must be positive and finite");
  }
  if (!finite_nonneg(scene.si_amplitude))
    throw ValidationError("scene.si_amplitude: must be non-negative and finite");
  if (!finite_nonneg(scene.si_suppression_db))
    throw ValidationError("scene.si_suppression_db: must be non-negative and finite");
  if (!finite_nonneg(scene.noise_power))
    throw ValidationError("scene.noise_power: must be non-negative and finite");
}

long delay_samples(const Scatterer& s, const OfdmNumerology& num) {
  return std::lround(2.0 * s.range_m / kSpeedOfLight * num.sample_rate_hz);
}

double doppler_hz(const Scatterer& s, const OfdmNumerology& num) {
  return 2.0 * s.radial_velocity_mps * num.carrier_freq_hz / kSpeedOfLight;
}

BeamSchedule receive_scan_schedule(const ArrayGeometry& rx_geometry,
                                   const BeamCodebook& codebook, int dwell,
                                   const ArrayGeometry& tx_geometry, CVec tx_weights) {
  if (dwell < 1) throw ValidationError("beam schedule: dwell must be at least 1");
  if (tx_weights.size() != static_cast<std::size_t>(tx_geometry.n_elements()))
    throw ShapeError("beam schedule: transmit weights do not match transmit array");
  BeamSchedule sched{tx_geometry, rx_geometry, {}};
  sched.slots.reserve(codebook.size() * dwell);
  for (const auto& beam : codebook.beams)
    for (int i = 0; i < dwell; ++i) sched.slots.push_back({tx_weights, beam.weights});
  return sched;
}

BeamSchedule receive_scan_schedule(const ArrayGeometry& rx_geometry,
                                   const BeamCodebook& codebook, int dwell) {
  ArrayGeometry tx = array_preset("single");
  return receive_scan_schedule(rx_geometry, codebook, dwell, tx, CVec{cplx{1.0, 0.0}});
}

CTensor3 synth_channel(const Scene& scene, const OfdmNumerology& num,
                       const ArrayGeometry& geom, const BeamSchedule* schedule) {
  validate(scene);
  const auto d = derive_params(num);
  const int nv = num.n_valid_subcarriers;
  const int nq = num.n_symbols_per_frame;
  const int np = schedule ? 1 : geom.n_elements();
  if (schedule && schedule->slots.size() != static_cast<std::size_t>(nq))
    throw ShapeError("synth_channel: beam schedule has " +
                     std::to_string(schedule->slots.size()) + " slots for " +
                     std::to_string(nq) + " symbols");

  CTensor3 h({static_cast<std::size_t>(nv), static_cast<std::size_t>(nq),
              static_cast<std::size_t>(np)},
             cplx{scene.residual_si(), 0.0});
  const auto bins = centered_bins(num);

  CVec freq(nv), slow(nq), spatial(np);
  for (const auto& s : scene.scatterers) {
    const double tau = 2.0 * s.range_m / kSpeedOfLight;
    const double fd = doppler_hz(s, num);
    for (int m = 0; m < nv; ++m)
      freq[m] = s.reflectivity * phasor(-bins[m] * d.subcarrier_spacing_hz * tau);
    for (int q = 0; q < nq; ++q) {
      slow[q] = phasor(fd * d.symbol_duration_s * q);
      if (schedule) {
        const auto& slot = schedule->slots[q];
        slow[q] *= array_factor(schedule->tx_geometry, slot.tx_weights, s.azimuth_deg,
                                s.elevation_deg) *
                   array_factor(schedule->rx_geometry, slot.rx_weights, s.azimuth_deg,
                                s.elevation_deg);
      }
    }
    if (schedule) {
      spatial[0] = 1.0;
    } else {
      spatial = steering_vector(geom, s.azimuth_deg, s.elevation_deg);
    }
    for (int m = 0; m < nv; ++m)
      for (int q = 0; q < nq; ++q) {
        const cplx fq = freq[m] * slow[q];
        for (int p = 0; p < np; ++p) h(m, q, p) += fq * spatial[p];
      }
  }
  return h;
}

void add_complex_noise(std::span<cplx> out, double noise_power, std::uint64_t seed) {
  if (noise_power <= 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
  for (auto& v : out) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v += cplx{re, im};
  }
}

CTensor3 apply_channel(const CTensor3& h, const ResourceGrid& x, double noise_power,
                       std::uint64_t seed) {
  if (h.dim(0) != static_cast<std::size_t>(x.n_subcarriers()) ||
      h.dim(1) != static_cast<std::size_t>(x.n_symbols())) {
    std::ostringstream os;
    os << "apply_channel: channel " << shape_string(h.shape()) << " vs grid ("
       << x.n_subcarriers() << " x " << x.n_symbols() << ")";
    throw ShapeError(os.str());
  }
  if (!(std::isfinite(noise_power) && noise_power >= 0))
    throw ValidationError("apply_channel: noise_power must be non-negative and finite");
  CTensor3 y = h;
  const std::size_t np = h.dim(2);
  for (std::size_t m = 0; m < h.dim(0); ++m)
    for (std::size_t q = 0; q < h.dim(1); ++q) {
      const cplx xv = x.at(static_cast<int>(m), static_cast<int>(q));
      for (std::size_t p = 0; p < np; ++p) y(m, q, p) *= xv;
    }
  add_complex_noise(y.flat(), noise_power, seed);
  return y;
}

double peak_component(std::span<const cplx> samples) {
  double peak = 0.0;
  for (const auto& s : samples) peak = std::max({peak, std::abs(s.real()), std::abs(s.imag())});
  return peak;
}

CVec front_end(std::span<const cplx> samples, const FrontEndConfig& fe) {
  CVec out(samples.begin(), samples.end());
  if (!fe.enabled || !fe.adc_bits) return out;
  if (!(fe.full_scale > 0)) throw ValidationError("front_end.full_scale: must be positive");
  if (*fe.adc_bits < 1) throw ValidationError("front_end.adc_bits: must be at least 1");
  const double levels = std::ldexp(1.0, *fe.adc_bits);
  const double step = 2.0 * fe.full_scale / levels;
  const double lo = -levels / 2.0;
  const double hi = levels / 2.0 - 1.0;
  auto quantize = [&](double v) {
    const double code = std::clamp(std::floor(v / step), lo, hi);
    return (code + 0.5) * step;
  };
  for (auto& s : out) s = {quantize(s.real()), quantize(s.imag())};
  return out;
}

CVec propagate_time_domain(const Scene& scene, std::span<const cplx> tx_samples,
                           const OfdmNumerology& num, const PropagationOptions& opts) {
  validate(scene);
  validate(num);
  for (const auto& s : tx_samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw ValidationError("propagate_time_domain: non-finite transmit sample");
  const long n_tx = static_cast<long>(tx_samples.size());
  long max_delay = 0;
  for (std::size_t k = 0; k < scene.scatterers.size(); ++k) {
    const long dk = delay_samples(scene.scatterers[k], num);
    if (dk >= n_tx)
      throw ValidationError("propagate_time_domain: scatterer[" + std::to_string(k) +
                            "] delay of " + std::to_string(dk) +
                            " samples exceeds the simulation window of " +
                            std::to_string(n_tx) + " samples");
    max_delay = std::max(max_delay, dk);
  }
  CVec rx(static_cast<std::size_t>(n_tx + max_delay));
  if (opts.include_si) {
    const double g = scene.residual_si();
    if (g != 0.0)
      for (long n = 0; n < n_tx; ++n) rx[n] += g * tx_samples[n];
  }
  const double fs = num.sample_rate_hz;
  for (const auto& s : scene.scatterers) {
    const long dk = delay_samples(s, num);
    const double fd = doppler_hz(s, num);
    cplx gain = s.reflectivity;
    if (opts.geometry) {
      gain *= steering_vector(*opts.geometry, s.azimuth_deg, s.elevation_deg)
          .at(static_cast<std::size_t>(opts.element));
    }
    const double cycles0 = fd * opts.t0_offset_s;
    const double per_sample = fd / fs;
    for (long i = 0; i < n_tx; ++i) {
      const long n = i + dk;
      // Split the phase so large t0 offsets keep full precision.
      const cplx rot = phasor(cycles0 - std::round(cycles0) + per_sample * n);
      rx[n] += gain * tx_samples[i] * rot;
    }
  }
  if (opts.add_noise) add_complex_noise(rx, scene.noise_power, opts.seed);
  return rx;
}

}  // namespace isac
