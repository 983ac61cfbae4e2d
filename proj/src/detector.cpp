#include "isac/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace isac {

namespace {

std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

double axis_at(const std::vector<double>& axis, double pos) {
  if (axis.empty()) return 0.0;
  if (axis.size() == 1) return axis[0];
  return axis[0] + pos * (axis[1] - axis[0]);
}

double floor_level(std::span<const double> power, double floor_db) {
  const double mx = power.empty() ? 0.0 : *std::max_element(power.begin(), power.end());
  return mx * db_to_power(-floor_db);
}

double cfar_scale(std::size_t n_training, double pfa) {
  // alpha / T, applied to the training-cell sum
  return std::pow(pfa, -1.0 / static_cast<double>(n_training)) - 1.0;
}

}  // namespace

void validate(const CfarConfig& cfg) {
  if (cfg.guard_range < 0) throw ValidationError("cfar.guard_range: must be >= 0");
  if (cfg.guard_doppler < 0) throw ValidationError("cfar.guard_doppler: must be >= 0");
  if (cfg.training_range < 1) throw ValidationError("cfar.training_range: must be >= 1");
  if (cfg.training_doppler < 1)
    throw ValidationError("cfar.training_doppler: must be >= 1");
  if (!(cfg.false_alarm_rate > 0.0 && cfg.false_alarm_rate < 1.0))
    throw ValidationError("cfar.false_alarm_rate: must lie in (0, 1)");
  if (!(cfg.relative_floor_db > 0.0))
    throw ValidationError("cfar.relative_floor_db: must be positive");
  if (!(cfg.sidelobe_margin_db >= 0.0))
    throw ValidationError("cfar.sidelobe_margin_db: must be >= 0");
  if (!(cfg.sidelobe_scale_bins > 0.0) || !std::isfinite(cfg.sidelobe_scale_bins))
    throw ValidationError("cfar.sidelobe_scale_bins: must be > 0");
}

Mask cfar_2d(const RMatrix& power, const CfarConfig& cfg) {
  validate(cfg);
  const std::size_t nl = power.dim(0), nq = power.dim(1);
  const long gr = cfg.guard_range, gd = cfg.guard_doppler;
  const long rr = gr + cfg.training_range, wd = gd + cfg.training_doppler;
  if (static_cast<std::size_t>(2 * rr + 1) > nl || static_cast<std::size_t>(2 * wd + 1) > nq)
    throw ShapeError("cfar_2d: window (" + std::to_string(2 * rr + 1) + " x " +
                     std::to_string(2 * wd + 1) + ") too large for map " +
                     shape_string(power.shape()));

  // Per-row circular sums: full Doppler extent and the two training strips.
  RMatrix full({nl, nq}), strips({nl, nq});
  for (std::size_t l = 0; l < nl; ++l)
    for (std::size_t q = 0; q < nq; ++q) {
      double inner = 0.0, outer = 0.0;
      for (long d = -wd; d <= wd; ++d) {
        const double v = power(l, wrap(static_cast<long>(q) + d, nq));
        if (std::abs(d) <= gd)
          inner += v;
        else
          outer += v;
      }
      full(l, q) = inner + outer;
      strips(l, q) = outer;
    }

  const double floor = floor_level(power.flat(), cfg.relative_floor_db);
  const std::size_t width = static_cast<std::size_t>(2 * wd + 1);
  const std::size_t strip_width = static_cast<std::size_t>(2 * cfg.training_doppler);
  Mask mask({nl, nq}, 0);
  for (std::size_t l = 0; l < nl; ++l) {
    const long li = static_cast<long>(l);
    const long lo = std::max(0L, li - rr), hi = std::min(static_cast<long>(nl) - 1, li + rr);
    const long glo = std::max(0L, li - gr), ghi = std::min(static_cast<long>(nl) - 1, li + gr);
    const std::size_t n_train =
        static_cast<std::size_t>((hi - lo + 1) - (ghi - glo + 1)) * width +
        static_cast<std::size_t>(ghi - glo + 1) * strip_width;
    const double scale = cfar_scale(n_train, cfg.false_alarm_rate);
    for (std::size_t q = 0; q < nq; ++q) {
      const double cut = power(l, q);
      if (!(cut > floor)) continue;
      double sum = 0.0;
      for (long r = lo; r <= hi; ++r)
        sum += (r >= glo && r <= ghi) ? strips(static_cast<std::size_t>(r), q)
                                      : full(static_cast<std::size_t>(r), q);
      if (cut > scale * sum) mask(l, q) = 1;
    }
  }
  return mask;
}

Mask cfar_2d(const RangeDopplerMap& map, const CfarConfig& cfg) {
  return cfar_2d(map.power, cfg);
}

std::vector<std::uint8_t> cfar_1d(std::span<const double> power, const CfarConfig& cfg) {
  validate(cfg);
  const long n = static_cast<long>(power.size());
  const long gr = cfg.guard_range, rr = gr + cfg.training_range;
  if (2 * rr + 1 > n)
    throw ShapeError("cfar_1d: window of " + std::to_string(2 * rr + 1) +
                     " cells too large for profile of " + std::to_string(n));
  const double floor = floor_level(power, cfg.relative_floor_db);
  std::vector<std::uint8_t> out(power.size(), 0);
  for (long i = 0; i < n; ++i) {
    if (!(power[i] > floor)) continue;
    double sum = 0.0;
    std::size_t count = 0;
    for (long r = std::max(0L, i - rr); r <= std::min(n - 1, i + rr); ++r) {
      if (std::abs(r - i) <= gr) continue;
      sum += power[r];
      ++count;
    }
    if (power[i] > cfar_scale(count, cfg.false_alarm_rate) * sum) out[i] = 1;
  }
  return out;
}

std::vector<PeakCell> pick_peaks(const RMatrix& power, const Mask& mask,
                                 const CfarConfig& cfg, double range_oversampling) {
  if (power.shape() != mask.shape())
    throw ShapeError("pick_peaks: mask " + shape_string(mask.shape()) + " vs map " +
                     shape_string(power.shape()));
  const std::size_t nl = power.dim(0), nq = power.dim(1);
  std::vector<PeakCell> cand;
  for (std::size_t l = 0; l < nl; ++l)
    for (std::size_t q = 0; q < nq; ++q) {
      if (!mask(l, q)) continue;
      const double v = power(l, q);
      bool is_max = true;
      for (long dl = -1; dl <= 1 && is_max; ++dl) {
        const long r = static_cast<long>(l) + dl;
        if (r < 0 || r >= static_cast<long>(nl)) continue;
        for (long dq = -1; dq <= 1; ++dq) {
          if (dl == 0 && dq == 0) continue;
          const std::size_t c = wrap(static_cast<long>(q) + dq, nq);
          const double u = power(static_cast<std::size_t>(r), c);
          // ties go to the lower flat index
          const bool earlier = static_cast<std::size_t>(r) * nq + c < l * nq + q;
          if (u > v || (u == v && earlier)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) cand.push_back({l, q, v});
    }
  std::stable_sort(cand.begin(), cand.end(),
                   [](const PeakCell& a, const PeakCell& b) { return a.power > b.power; });

  const double ratio = db_to_power(cfg.sidelobe_margin_db);
  std::vector<PeakCell> kept;
  for (const auto& c : cand) {
    bool shadowed = false;
    for (const auto& k : kept) {
      const auto dl = k.range_bin > c.range_bin ? k.range_bin - c.range_bin
                                                : c.range_bin - k.range_bin;
      const auto dq_raw = k.doppler_bin > c.doppler_bin ? k.doppler_bin - c.doppler_bin
                                                        : c.doppler_bin - k.doppler_bin;
      const auto dq = std::min(dq_raw, nq - dq_raw);
      const bool same_row = dl <= 1, same_col = nq > 1 && dq <= 1;
      if (!same_row && !same_col) continue;
      if (!(k.power > ratio * c.power)) continue;
      double d = 1.0;
      if (!same_col) d = static_cast<double>(dq);
      else if (!same_row) d = static_cast<double>(dl) / range_oversampling;
      const double env = std::min(1.0, std::pow(cfg.sidelobe_scale_bins / (kPi * d), 2));
      if (c.power < env * k.power) {
        shadowed = true;
        break;
      }
    }
    if (!shadowed) kept.push_back(c);
  }
  return kept;
}

Direction3 to_cartesian(double range_m, double azimuth_deg, double elevation_deg) {
  const auto d = direction_vector(azimuth_deg, elevation_deg);
  return {range_m * d.x, range_m * d.y, range_m * d.z};
}

Spherical to_spherical(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  return {r, rad_to_deg(std::atan2(x, y)),
          rad_to_deg(std::asin(std::clamp(z / r, -1.0, 1.0)))};
}

Detection make_detection(double range_m, double velocity_mps, double azimuth_deg,
                         double elevation_deg, double intensity) {
  const auto c = to_cartesian(range_m, azimuth_deg, elevation_deg);
  return {range_m, velocity_mps, azimuth_deg, elevation_deg, intensity, c.x, c.y, c.z};
}

void sort_by_intensity(PointCloud& cloud) {
  std::stable_sort(cloud.begin(), cloud.end(), [](const Detection& a, const Detection& b) {
    return a.intensity > b.intensity;
  });
}

namespace {

double refined_range(const RangeDopplerMap& map, const PeakCell& pk) {
  const std::size_t nl = map.n_range();
  if (pk.range_bin == 0 || pk.range_bin + 1 >= nl)
    return axis_at(map.range_axis_m, static_cast<double>(pk.range_bin));
  const double mag[3] = {std::sqrt(map.power(pk.range_bin - 1, pk.doppler_bin)),
                         std::sqrt(pk.power),
                         std::sqrt(map.power(pk.range_bin + 1, pk.doppler_bin))};
  const double pos = quadratic_peak(mag, 1) - 1.0 + static_cast<double>(pk.range_bin);
  return std::max(0.0, axis_at(map.range_axis_m, pos));
}

}  // namespace

PointCloud extract_pointcloud(const RangeDopplerMap& map, const Mask& mask,
                              const CTensor3& spectrum, const ArrayGeometry& geom,
                              std::span<const double> az_grid,
                              std::span<const double> el_grid, const CfarConfig& cfg) {
  if (spectrum.dim(0) != map.n_range() || spectrum.dim(1) != map.n_doppler())
    throw ShapeError("extract_pointcloud: spectrum " + shape_string(spectrum.shape()) +
                     " does not match map " + shape_string(map.power.shape()));
  PointCloud cloud;
  const auto peaks = pick_peaks(map.power, mask, cfg, map.range_oversampling);
  if (peaks.empty()) return cloud;
  BartlettBeamformer bf(geom, {az_grid.begin(), az_grid.end()},
                        {el_grid.begin(), el_grid.end()});
  CVec snap(spectrum.dim(2));
  for (const auto& pk : peaks) {
    for (std::size_t p = 0; p < snap.size(); ++p)
      snap[p] = spectrum(pk.range_bin, pk.doppler_bin, p);
    const auto [az, el] = bf.spectrum(snap).argmax();
    cloud.push_back(make_detection(refined_range(map, pk),
                                   map.velocity_axis_mps[pk.doppler_bin], az, el, pk.power));
  }
  sort_by_intensity(cloud);
  return cloud;
}

PointCloud extract_pointcloud(const RangeDopplerMap& map, const Mask& mask,
                              const CfarConfig& cfg) {
  PointCloud cloud;
  for (const auto& pk : pick_peaks(map.power, mask, cfg, map.range_oversampling))
    cloud.push_back(make_detection(refined_range(map, pk),
                                   map.velocity_axis_mps[pk.doppler_bin], 0.0, 0.0, pk.power));
  sort_by_intensity(cloud);
  return cloud;
}

PointCloud extract_pointcloud_beam_scan(const BeamScanMap& map, const CfarConfig& cfg,
                                        double min_range_m) {
  const std::size_t nl = map.power.dim(0), nel = map.power.dim(1), naz = map.power.dim(2);
  std::vector<double> best(nl, 0.0);
  std::vector<std::size_t> beam(nl, 0);
  for (std::size_t l = 0; l < nl; ++l)
    for (std::size_t e = 0; e < nel; ++e)
      for (std::size_t a = 0; a < naz; ++a)
        if (map.power(l, e, a) > best[l]) {
          best[l] = map.power(l, e, a);
          beam[l] = e * naz + a;
        }
  std::size_t first = 0;
  while (first < nl && map.range_axis_m[first] < min_range_m) ++first;
  for (std::size_t l = 0; l < first; ++l) best[l] = 0.0;
  const auto hits = cfar_1d(best, cfg);

  // Treat the profile as an (L x 1) map so peak picking and blanking match
  // the range-Doppler path.
  RMatrix prof({nl, 1});
  Mask m({nl, 1}, 0);
  for (std::size_t l = 0; l < nl; ++l) {
    prof(l, 0) = best[l];
    m(l, 0) = hits[l];
  }
  PointCloud cloud;
  for (const auto& pk : pick_peaks(prof, m, cfg)) {
    const std::size_t l = pk.range_bin;
    const std::size_t b = beam[l], e = b / naz, a = b % naz;
    double pos = static_cast<double>(l);
    if (l > 0 && l + 1 < nl) {
      const double mag[3] = {std::sqrt(map.power(l - 1, e, a)), std::sqrt(map.power(l, e, a)),
                             std::sqrt(map.power(l + 1, e, a))};
      pos += quadratic_peak(mag, 1) - 1.0;
    }
    cloud.push_back(make_detection(axis_at(map.range_axis_m, pos), 0.0, map.az_grid[a],
                                   map.el_grid[e], pk.power));
  }
  sort_by_intensity(cloud);
  return cloud;
}

}  // namespace isac
