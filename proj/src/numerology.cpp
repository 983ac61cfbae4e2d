#include "isac/numerology.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "isac/fft.hpp"

namespace isac {
namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ValidationError(std::string("numerology.") + field + ": " + what);
}

}  // namespace

void validate(const OfdmNumerology& num) {
  require(std::isfinite(num.carrier_freq_hz) && num.carrier_freq_hz > 0,
          "carrier_freq_hz", "must be positive and finite");
  require(std::isfinite(num.sample_rate_hz) && num.sample_rate_hz > 0,
          "sample_rate_hz", "must be positive and finite");
  require(num.fft_size > 0, "fft_size", "must be positive");
  require(num.n_valid_subcarriers > 0, "n_valid_subcarriers", "must be positive");
  // DC stays empty, so at most fft_size - 1 rows can be mapped.
  require(num.n_valid_subcarriers < num.fft_size, "n_valid_subcarriers",
          "must be less than fft_size (DC bin is unused)");
  require(num.cp_len_samples >= 0, "cp_len_samples", "must be non-negative");
  require(num.n_symbols_per_frame > 0, "n_symbols_per_frame", "must be positive");
}

DerivedParams derive_params(const OfdmNumerology& num) {
  validate(num);
  DerivedParams d{};
  d.subcarrier_spacing_hz = num.sample_rate_hz / num.fft_size;
  d.symbol_duration_s = num.samples_per_symbol() / num.sample_rate_hz;
  d.bandwidth_hz = num.n_valid_subcarriers * d.subcarrier_spacing_hz;
  d.range_resolution_m = kSpeedOfLight / (2.0 * d.bandwidth_hz);
  d.wavelength_m = kSpeedOfLight / num.carrier_freq_hz;
  d.tap_distance_m = kSpeedOfLight / (2.0 * num.sample_rate_hz);
  d.max_velocity_two_symbol_mps = d.wavelength_m / (4.0 * d.symbol_duration_s);
  d.velocity_resolution_mps =
      d.wavelength_m / (2.0 * num.n_symbols_per_frame * d.symbol_duration_s);
  return d;
}

OfdmNumerology numerology_preset(std::string_view name) {
  if (name == "table1-60ghz") {
    return {.carrier_freq_hz = 60e9,
            .sample_rate_hz = 1.2288e9,
            .fft_size = 1024,
            .n_valid_subcarriers = 900,
            .cp_len_samples = 276,
            .n_symbols_per_frame = 256};
  }
  if (name == "nr100-30khz") {
    // 273 resource blocks at 30 kHz, normal cyclic prefix at 4096 points.
    return {.carrier_freq_hz = 3.5e9,
            .sample_rate_hz = 122.88e6,
            .fft_size = 4096,
            .n_valid_subcarriers = 3276,
            .cp_len_samples = 288,
            .n_symbols_per_frame = 14};
  }
  if (name == "wifi20-5ghz") {
    // Channel 44.
    return {.carrier_freq_hz = 5.22e9,
            .sample_rate_hz = 20e6,
            .fft_size = 64,
            .n_valid_subcarriers = 52,
            .cp_len_samples = 16,
            .n_symbols_per_frame = 256};
  }
  throw ValidationError("numerology.preset: unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> numerology_preset_names() {
  return {"table1-60ghz", "nr100-30khz", "wifi20-5ghz"};
}

std::vector<int> centered_bins(const OfdmNumerology& num) {
  const int n_neg = num.n_valid_subcarriers / 2;
  std::vector<int> bins(num.n_valid_subcarriers);
  for (int m = 0; m < num.n_valid_subcarriers; ++m)
    bins[m] = m < n_neg ? m - n_neg : m - n_neg + 1;
  return bins;
}

ResourceGrid::ResourceGrid(int n_subcarriers, int n_symbols, std::vector<int> bins)
    : n_subcarriers_(n_subcarriers),
      n_symbols_(n_symbols),
      bins_(std::move(bins)),
      cells_(static_cast<std::size_t>(n_subcarriers) * n_symbols) {}

ResourceGrid generate_frame(const OfdmNumerology& num, std::uint64_t seed) {
  validate(num);
  ResourceGrid grid(num.n_valid_subcarriers, num.n_symbols_per_frame, centered_bins(num));
  const double a = 1.0 / std::sqrt(2.0);
  const cplx alphabet[4] = {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
  // Raw engine output is fully specified by the standard, so frames are
  // reproducible across toolchains.
  std::mt19937_64 rng(seed);
  for (int q = 0; q < grid.n_symbols(); ++q)
    for (auto& cell : grid.symbol(q)) cell = alphabet[rng() >> 62];
  return grid;
}

CVec modulate(const ResourceGrid& grid, const OfdmNumerology& num) {
  validate(num);
  if (grid.n_subcarriers() != num.n_valid_subcarriers) {
    std::ostringstream os;
    os << "modulate: grid has " << grid.n_subcarriers() << " subcarriers x "
       << grid.n_symbols() << " symbols, expected " << num.n_valid_subcarriers
       << " subcarriers";
    throw ShapeError(os.str());
  }
  const int n = num.fft_size;
  const int cp = num.cp_len_samples;
  const auto& bins = grid.subcarrier_bins();
  CVec out(static_cast<std::size_t>(grid.n_symbols()) * (n + cp));
  CVec body(n);
  for (int q = 0; q < grid.n_symbols(); ++q) {
    std::fill(body.begin(), body.end(), cplx{});
    auto col = grid.symbol(q);
    for (int m = 0; m < grid.n_subcarriers(); ++m) body[(bins[m] + n) % n] = col[m];
    fft::inverse(body);
    auto dst = out.begin() + static_cast<std::ptrdiff_t>(q) * (n + cp);
    std::copy(body.end() - cp, body.end(), dst);
    std::copy(body.begin(), body.end(), dst + cp);
  }
  return out;
}

ResourceGrid demodulate(std::span<const cplx> samples, const OfdmNumerology& num) {
  validate(num);
  const std::size_t sym_len = num.samples_per_symbol();
  if (samples.size() % sym_len != 0) {
    std::ostringstream os;
    os << "demodulate: " << samples.size() << " samples leave a partial symbol of "
       << samples.size() % sym_len << " samples (symbol length " << sym_len << ")";
    throw ShapeError(os.str());
  }
  const int n_sym = static_cast<int>(samples.size() / sym_len);
  const int n = num.fft_size;
  ResourceGrid grid(num.n_valid_subcarriers, n_sym, centered_bins(num));
  const auto& bins = grid.subcarrier_bins();
  CVec body(n);
  for (int q = 0; q < n_sym; ++q) {
    auto src = samples.subspan(q * sym_len + num.cp_len_samples, n);
    std::copy(src.begin(), src.end(), body.begin());
    fft::forward(body);
    auto col = grid.symbol(q);
    for (int m = 0; m < grid.n_subcarriers(); ++m) col[m] = body[(bins[m] + n) % n];
  }
  return grid;
}

double papr_db(std::span<const cplx> samples) {
  if (samples.empty()) throw ValidationError("papr_db: empty sample stream");
  double peak = 0.0, total = 0.0;
  for (const auto& s : samples) {
    const double p = std::norm(s);
    peak = std::max(peak, p);
    total += p;
  }
  const double mean = total / samples.size();
  if (mean <= 0.0) throw ValidationError("papr_db: zero-power sample stream");
  return power_to_db(peak / mean);
}

}  // namespace isac
