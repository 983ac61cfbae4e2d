#include "isac/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace isac {

namespace {

std::string join(const std::vector<std::string>& v, std::string_view sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i];
  }
  return s;
}

template <typename T>
constexpr const char* type_label() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  else if constexpr (std::is_integral_v<T>) return "an integer";
  else if constexpr (std::is_floating_point_v<T>) return "a number";
  else return "a string";
}

/// One YAML mapping plus the keys read from it so far.
class Section {
 public:
  Section(YAML::Node node, std::string path, std::vector<std::string>& errors)
      : node_(std::move(node)), path_(std::move(path)), errors_(errors) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      error("", "expected a mapping");
      node_ = YAML::Node();
    }
  }

  bool has(const std::string& key) const { return node_ && node_[key]; }
  std::vector<std::string>& errors() { return errors_; }

  YAML::Node raw(const std::string& key) {
    used_.insert(key);
    return node_ ? node_[key] : YAML::Node();
  }

  template <typename T>
  std::optional<T> get(const std::string& key) {
    auto n = raw(key);
    if (!n || n.IsNull()) return std::nullopt;
    if (!n.IsScalar()) {
      error(key, std::string("expected ") + type_label<T>());
      return std::nullopt;
    }
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      error(key, std::string("expected ") + type_label<T>() + ", got '" + n.Scalar() + "'");
      return std::nullopt;
    }
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (auto v = get<T>(key)) out = *v;
  }

  Section child(const std::string& key) { return Section(raw(key), name(key), errors_); }

  void error(const std::string& key, const std::string& msg) {
    errors_.push_back(name(key) + ": " + msg);
  }

  std::string name(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  /// Reports keys present in the mapping that were never read.
  void finish() {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) error(key, "unknown key");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

template <typename F>
void collect(std::vector<std::string>& errors, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    errors.push_back(e.what());
  }
}

void read_numerology(Section s, RunConfig& cfg, std::vector<std::string>& errors) {
  s.read("preset", cfg.numerology_preset);
  if (cfg.numerology_preset == "custom") {
    cfg.num = OfdmNumerology{};
  } else {
    try {
      cfg.num = numerology_preset(cfg.numerology_preset);
    } catch (const Error&) {
      s.error("preset", "unknown preset '" + cfg.numerology_preset + "' (known: " +
                            join(numerology_preset_names(), ", ") + ", custom)");
    }
  }
  s.read("carrier_freq_hz", cfg.num.carrier_freq_hz);
  s.read("sample_rate_hz", cfg.num.sample_rate_hz);
  s.read("fft_size", cfg.num.fft_size);
  s.read("n_valid_subcarriers", cfg.num.n_valid_subcarriers);
  s.read("cp_len_samples", cfg.num.cp_len_samples);
  s.read("n_symbols_per_frame", cfg.num.n_symbols_per_frame);
  s.finish();
  collect(errors, [&] { validate(cfg.num); });
}

void read_array(Section s, RunConfig& cfg, std::vector<std::string>& errors) {
  s.read("preset", cfg.array_preset);
  if (cfg.array_preset == "custom") {
    cfg.geom = ArrayGeometry{};
  } else {
    try {
      cfg.geom = array_preset(cfg.array_preset);
    } catch (const Error&) {
      s.error("preset", "unknown preset '" + cfg.array_preset + "' (known: table1, single, custom)");
    }
  }
  s.read("n_horizontal", cfg.geom.n_horizontal);
  s.read("n_vertical", cfg.geom.n_vertical);
  s.read("spacing_horizontal_wavelengths", cfg.geom.spacing_horizontal_wavelengths);
  s.read("spacing_vertical_wavelengths", cfg.geom.spacing_vertical_wavelengths);
  auto fov = s.child("fov");
  fov.read("az_min_deg", cfg.geom.fov.az_min_deg);
  fov.read("az_max_deg", cfg.geom.fov.az_max_deg);
  fov.read("el_min_deg", cfg.geom.fov.el_min_deg);
  fov.read("el_max_deg", cfg.geom.fov.el_max_deg);
  fov.finish();
  s.finish();
  collect(errors, [&] { validate(cfg.geom); });
}

void read_scene(Section s, RunConfig& cfg) {
  Scene& sc = cfg.scene;
  if (auto v = s.get<double>("si_amplitude_db")) sc.si_amplitude = db_to_amplitude(*v);
  s.read("si_suppression_db", sc.si_suppression_db);
  if (auto v = s.get<double>("noise_power_db")) sc.noise_power = db_to_power(*v);
  if (!(sc.si_suppression_db >= 0.0)) s.error("si_suppression_db", "must be >= 0");

  auto list = s.raw("scatterers");
  if (list && !list.IsNull()) {
    if (!list.IsSequence()) {
      s.error("scatterers", "expected a list");
    } else {
      for (std::size_t i = 0; i < list.size(); ++i) {
        Section e(list[i], s.name("scatterers[" + std::to_string(i) + "]"), s.errors());
        Scatterer t;
        if (!e.has("range_m")) e.error("range_m", "required");
        e.read("range_m", t.range_m);
        e.read("velocity_mps", t.radial_velocity_mps);
        e.read("azimuth_deg", t.azimuth_deg);
        e.read("elevation_deg", t.elevation_deg);
        if (auto v = e.get<double>("reflectivity_db")) t.reflectivity = db_to_amplitude(*v);
        if (!(t.range_m > 0.0)) e.error("range_m", "must be positive");
        if (!(std::abs(t.azimuth_deg) <= 90.0)) e.error("azimuth_deg", "must lie in [-90, 90]");
        if (!(std::abs(t.elevation_deg) <= 90.0))
          e.error("elevation_deg", "must lie in [-90, 90]");
        if (!std::isfinite(t.radial_velocity_mps)) e.error("velocity_mps", "must be finite");
        if (!(t.reflectivity > 0.0) || !std::isfinite(t.reflectivity))
          e.error("reflectivity_db", "must be finite");
        e.finish();
        sc.scatterers.push_back(t);
      }
    }
  }
  s.finish();
}

void read_receiver(Section s, RunConfig& cfg) {
  auto& rx = cfg.receiver;
  if (auto m = s.get<std::string>("model")) {
    if (*m == "frequency")
      rx.model = ReceiveModel::kFrequencyDomain;
    else if (*m == "time")
      rx.model = ReceiveModel::kTimeDomain;
    else
      s.error("model", "expected 'frequency' or 'time', got '" + *m + "'");
  }
  if (auto b = s.get<std::string>("adc_bits")) {
    if (*b == "ideal") {
      rx.front_end.adc_bits.reset();
    } else {
      try {
        std::size_t used = 0;
        const int bits = std::stoi(*b, &used);
        if (used != b->size() || bits < 1 || bits > 32) throw std::invalid_argument(*b);
        rx.front_end.adc_bits = bits;
        rx.front_end.enabled = true;
      } catch (const std::exception&) {
        s.error("adc_bits", "expected 'ideal' or an integer in [1, 32], got '" + *b + "'");
      }
    }
  }
  if (auto f = s.get<std::string>("full_scale")) {
    if (*f == "auto") {
      rx.auto_full_scale = true;
    } else {
      try {
        std::size_t used = 0;
        rx.front_end.full_scale = std::stod(*f, &used);
        if (used != f->size() || !(rx.front_end.full_scale > 0.0)) throw std::invalid_argument(*f);
        rx.auto_full_scale = false;
      } catch (const std::exception&) {
        s.error("full_scale", "expected 'auto' or a positive number, got '" + *f + "'");
      }
    }
  }
  s.finish();
}

Window read_window(Section& s, const std::string& key, Window def) {
  if (auto w = s.get<std::string>(key)) {
    try {
      return parse_window(*w);
    } catch (const Error&) {
      s.error(key, "unknown window '" + *w + "' (known: rectangular, hann)");
    }
  }
  return def;
}

std::optional<std::vector<double>> read_list(Section& s, const std::string& key) {
  auto n = s.raw(key);
  if (!n || n.IsNull()) return std::nullopt;
  if (!n.IsSequence() || n.size() == 0) {
    s.error(key, "expected a non-empty list of numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  for (const auto& v : n) {
    try {
      out.push_back(v.as<double>());
    } catch (const YAML::Exception&) {
      s.error(key, "expected a list of numbers");
      return std::nullopt;
    }
  }
  return out;
}

void read_processing(Section s, RunConfig& cfg) {
  auto& p = cfg.processing;
  if (auto m = s.get<std::string>("sensing")) {
    if (*m == "digital")
      cfg.sensing = SensingMode::kDigital;
    else if (*m == "beam-scan")
      cfg.sensing = SensingMode::kBeamScan;
    else
      s.error("sensing", "expected 'digital' or 'beam-scan', got '" + *m + "'");
  }
  if (auto w = s.get<std::string>("range_window")) {
    if (*w == "rectangular" || *w == "rect")
      p.range_window = RangeWindow::kRectangular;
    else if (*w == "hann")
      p.range_window = RangeWindow::kHann;
    else
      s.error("range_window", "unknown window '" + *w + "' (known: rectangular, hann)");
  }
  p.doppler_window = read_window(s, "doppler_window", p.doppler_window);
  s.read("range_oversampling", p.range_oversampling);
  s.read("combine", p.combine);
  s.read("remove_static", p.remove_static);
  s.read("max_range_m", p.max_range_m);
  s.read("min_range_m", p.min_range_m);
  s.read("angle_step_deg", cfg.angle_step_deg);
  s.read("write_cube", cfg.write_cube);
  auto az = read_list(s, "az_grid");
  auto el = read_list(s, "el_grid");
  auto cb = s.child("codebook");
  cb.read("az_count", cfg.codebook.az_count);
  cb.read("el_count", cfg.codebook.el_count);
  cb.finish();

  if (p.range_oversampling < 1 || p.range_oversampling > 64)
    s.error("range_oversampling", "must lie in [1, 64]");
  if (p.combine < 1) s.error("combine", "must be >= 1");
  else if (cfg.num.n_symbols_per_frame > 0 && cfg.num.n_symbols_per_frame % p.combine != 0)
    s.error("combine", "must divide n_symbols_per_frame (" +
                           std::to_string(cfg.num.n_symbols_per_frame) + ")");
  if (!(p.max_range_m >= 0.0)) s.error("max_range_m", "must be >= 0");
  if (!(p.min_range_m >= 0.0)) s.error("min_range_m", "must be >= 0");
  if (!(cfg.angle_step_deg > 0.0)) s.error("angle_step_deg", "must be positive");
  if (cfg.codebook.az_count < 1) s.error("codebook.az_count", "must be >= 1");
  if (cfg.codebook.el_count < 1) s.error("codebook.el_count", "must be >= 1");

  const auto& fov = cfg.geom.fov;
  if (cfg.angle_step_deg > 0.0) {
    p.az_grid = az ? *az : stepped_grid(fov.az_min_deg, fov.az_max_deg, cfg.angle_step_deg);
    p.el_grid = el ? *el : stepped_grid(fov.el_min_deg, fov.el_max_deg, cfg.angle_step_deg);
  }
  s.finish();
}

void read_cfar(Section s, RunConfig& cfg, std::vector<std::string>& errors) {
  auto& c = cfg.processing.cfar;
  s.read("guard_range", c.guard_range);
  s.read("guard_doppler", c.guard_doppler);
  s.read("training_range", c.training_range);
  s.read("training_doppler", c.training_doppler);
  s.read("false_alarm_rate", c.false_alarm_rate);
  s.read("relative_floor_db", c.relative_floor_db);
  s.read("sidelobe_margin_db", c.sidelobe_margin_db);
  s.read("sidelobe_scale_bins", c.sidelobe_scale_bins);
  s.finish();
  collect(errors, [&] { validate(c); });
}

void read_selfmix(Section s, RunConfig& cfg, std::vector<std::string>& errors) {
  auto& m = cfg.selfmix;
  s.read("n_symbols", m.sequence.n_symbols);
  s.read("n_antennas", m.sequence.n_antennas);
  s.read("antenna_spacing_wavelengths", m.sequence.antenna_spacing_wavelengths);
  if (auto v = s.get<double>("symbol_period_s")) m.sequence.symbol_period_s = *v;
  s.read("stft_len", m.stft_len);
  s.read("hop", m.hop);
  m.window = read_window(s, "window", m.window);
  s.finish();
  collect(errors, [&] { validate(m.sequence); });
  if (m.stft_len < 4) errors.push_back("selfmix.stft_len: must be >= 4");
  if (m.hop < 1) errors.push_back("selfmix.hop: must be >= 1");
  const int per_antenna = m.sequence.n_symbols / std::max(1, m.sequence.n_antennas);
  if (m.stft_len > per_antenna)
    errors.push_back("selfmix.stft_len: exceeds the " + std::to_string(per_antenna) +
                     " symbols available per antenna");
}

void read_pulse(Section s, RunConfig& cfg) {
  auto& p = cfg.pulse;
  s.read("switch_delay_s", p.switch_delay_s);
  s.read("rx_window_s", p.rx_window_s);
  s.read("max_range_m", p.ranging.max_range_m);
  s.read("threshold_mads", p.ranging.threshold_mads);
  s.read("dynamic_range_db", p.ranging.dynamic_range_db);
  s.read("snr_db", p.snr_db);
  s.read("trials", p.trials);
  auto sw = s.child("sweep");
  if (s.has("sweep")) p.sweep = true;
  sw.read("start_m", p.sweep_start_m);
  sw.read("stop_m", p.sweep_stop_m);
  sw.read("step_m", p.sweep_step_m);
  sw.finish();
  if (!(p.switch_delay_s >= 0.0)) s.error("switch_delay_s", "must be >= 0");
  if (!(p.rx_window_s >= 0.0)) s.error("rx_window_s", "must be >= 0");
  if (!(p.ranging.max_range_m > 0.0)) s.error("max_range_m", "must be positive");
  if (!(p.ranging.threshold_mads > 0.0)) s.error("threshold_mads", "must be positive");
  if (!(p.ranging.dynamic_range_db > 0.0)) s.error("dynamic_range_db", "must be positive");
  if (p.trials < 1) s.error("trials", "must be >= 1");
  if (p.sweep && (!(p.sweep_step_m > 0.0) || !(p.sweep_stop_m >= p.sweep_start_m) ||
                  !(p.sweep_start_m > 0.0)))
    s.error("sweep", "needs 0 < start_m <= stop_m and step_m > 0");
  s.finish();
}

void read_mc_snr(Section s, RunConfig& cfg) {
  auto& m = cfg.mc_snr;
  auto f = s.raw("factors");
  if (f && !f.IsNull()) {
    m.factors.clear();
    try {
      if (!f.IsSequence() || f.size() == 0) throw YAML::Exception(YAML::Mark(), "");
      for (const auto& v : f) m.factors.push_back(v.as<int>());
    } catch (const YAML::Exception&) {
      s.error("factors", "expected a non-empty list of integers");
    }
  }
  s.read("trials", m.trials);
  s.read("snr_db", m.snr_db);
  s.read("range_m", m.range_m);
  if (m.trials < 1) s.error("trials", "must be >= 1");
  if (!(m.range_m > 0.0)) s.error("range_m", "must be positive");
  for (int n : m.factors)
    if (n < 1 || (cfg.num.n_symbols_per_frame > 0 &&
                  (cfg.num.n_symbols_per_frame % n != 0 || cfg.num.n_symbols_per_frame / n < 2)))
      s.error("factors", std::to_string(n) + " must divide n_symbols_per_frame (" +
                             std::to_string(cfg.num.n_symbols_per_frame) +
                             ") and leave at least two symbols");
  s.finish();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error(join(errors, "; ")), errors_(std::move(errors)) {}

Mode parse_mode(std::string_view name) {
  if (name == "e2e") return Mode::kE2e;
  if (name == "range-doppler") return Mode::kRangeDoppler;
  if (name == "pointcloud") return Mode::kPointcloud;
  if (name == "selfmix") return Mode::kSelfmix;
  if (name == "pulse") return Mode::kPulse;
  if (name == "mc-snr") return Mode::kMcSnr;
  throw ConfigError({"mode: unknown mode '" + std::string(name) +
                     "' (known: e2e, range-doppler, pointcloud, selfmix, pulse, mc-snr)"});
}

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kE2e: return "e2e";
    case Mode::kRangeDoppler: return "range-doppler";
    case Mode::kPointcloud: return "pointcloud";
    case Mode::kSelfmix: return "selfmix";
    case Mode::kPulse: return "pulse";
    case Mode::kMcSnr: return "mc-snr";
  }
  return "unknown";
}

bool RunConfig::has_section(std::string_view name) const {
  return std::find(sections.begin(), sections.end(), name) != sections.end();
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  std::vector<std::string> errors;
  RunConfig cfg;
  cfg.num = numerology_preset(cfg.numerology_preset);
  cfg.geom = array_preset(cfg.array_preset);
  Section top(root, "", errors);
  if (root && root.IsMap())
    for (const auto& kv : root) cfg.sections.push_back(kv.first.as<std::string>());

  if (auto m = top.get<std::string>("mode")) {
    try {
      cfg.mode = parse_mode(*m);
    } catch (const ConfigError& e) {
      errors.insert(errors.end(), e.errors().begin(), e.errors().end());
    }
  }
  if (auto s = top.get<std::string>("seed")) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(*s, &used);
      if (used != s->size() || s->front() == '-') throw std::invalid_argument(*s);
    } catch (const std::exception&) {
      top.error("seed", "expected a non-negative integer, got '" + *s + "'");
    }
  }
  top.read("output_dir", cfg.output_dir);

  // Order matters: later sections read the numerology and array.
  read_numerology(top.child("numerology"), cfg, errors);
  read_array(top.child("array"), cfg, errors);
  read_scene(top.child("scene"), cfg);
  read_receiver(top.child("receiver"), cfg);
  read_processing(top.child("processing"), cfg);
  read_cfar(top.child("cfar"), cfg, errors);
  read_selfmix(top.child("selfmix"), cfg, errors);
  read_pulse(top.child("pulse"), cfg);
  read_mc_snr(top.child("mc_snr"), cfg);
  top.finish();
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError({"config: cannot open '" + path.string() + "'"});
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void require_mode_sections(const RunConfig& cfg, Mode mode) {
  std::vector<std::string> errors;
  auto need = [&](const char* section) {
    if (!cfg.has_section(section))
      errors.push_back(std::string(section) + ": section required by mode " + mode_name(mode));
  };
  switch (mode) {
    case Mode::kE2e:
    case Mode::kRangeDoppler:
    case Mode::kPointcloud: need("scene"); break;
    case Mode::kSelfmix: need("scene"); need("selfmix"); break;
    case Mode::kPulse: need("scene"); need("pulse"); break;
    case Mode::kMcSnr: need("mc_snr"); break;
  }
  if (cfg.mode && *cfg.mode != mode)
    errors.push_back("mode: config declares '" + mode_name(*cfg.mode) + "' but '" +
                     mode_name(mode) + "' was requested");
  if (mode == Mode::kRangeDoppler && cfg.sensing == SensingMode::kBeamScan)
    errors.push_back("processing.sensing: range-doppler mode needs digital sensing");
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

}  // namespace isac
