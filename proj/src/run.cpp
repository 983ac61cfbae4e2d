#include "isac/run.hpp"

#include <json.hpp>

#include <fstream>

#include "isac/io.hpp"

namespace isac {

namespace {

using nlohmann::json;

std::string range_window_name(RangeWindow w) {
  return w == RangeWindow::kHann ? "hann" : "rectangular";
}

json config_echo(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["numerology"] = {{"preset", c.numerology_preset},
                     {"carrier_freq_hz", c.num.carrier_freq_hz},
                     {"sample_rate_hz", c.num.sample_rate_hz},
                     {"fft_size", c.num.fft_size},
                     {"n_valid_subcarriers", c.num.n_valid_subcarriers},
                     {"cp_len_samples", c.num.cp_len_samples},
                     {"n_symbols_per_frame", c.num.n_symbols_per_frame}};
  j["array"] = {{"preset", c.array_preset},
                {"n_horizontal", c.geom.n_horizontal},
                {"n_vertical", c.geom.n_vertical},
                {"spacing_horizontal_wavelengths", c.geom.spacing_horizontal_wavelengths},
                {"spacing_vertical_wavelengths", c.geom.spacing_vertical_wavelengths},
                {"fov",
                 {{"az_min_deg", c.geom.fov.az_min_deg},
                  {"az_max_deg", c.geom.fov.az_max_deg},
                  {"el_min_deg", c.geom.fov.el_min_deg},
                  {"el_max_deg", c.geom.fov.el_max_deg}}}};
  json sc = json::array();
  for (const auto& s : c.scene.scatterers)
    sc.push_back({{"range_m", s.range_m},
                  {"velocity_mps", s.radial_velocity_mps},
                  {"azimuth_deg", s.azimuth_deg},
                  {"elevation_deg", s.elevation_deg},
                  {"reflectivity", s.reflectivity}});
  j["scene"] = {{"scatterers", sc},
                {"si_amplitude", c.scene.si_amplitude},
                {"si_suppression_db", c.scene.si_suppression_db},
                {"noise_power", c.scene.noise_power}};
  j["receiver"] = {
      {"model", c.receiver.model == ReceiveModel::kTimeDomain ? "time" : "frequency"},
      {"adc_bits", c.receiver.front_end.adc_bits ? json(*c.receiver.front_end.adc_bits)
                                                 : json("ideal")},
      {"full_scale",
       c.receiver.auto_full_scale ? json("auto") : json(c.receiver.front_end.full_scale)}};
  const auto& p = c.processing;
  j["processing"] = {{"sensing", c.sensing == SensingMode::kBeamScan ? "beam-scan" : "digital"},
                     {"range_window", range_window_name(p.range_window)},
                     {"range_oversampling", p.range_oversampling},
                     {"combine", p.combine},
                     {"remove_static", p.remove_static},
                     {"doppler_window", window_name(p.doppler_window)},
                     {"max_range_m", p.max_range_m},
                     {"min_range_m", p.min_range_m},
                     {"az_grid_points", p.az_grid.size()},
                     {"el_grid_points", p.el_grid.size()},
                     {"codebook", {{"az_count", c.codebook.az_count},
                                   {"el_count", c.codebook.el_count}}}};
  j["cfar"] = {{"guard_range", p.cfar.guard_range},
               {"guard_doppler", p.cfar.guard_doppler},
               {"training_range", p.cfar.training_range},
               {"training_doppler", p.cfar.training_doppler},
               {"false_alarm_rate", p.cfar.false_alarm_rate},
               {"relative_floor_db", p.cfar.relative_floor_db},
               {"sidelobe_margin_db", p.cfar.sidelobe_margin_db},
               {"sidelobe_scale_bins", p.cfar.sidelobe_scale_bins}};
  const auto& m = c.selfmix;
  j["selfmix"] = {{"n_symbols", m.sequence.n_symbols},
                  {"n_antennas", m.sequence.n_antennas},
                  {"antenna_spacing_wavelengths", m.sequence.antenna_spacing_wavelengths},
                  {"symbol_period_s", m.sequence.symbol_period_s
                                          ? json(*m.sequence.symbol_period_s)
                                          : json(nullptr)},
                  {"stft_len", m.stft_len},
                  {"hop", m.hop},
                  {"window", window_name(m.window)}};
  const auto& pu = c.pulse;
  j["pulse"] = {{"switch_delay_s", pu.switch_delay_s},
                {"rx_window_s", pu.rx_window_s},
                {"max_range_m", pu.ranging.max_range_m},
                {"threshold_mads", pu.ranging.threshold_mads},
                {"dynamic_range_db", pu.ranging.dynamic_range_db},
                {"snr_db", pu.snr_db},
                {"trials", pu.trials},
                {"sweep", pu.sweep ? json{{"start_m", pu.sweep_start_m},
                                          {"stop_m", pu.sweep_stop_m},
                                          {"step_m", pu.sweep_step_m}}
                                   : json(nullptr)}};
  j["mc_snr"] = {{"factors", c.mc_snr.factors},
                 {"trials", c.mc_snr.trials},
                 {"snr_db", c.mc_snr.snr_db},
                 {"range_m", c.mc_snr.range_m}};
  return j;
}

json derived_json(const OfdmNumerology& num) {
  const auto d = derive_params(num);
  return {{"subcarrier_spacing_hz", d.subcarrier_spacing_hz},
          {"symbol_duration_s", d.symbol_duration_s},
          {"bandwidth_hz", d.bandwidth_hz},
          {"range_resolution_m", d.range_resolution_m},
          {"wavelength_m", d.wavelength_m},
          {"tap_distance_m", d.tap_distance_m},
          {"max_velocity_two_symbol_mps", d.max_velocity_two_symbol_mps},
          {"velocity_resolution_mps", d.velocity_resolution_mps}};
}

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }
  std::filesystem::path add(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

json cloud_summary(const PointCloud& cloud) {
  json j = json::array();
  for (const auto& d : cloud)
    j.push_back({{"range_m", d.range_m},
                 {"velocity_mps", d.velocity_mps},
                 {"azimuth_deg", d.azimuth_deg},
                 {"elevation_deg", d.elevation_deg},
                 {"intensity_db", power_to_db(d.intensity)}});
  return j;
}

void write_cloud(Outputs& out, const PointCloud& cloud) {
  write_pointcloud_csv(cloud, out.add("pointcloud.csv"));
  write_pointcloud_ply(cloud, out.add("pointcloud.ply"));
}

json run_sensing(Mode mode, const RunConfig& cfg, Outputs& out) {
  json summary;
  if (cfg.sensing == SensingMode::kBeamScan) {
    const auto& fov = cfg.geom.fov;
    const auto az = linear_grid(fov.az_min_deg, fov.az_max_deg,
                                static_cast<std::size_t>(cfg.codebook.az_count));
    const auto el = linear_grid(fov.el_min_deg, fov.el_max_deg,
                                static_cast<std::size_t>(cfg.codebook.el_count));
    const auto codebook = make_codebook(cfg.geom, az, el);
    const auto res = sense_beam_scan(cfg.scene, cfg.num, cfg.geom, codebook, cfg.processing,
                                     cfg.seed);
    write_cloud(out, res.cloud);
    if (mode == Mode::kE2e) {
      write_beam_scan_csv(res.map, out.add("beam_scan.csv"));
      write_matrix(to_matrix_file(res.cir), out.add("cir.isac"));
    }
    const auto [ai, ei] = res.map.argmax_beam();
    summary["strongest_beam"] = {{"azimuth_deg", res.map.az_grid[ai]},
                                 {"elevation_deg", res.map.el_grid[ei]}};
    summary["detections"] = cloud_summary(res.cloud);
    return summary;
  }

  const auto res = sense_digital(cfg.scene, cfg.num, cfg.geom, cfg.processing, cfg.receiver,
                                 cfg.seed);
  if (mode != Mode::kRangeDoppler) write_cloud(out, res.cloud);
  if (mode != Mode::kPointcloud) write_range_doppler_csv(res.map, out.add("range_doppler.csv"));
  if (mode == Mode::kRangeDoppler)
    write_matrix(to_matrix_file(res.map), out.add("range_doppler.isac"));
  if (mode == Mode::kE2e) write_matrix(to_matrix_file(res.cir), out.add("cir.isac"));
  if (cfg.write_cube && res.cir.n_elements() > 1) {
    const auto cube = build_cube(res.cir, cfg.geom, cfg.processing.az_grid,
                                 cfg.processing.el_grid, cfg.processing.doppler_window);
    write_matrix(to_matrix_file(cube), out.add("radar_cube.isac"));
  }
  std::size_t detected = 0;
  for (auto v : res.mask.data()) detected += v;
  summary["cfar_cells"] = detected;
  summary["detections"] = cloud_summary(res.cloud);
  return summary;
}

json run_selfmix(const RunConfig& cfg, Outputs& out) {
  const auto seq = selfmix_sequence(cfg.scene, cfg.num, cfg.selfmix.sequence, cfg.seed);
  write_if_sequence_csv(seq, out.add("if_sequence.csv"));
  const auto sg = doppler_spectrogram(seq.z[0], seq.symbol_interval_s, seq.wavelength_m,
                                      cfg.selfmix.stft_len, cfg.selfmix.hop, cfg.selfmix.window);
  write_spectrogram_csv(sg, out.add("spectrogram.csv"));
  json summary;
  summary["symbol_interval_s"] = seq.symbol_interval_s;
  summary["warnings"] = seq.warnings;
  if (seq.n_antennas() >= 2) {
    try {
      const auto a = switched_antenna_phase(seq, 0, 1,
                                            cfg.selfmix.sequence.antenna_spacing_wavelengths);
      summary["angle"] = {{"azimuth_deg", a.azimuth_deg},
                          {"doppler_hz", a.doppler_hz},
                          {"cross_phase_rad", a.cross_phase_rad}};
    } catch (const Error& e) {
      summary["angle"] = {{"error", e.what()}};
    }
  }
  return summary;
}

json run_pulse(const RunConfig& cfg, Outputs& out) {
  SwitchConfig sw;
  sw.switch_delay_s = cfg.pulse.switch_delay_s;
  sw.packet = default_packet(cfg.num, payload_seed(cfg.seed));
  sw.rx_window_s = cfg.pulse.rx_window_s > 0.0
                       ? cfg.pulse.rx_window_s
                       : 2.0 * static_cast<double>(sw.packet.size()) / cfg.num.sample_rate_hz;
  const auto cap = simulate_pulse_cycle(cfg.scene, sw, cfg.num, noise_seed(cfg.seed));
  const auto res = matched_filter_ranging(cap, sw, cfg.num, cfg.pulse.ranging);
  write_ranging_csv(res, out.add("ranging.csv"));
  json summary;
  summary["blind_zone_m"] = blind_zone(sw);
  summary["capture_start_samples"] = cap.capture_start;
  summary["threshold"] = res.threshold;
  summary["warnings"] = cap.warnings;
  if (cfg.pulse.sweep) {
    std::vector<double> ranges;
    for (double r = cfg.pulse.sweep_start_m; r <= cfg.pulse.sweep_stop_m + 1e-9;
         r += cfg.pulse.sweep_step_m)
      ranges.push_back(r);
    const auto sweep = blind_zone_sweep(sw, cfg.num, ranges, cfg.pulse.snr_db,
                                        cfg.pulse.trials, cfg.pulse.ranging, cfg.seed);
    write_sweep_csv(sweep, out.add("sweep.csv"));
  }
  return summary;
}

json run_mc_snr(const RunConfig& cfg, Outputs& out) {
  const auto gains = measure_combining_gain(cfg.num, cfg.mc_snr.factors, cfg.mc_snr.trials,
                                            cfg.mc_snr.snr_db, cfg.mc_snr.range_m, cfg.seed);
  std::vector<GainRow> rows;
  json summary = json::array();
  for (const auto& g : gains) {
    rows.push_back({g.n, g.measured_db, g.theory_db});
    summary.push_back({{"n", g.n}, {"measured_db", g.measured_db}, {"theory_db", g.theory_db}});
  }
  write_gain_csv(rows, out.add("mc_snr.csv"));
  return summary;
}

}  // namespace

RunResult run(Mode mode, const RunConfig& cfg, const std::filesystem::path& out_dir) {
  require_mode_sections(cfg, mode);
  Outputs out(out_dir);
  json summary;
  switch (mode) {
    case Mode::kE2e:
    case Mode::kRangeDoppler:
    case Mode::kPointcloud: summary = run_sensing(mode, cfg, out); break;
    case Mode::kSelfmix: summary = run_selfmix(cfg, out); break;
    case Mode::kPulse: summary = run_pulse(cfg, out); break;
    case Mode::kMcSnr: summary = run_mc_snr(cfg, out); break;
  }
  json manifest;
  manifest["mode"] = mode_name(mode);
  manifest["seed"] = cfg.seed;
  manifest["config"] = config_echo(cfg);
  manifest["derived"] = derived_json(cfg.num);
  manifest["summary"] = summary;
  auto files = out.files();
  files.push_back("manifest.json");
  manifest["outputs"] = files;
  std::ofstream f(out_dir / "manifest.json");
  if (!f) throw Error("cannot write manifest.json");
  f << manifest.dump(2) << '\n';
  return {files};
}

}  // namespace isac
