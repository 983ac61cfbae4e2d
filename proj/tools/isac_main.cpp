#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "isac/run.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDM monostatic sensing simulator"};
  std::string mode_str, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("mode", mode_str, "e2e | range-doppler | pointcloud | selfmix | pulse | mc-snr")
      ->required();
  app.add_option("--config", config_path, "YAML run configuration")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_option("--seed", seed, "run seed (overrides seed)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitConfig, "usage", e.what());
  }

  try {
    const auto mode = isac::parse_mode(mode_str);
    auto cfg = isac::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const auto res = isac::run(mode, cfg, cfg.output_dir);
    for (const auto& f : res.files) std::cout << cfg.output_dir << '/' << f << '\n';
    return 0;
  } catch (const isac::ConfigError& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const isac::ValidationError& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const std::exception& e) {
    return fail(kExitRuntime, "runtime", e.what());
  }
}
