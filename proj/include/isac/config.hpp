#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isac/array.hpp"
#include "isac/numerology.hpp"
#include "isac/pipeline.hpp"
#include "isac/pulsed.hpp"
#include "isac/scene.hpp"
#include "isac/selfmix.hpp"

namespace isac {

/// Every problem found while loading a config, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

enum class Mode { kE2e, kRangeDoppler, kPointcloud, kSelfmix, kPulse, kMcSnr };
Mode parse_mode(std::string_view name);
std::string mode_name(Mode m);

enum class SensingMode { kDigital, kBeamScan };

struct CodebookConfig {
  int az_count = 16;
  int el_count = 16;
};

struct SelfmixRunConfig {
  SelfmixConfig sequence;
  int stft_len = 64;
  int hop = 16;
  Window window = Window::kHann;
};

struct PulseRunConfig {
  double switch_delay_s = 20e-9;
  double rx_window_s = 0.0;  ///< 0: two packet lengths
  RangingConfig ranging;
  bool sweep = false;
  double sweep_start_m = 1.0;
  double sweep_stop_m = 6.0;
  double sweep_step_m = 0.25;
  double snr_db = 20.0;
  int trials = 200;
};

struct McSnrConfig {
  std::vector<int> factors{2, 4, 8, 16};
  int trials = 200;
  double snr_db = 0.0;
  double range_m = 3.0;
};

struct RunConfig {
  std::optional<Mode> mode;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  std::string numerology_preset = "table1-60ghz";
  OfdmNumerology num;
  std::string array_preset = "table1";
  ArrayGeometry geom;

  Scene scene;
  ReceiverConfig receiver;
  SensingMode sensing = SensingMode::kDigital;
  double angle_step_deg = 1.0;
  ProcessingConfig processing;
  CodebookConfig codebook;
  bool write_cube = false;

  SelfmixRunConfig selfmix;
  PulseRunConfig pulse;
  McSnrConfig mc_snr;

  /// Sections present in the source file.
  std::vector<std::string> sections;
  bool has_section(std::string_view name) const;
};

/// YAML text -> validated config. Unknown keys and invalid values are all
/// collected into one ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Checks the sections a mode needs; throws ConfigError.
void require_mode_sections(const RunConfig& cfg, Mode mode);

}  // namespace isac
