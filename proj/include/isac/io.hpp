#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "isac/detector.hpp"
#include "isac/doppler.hpp"
#include "isac/pulsed.hpp"
#include "isac/selfmix.hpp"
#include "isac/tensor.hpp"

namespace isac {

class FormatError : public Error {
 public:
  using Error::Error;
};

enum class ElementType : std::uint8_t { kFloat32 = 1, kComplex64 = 2 };

struct AxisInfo {
  std::string name;
  std::string unit;
  double start = 0.0;
  double step = 1.0;
  bool operator==(const AxisInfo&) const = default;
};

/// Binary tensor container. Layout (little endian):
///   "ISACTNSR" | u16 version | u8 rank | u8 element type | u32 dims[rank]
///   | row-major payload (float32 or complex64)
///   | u32 metadata bytes | UTF-8 lines "name\tunit\tstart\tstep\n" per axis
struct MatrixFile {
  ElementType type = ElementType::kFloat32;
  std::vector<std::uint32_t> dims;
  std::vector<float> real;                  ///< used for kFloat32
  std::vector<std::complex<float>> complex; ///< used for kComplex64
  std::vector<AxisInfo> axes;

  std::size_t element_count() const;
  bool operator==(const MatrixFile&) const = default;
};

inline constexpr std::uint16_t kMatrixFileVersion = 1;

void write_matrix(const MatrixFile& m, const std::filesystem::path& path);
MatrixFile read_matrix(const std::filesystem::path& path);

MatrixFile to_matrix_file(const CirMatrix& cir);
MatrixFile to_matrix_file(const RangeDopplerMap& map);
MatrixFile to_matrix_file(const RadarCube& cube);

void write_pointcloud_csv(const PointCloud& cloud, const std::filesystem::path& path);
void write_pointcloud_ply(const PointCloud& cloud, const std::filesystem::path& path);
void write_range_doppler_csv(const RangeDopplerMap& map, const std::filesystem::path& path);
/// Peak-tap power per beam; rows are elevations, columns azimuths.
void write_beam_scan_csv(const BeamScanMap& map, const std::filesystem::path& path);
void write_if_sequence_csv(const IfSequence& seq, const std::filesystem::path& path);
void write_spectrogram_csv(const Spectrogram& sg, const std::filesystem::path& path);
void write_sweep_csv(const std::vector<SweepPoint>& sweep, const std::filesystem::path& path);
void write_ranging_csv(const RangingResult& res, const std::filesystem::path& path);

struct GainRow {
  int n;
  double measured_db;
  double theory_db;
};
void write_gain_csv(const std::vector<GainRow>& rows, const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace isac
