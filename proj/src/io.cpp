#include "isac/io.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace isac {

namespace {

constexpr char kMagic[8] = {'I', 'S', 'A', 'C', 'T', 'N', 'S', 'R'};

template <typename T>
void put_le(std::string& buf, T v) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((u >> (8 * i)) & 0xFF));
}

void put_f32(std::string& buf, float f) { put_le(buf, std::bit_cast<std::uint32_t>(f)); }

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  bool has(std::size_t n) const { return data_.size() - pos_ >= n; }
  template <typename T>
  T get() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  std::string bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (!has(n)) throw FormatError("read_matrix: truncated header");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  return f;
}

double axis_step(const std::vector<double>& axis) {
  return axis.size() > 1 ? axis[1] - axis[0] : 1.0;
}

double axis_start(const std::vector<double>& axis) { return axis.empty() ? 0.0 : axis[0]; }

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

std::size_t MatrixFile::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void write_matrix(const MatrixFile& m, const std::filesystem::path& path) {
  if (m.dims.size() > 255) throw ValidationError("write_matrix: rank above 255");
  const std::size_t n = m.element_count();
  const bool cx = m.type == ElementType::kComplex64;
  if ((cx ? m.complex.size() : m.real.size()) != n)
    throw ShapeError("write_matrix: payload of " +
                     std::to_string(cx ? m.complex.size() : m.real.size()) +
                     " elements for dims product " + std::to_string(n));
  if (!m.axes.empty() && m.axes.size() != m.dims.size())
    throw ShapeError("write_matrix: axis metadata count differs from rank");

  std::string buf(kMagic, sizeof kMagic);
  put_le(buf, kMatrixFileVersion);
  put_le(buf, static_cast<std::uint8_t>(m.dims.size()));
  put_le(buf, static_cast<std::uint8_t>(m.type));
  for (auto d : m.dims) put_le(buf, d);
  if (cx) {
    for (const auto& c : m.complex) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw ValidationError("write_matrix: non-finite element");
      put_f32(buf, c.real());
      put_f32(buf, c.imag());
    }
  } else {
    for (float f : m.real) {
      if (!std::isfinite(f)) throw ValidationError("write_matrix: non-finite element");
      put_f32(buf, f);
    }
  }
  std::string meta;
  for (const auto& a : m.axes) {
    if (a.name.find_first_of("\t\n") != std::string::npos ||
        a.unit.find_first_of("\t\n") != std::string::npos)
      throw ValidationError("write_matrix: axis name or unit contains a tab or newline");
    meta += fmt::format("{}\t{}\t{}\t{}\n", a.name, a.unit, a.start, a.step);
  }
  put_le(buf, static_cast<std::uint32_t>(meta.size()));
  buf += meta;
  auto f = open_out(path, true);
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw Error("write failed: " + path.string());
}

MatrixFile read_matrix(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  Reader rd(ss.str());
  if (!rd.has(sizeof kMagic) || rd.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic))
    throw FormatError("read_matrix: bad magic");
  const auto version = rd.get<std::uint16_t>();
  if (version != kMatrixFileVersion)
    throw FormatError("read_matrix: unsupported version " + std::to_string(version));
  MatrixFile m;
  const auto rank = rd.get<std::uint8_t>();
  const auto type = rd.get<std::uint8_t>();
  if (type != static_cast<std::uint8_t>(ElementType::kFloat32) &&
      type != static_cast<std::uint8_t>(ElementType::kComplex64))
    throw FormatError("read_matrix: unknown element type " + std::to_string(type));
  m.type = static_cast<ElementType>(type);
  for (unsigned i = 0; i < rank; ++i) m.dims.push_back(rd.get<std::uint32_t>());
  const std::size_t n = m.element_count();
  const std::size_t width = m.type == ElementType::kComplex64 ? 8 : 4;
  if (rd.remaining() < n * width + 4) throw FormatError("read_matrix: payload length mismatch");
  if (m.type == ElementType::kComplex64) {
    m.complex.resize(n);
    for (auto& c : m.complex) {
      const float re = rd.get_f32();
      c = {re, rd.get_f32()};
    }
  } else {
    m.real.resize(n);
    for (auto& v : m.real) v = rd.get_f32();
  }
  const auto meta_len = rd.get<std::uint32_t>();
  if (rd.remaining() != meta_len) throw FormatError("read_matrix: payload length mismatch");
  std::istringstream meta(rd.bytes(meta_len));
  for (std::string line; std::getline(meta, line);) {
    AxisInfo a;
    std::istringstream ls(line);
    std::string start, step;
    if (!std::getline(ls, a.name, '\t') || !std::getline(ls, a.unit, '\t') ||
        !std::getline(ls, start, '\t') || !std::getline(ls, step))
      throw FormatError("read_matrix: malformed axis metadata");
    a.start = std::stod(start);
    a.step = std::stod(step);
    m.axes.push_back(std::move(a));
  }
  if (!m.axes.empty() && m.axes.size() != m.dims.size())
    throw FormatError("read_matrix: axis metadata count differs from rank");
  return m;
}

MatrixFile to_matrix_file(const CirMatrix& cir) {
  MatrixFile m;
  m.type = ElementType::kComplex64;
  for (auto d : cir.taps.shape()) m.dims.push_back(static_cast<std::uint32_t>(d));
  m.complex.reserve(cir.taps.size());
  for (const auto& c : cir.taps.data())
    m.complex.emplace_back(static_cast<float>(c.real()), static_cast<float>(c.imag()));
  m.axes = {{"range", "m", 0.0, cir.tap_distance_m(1.0)},
            {"slow_time", "s", 0.0, cir.symbol_interval_s()},
            {"element", "index", 0.0, 1.0}};
  return m;
}

MatrixFile to_matrix_file(const RangeDopplerMap& map) {
  MatrixFile m;
  for (auto d : map.power.shape()) m.dims.push_back(static_cast<std::uint32_t>(d));
  for (double v : map.power.data()) m.real.push_back(static_cast<float>(v));
  m.axes = {{"range", "m", axis_start(map.range_axis_m), axis_step(map.range_axis_m)},
            {"velocity", "m/s", axis_start(map.velocity_axis_mps),
             axis_step(map.velocity_axis_mps)}};
  return m;
}

MatrixFile to_matrix_file(const RadarCube& cube) {
  MatrixFile m;
  for (auto d : cube.power.shape()) m.dims.push_back(static_cast<std::uint32_t>(d));
  for (double v : cube.power.data()) m.real.push_back(static_cast<float>(v));
  m.axes = {{"range", "m", axis_start(cube.range_axis_m), axis_step(cube.range_axis_m)},
            {"velocity", "m/s", axis_start(cube.velocity_axis_mps),
             axis_step(cube.velocity_axis_mps)},
            {"azimuth", "deg", axis_start(cube.az_grid), axis_step(cube.az_grid)},
            {"elevation", "deg", axis_start(cube.el_grid), axis_step(cube.el_grid)}};
  return m;
}

void write_pointcloud_csv(const PointCloud& cloud, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# x_m,y_m,z_m,range_m,velocity_mps,azimuth_deg,elevation_deg,intensity_db\n";
  for (const auto& d : cloud)
    f << fmt::format("{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.4f},{:.4f},{:.4f}\n", d.x_m, d.y_m,
                     d.z_m, d.range_m, d.velocity_mps, d.azimuth_deg, d.elevation_deg,
                     power_to_db(d.intensity));
}

void write_pointcloud_ply(const PointCloud& cloud, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "ply\nformat ascii 1.0\n"
    << "element vertex " << cloud.size() << "\n"
    << "property float x\nproperty float y\nproperty float z\n"
    << "property float velocity\nproperty float intensity\nend_header\n";
  for (const auto& d : cloud)
    f << fmt::format("{:.6f} {:.6f} {:.6f} {:.6f} {:.4f}\n", d.x_m, d.y_m, d.z_m,
                     d.velocity_mps, power_to_db(d.intensity));
}

namespace {

void write_matrix_csv(std::ofstream& f, const RMatrix& power, const std::vector<double>& rows,
                      const std::vector<double>& cols, const std::string& corner) {
  f << corner;
  for (double c : cols) f << ',' << fmt::format("{:.6g}", c);
  f << '\n';
  for (std::size_t r = 0; r < power.dim(0); ++r) {
    f << fmt::format("{:.6g}", rows[r]);
    for (std::size_t c = 0; c < power.dim(1); ++c) f << ',' << fmt::format("{:.6e}", power(r, c));
    f << '\n';
  }
}

}  // namespace

void write_range_doppler_csv(const RangeDopplerMap& map, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# range-doppler power (linear); first row: velocity_mps per column; first column: "
       "range_m per row\n";
  write_matrix_csv(f, map.power, map.range_axis_m, map.velocity_axis_mps, "range_m\\velocity_mps");
}

void write_beam_scan_csv(const BeamScanMap& map, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# beam-scan peak-tap power (linear); first row: azimuth_deg per column; first "
       "column: elevation_deg per row\n";
  write_matrix_csv(f, map.peak_map(), map.el_grid, map.az_grid, "elevation_deg\\azimuth_deg");
}

void write_if_sequence_csv(const IfSequence& seq, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# q,re,im,antenna (q: symbol index, interval "
    << format_number(seq.symbol_interval_s / static_cast<double>(seq.n_antennas()))
    << " s; re/im: IF sample, linear)\n";
  const std::size_t na = seq.n_antennas();
  const std::size_t n = na ? seq.z[0].size() : 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < na; ++a) {
      if (i >= seq.z[a].size()) continue;
      const auto& v = seq.z[a][i];
      f << fmt::format("{},{:.9e},{:.9e},{}\n", i * na + a, v.real(), v.imag(), a);
    }
}

void write_spectrogram_csv(const Spectrogram& sg, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# doppler spectrogram power (linear); first row: velocity_mps per column; first "
       "column: time_s per row\n";
  write_matrix_csv(f, sg.power, sg.time_s, sg.velocity_mps, "time_s\\velocity_mps");
}

void write_sweep_csv(const std::vector<SweepPoint>& sweep, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# range_m,detection_rate,trials\n";
  for (const auto& p : sweep)
    f << fmt::format("{:.6f},{:.6f},{}\n", p.range_m, p.detection_rate, p.trials);
}

void write_ranging_csv(const RangingResult& res, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# range_m,lag_samples,statistic (normalised correlation magnitude, linear)\n";
  for (const auto& p : res.peaks)
    f << fmt::format("{:.6f},{},{:.6e}\n", p.range_m, p.lag, p.statistic);
}

void write_gain_csv(const std::vector<GainRow>& rows, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << "# n,measured_gain_db,theory_db\n";
  for (const auto& r : rows)
    f << fmt::format("{},{:.4f},{:.4f}\n", r.n, r.measured_db, r.theory_db);
}

}  // namespace isac
