#include "yflow/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace yflow {

namespace {

constexpr std::uint32_t kSnapshotVersion = 1;
constexpr std::uint32_t kSidecarVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw ScenarioError("cannot open '" + path.string() + "' for writing");
  }
  void magic(const char (&m)[5]) { out_.write(m, 4); }
  void u32(std::uint32_t v) { bytes(v, 4); }
  void u64(std::uint64_t v) { bytes(v, 8); }
  void i64(std::int64_t v) { bytes(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { bytes(std::bit_cast<std::uint64_t>(v), 8); }
  void finish() {
    out_.flush();
    if (!out_) throw ScenarioError("write to '" + path_.string() + "' failed");
  }

 private:
  void bytes(std::uint64_t v, int count) {
    char buf[8];
    for (int i = 0; i < count; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(buf, count);
  }
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw ScenarioError("cannot open '" + path.string() + "'");
  }
  void magic(const char (&m)[5]) {
    char buf[4];
    read(buf, 4);
    if (std::string(buf, 4) != std::string(m, 4))
      throw ScenarioError("'" + path_.string() + "' is not a " + std::string(m, 4) + " file");
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  std::uint64_t u64() { return bytes(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(bytes(8)); }
  double f64() { return std::bit_cast<double>(bytes(8)); }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) throw ScenarioError("trailing bytes in '" + path_.string() + "'");
  }

 private:
  void read(char* buf, int count) {
    in_.read(buf, count);
    if (in_.gcount() != count) throw ScenarioError("'" + path_.string() + "' is truncated");
  }
  std::uint64_t bytes(int count) {
    unsigned char buf[8];
    read(reinterpret_cast<char*>(buf), count);
    std::uint64_t v = 0;
    for (int i = 0; i < count; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }
  std::filesystem::path path_;
  std::ifstream in_;
};

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_order(double p) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}

}  // namespace

void save_snapshot(const std::filesystem::path& path, const ScalarField& field) {
  const GridSpec& g = field.grid();
  Writer w(path);
  w.magic("YFLO");
  w.u32(kSnapshotVersion);
  w.u32(static_cast<std::uint32_t>(g.dim()));
  for (int s : g.sizes()) w.u32(static_cast<std::uint32_t>(s));
  for (double l : g.lengths()) w.f64(l);
  for (double v : field.values()) w.f64(v);
  w.finish();
}

ScalarField load_snapshot(const std::filesystem::path& path) {
  Reader r(path);
  r.magic("YFLO");
  const auto version = r.u32();
  if (version != kSnapshotVersion)
    throw ScenarioError("'" + path.string() + "' has unsupported version " + std::to_string(version));
  const auto n = r.u32();
  if (n < 3 || n > 16) throw ScenarioError("'" + path.string() + "' has implausible dimension " + std::to_string(n));
  std::vector<int> sizes(n);
  std::vector<double> lengths(n);
  for (auto& s : sizes) s = static_cast<int>(r.u32());
  for (auto& l : lengths) l = r.f64();
  auto grid = GridSpec::make(sizes, lengths);
  std::vector<double> values(grid->size());
  for (auto& v : values) v = r.f64();
  r.expect_end();
  return ScalarField(grid, std::move(values));
}

ScalarField load_snapshot(const std::filesystem::path& path, const GridPtr& grid) {
  auto field = load_snapshot(path);
  if (!field.grid().same_shape(*grid))
    throw GridMismatch("snapshot '" + path.string() + "' does not match the scenario grid");
  return ScalarField(grid, std::vector<double>(field.values().begin(), field.values().end()));
}

void save_checkpoint(const std::filesystem::path& stem, const RunCursor& cursor, const std::vector<double>& orders) {
  save_snapshot(with_ext(stem, ".yflo"), cursor.state.u);
  Writer w(with_ext(stem, ".yfls"));
  w.magic("YFLS");
  w.u32(kSidecarVersion);
  w.f64(cursor.state.t);
  w.u64(static_cast<std::uint64_t>(cursor.state.step));
  w.f64(cursor.state.dt_last);
  w.f64(cursor.dissipation_cum);
  w.f64(cursor.last_record_t);
  w.f64(cursor.last_record_rate);
  w.i64(cursor.last_record_step);
  w.u32(static_cast<std::uint32_t>(orders.size()));
  for (double p : orders) w.f64(p);
  w.u64(cursor.records.size());
  for (const auto& rec : cursor.records) {
    for (double v : {rec.t, rec.dt, rec.energy, rec.min_u, rec.max_u, rec.volume_g, rec.residual_sup}) w.f64(v);
    for (double v : rec.residual_lp) w.f64(v);
    w.f64(rec.dissipation_cum);
  }
  w.finish();
}

RunCursor load_checkpoint(const std::filesystem::path& stem, const GridPtr& grid) {
  RunCursor c;
  c.state.u = load_snapshot(with_ext(stem, ".yflo"), grid);
  const auto side = with_ext(stem, ".yfls");
  Reader r(side);
  r.magic("YFLS");
  if (r.u32() != kSidecarVersion) throw ScenarioError("'" + side.string() + "' has an unsupported version");
  c.state.t = r.f64();
  c.state.step = static_cast<long long>(r.u64());
  c.state.dt_last = r.f64();
  c.dissipation_cum = r.f64();
  c.last_record_t = r.f64();
  c.last_record_rate = r.f64();
  c.last_record_step = r.i64();
  const auto norders = r.u32();
  for (std::uint32_t k = 0; k < norders; ++k) r.f64();
  const auto nrec = r.u64();
  c.records.resize(nrec);
  for (auto& rec : c.records) {
    rec.t = r.f64();
    rec.dt = r.f64();
    rec.energy = r.f64();
    rec.min_u = r.f64();
    rec.max_u = r.f64();
    rec.volume_g = r.f64();
    rec.residual_sup = r.f64();
    rec.residual_lp.resize(norders);
    for (auto& v : rec.residual_lp) v = r.f64();
    rec.dissipation_cum = r.f64();
  }
  r.expect_end();
  return c;
}

std::vector<std::string> csv_columns(const std::vector<double>& orders) {
  std::vector<std::string> cols{"t", "dt", "energy", "min_u", "max_u", "volume_g", "residual_sup"};
  for (double p : orders) cols.push_back("residual_l" + format_order(p));
  cols.push_back("dissipation_cum");
  return cols;
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ScenarioError("cannot open '" + path.string() + "' for writing");
  const auto cols = csv_columns(traj.lp_orders);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : traj.records) {
    out << format_g17(r.t) << ',' << format_g17(r.dt) << ',' << format_g17(r.energy) << ',' << format_g17(r.min_u)
        << ',' << format_g17(r.max_u) << ',' << format_g17(r.volume_g) << ',' << format_g17(r.residual_sup);
    for (double v : r.residual_lp) out << ',' << format_g17(v);
    out << ',' << format_g17(r.dissipation_cum) << '\n';
  }
  if (!out) throw ScenarioError("write to '" + path.string() + "' failed");
}

Trajectory read_csv(const std::filesystem::path& path, int dimension) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open '" + path.string() + "'");
  Trajectory traj;
  traj.dimension = dimension;
  std::string line;
  if (!std::getline(in, line)) throw ScenarioError("'" + path.string() + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const std::string prefix = "residual_l";
  for (std::size_t i = 7; i + 1 < header.size(); ++i) {
    if (header[i].rfind(prefix, 0) != 0) throw ScenarioError("unexpected column '" + header[i] + "'");
    traj.lp_orders.push_back(std::stod(header[i].substr(prefix.size())));
  }
  if (header != csv_columns(traj.lp_orders)) throw ScenarioError("'" + path.string() + "' has an unexpected header");
  const std::size_t width = header.size();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    try {
      while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ScenarioError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
    if (v.size() != width) throw ScenarioError(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    DiagnosticsRecord r;
    r.t = v[0];
    r.dt = v[1];
    r.energy = v[2];
    r.min_u = v[3];
    r.max_u = v[4];
    r.volume_g = v[5];
    r.residual_sup = v[6];
    r.residual_lp.assign(v.begin() + 7, v.end() - 1);
    r.dissipation_cum = v.back();
    traj.records.push_back(std::move(r));
  }
  return traj;
}

}  // namespace yflow
