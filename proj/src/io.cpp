#include "solitonlab/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "solitonlab/config.hpp"

namespace solitonlab {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'L', 'S', 'N', 'A', 'P', '\0', '\1'};
constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 8 + 8 + 8 + 8 + 8;

template <class T>
void put(std::string& out, const T& v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(std::string_view bytes, std::size_t& pos) {
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::string escape_csv(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string r = "\"";
  for (char c : cell) {
    if (c == '"') r += '"';
    r += c;
  }
  return r + "\"";
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw Error("CSV row width does not match the header");
  rows.push_back(std::move(row));
}

void CsvTable::add_numeric_row(const std::vector<double>& row) {
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (double v : row) cells.push_back(format_double(v));
  add_row(std::move(cells));
}

std::string render_csv(const CsvTable& table, const Provenance& prov) {
  std::string out = "# solitonlab " + prov.version + " config_hash=" + hash_hex(prov.config_hash) + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += escape_csv(cells[i]);
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table, const Provenance& prov) {
  write_file_atomic(path, render_csv(table, prov));
}

std::string encode_snapshot(const Snapshot& s) {
  if (s.state.u.size() != s.grid.n) throw Error("snapshot field length does not match its grid");
  std::string out;
  out.reserve(kHeaderBytes + 8 * s.grid.n);
  out.append(kMagic, 8);
  put(out, kSnapshotVersion);
  put(out, std::uint32_t{0});
  put(out, static_cast<std::uint64_t>(s.grid.n));
  put(out, s.grid.x_min);
  put(out, s.grid.x_max);
  put(out, s.state.t);
  put(out, s.config_hash);
  out.append(reinterpret_cast<const char*>(s.state.u.data()), 8 * s.state.u.size());
  return out;
}

Snapshot decode_snapshot(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw Error("not a snapshot file (bad magic)");
  std::size_t pos = 8;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kSnapshotVersion) throw Error("unsupported snapshot version " + std::to_string(version));
  get<std::uint32_t>(bytes, pos);
  const auto n = get<std::uint64_t>(bytes, pos);
  const auto x_min = get<double>(bytes, pos);
  const auto x_max = get<double>(bytes, pos);
  Snapshot s;
  s.state.t = get<double>(bytes, pos);
  s.config_hash = get<std::uint64_t>(bytes, pos);
  if (bytes.size() != kHeaderBytes + 8 * n) throw Error("snapshot payload length does not match its header");
  s.grid = Grid1D::create(x_min, x_max, static_cast<std::size_t>(n));
  s.state.u.resize(n);
  std::memcpy(s.state.u.data(), bytes.data() + pos, 8 * n);
  return s;
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  write_file_atomic(path, encode_snapshot(s));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  try {
    return decode_snapshot(read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string snapshot_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u_%06zu.f64", index);
  return buf;
}

std::vector<Snapshot> read_snapshot_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("snapshot directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".f64") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Snapshot> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_snapshot(f));
  return out;
}

}  // namespace solitonlab
