#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rds/solver.hpp"

namespace rds {

namespace {

constexpr char kMagic[6] = {'R', 'D', 'F', 'L', 'D', '1'};

template <class T>
void put(std::string& buf, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  buf.append(reinterpret_cast<const char*>(b), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& data) : d_(data) {}
  template <class T>
  T get(bool swap = false) {
    need(sizeof(T));
    unsigned char b[sizeof(T)];
    std::memcpy(b, d_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    if ((std::endian::native == std::endian::big) != swap) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  void need(std::size_t n) const {
    if (d_.size() - pos_ < n)
      throw TruncationError("snapshot truncated: need " + std::to_string(n) + " more bytes at offset " +
                            std::to_string(pos_) + ", file has " + std::to_string(d_.size()));
  }
  std::size_t remaining() const { return d_.size() - pos_; }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

 private:
  const std::string& d_;
  std::size_t pos_ = 0;
};

std::size_t n_dims(GridMode m) { return m == GridMode::plane ? 2 : 1; }

}  // namespace

void write_file_atomic(const std::string& path, const std::string& bytes) {
  // Write beside the target, then rename, so readers never see half a file.
  const std::string tmp = path + ".part";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename " + tmp + " to " + path);
}

void write_snapshot(const Field& f, const std::string& path) {
  std::string buf(kMagic, sizeof(kMagic));
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(f.grid.mode));
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(f.grid.space_dim()));
  put<std::uint64_t>(buf, f.grid.nx);
  if (f.grid.mode == GridMode::plane) put<std::uint64_t>(buf, f.grid.ny);
  put<double>(buf, f.grid.origin.x);
  if (f.grid.mode == GridMode::plane) put<double>(buf, f.grid.origin.y);
  put<double>(buf, f.grid.h);
  put<double>(buf, f.t);
  for (double v : f.u) put<double>(buf, std::clamp(v, 0.0, 1.0));

  write_file_atomic(path, buf);
}

Field read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  const std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  Reader r(data);
  r.need(sizeof(kMagic));
  if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) throw FormatError(path + ": not an RDFLD1 snapshot");
  r.seek(sizeof(kMagic));
  const auto mode = r.get<std::uint8_t>();
  const auto space = r.get<std::uint8_t>();
  if (mode > 2) throw FormatError(path + ": unknown grid mode " + std::to_string(mode));
  Grid g;
  g.mode = static_cast<GridMode>(mode);
  if ((g.mode == GridMode::line && space != 1) || (g.mode == GridMode::plane && space != 2) ||
      (g.mode == GridMode::radial && (space < 1 || space > 4)))
    throw FormatError(path + ": dimension " + std::to_string(space) + " does not fit mode " + to_string(g.mode));
  g.radial_dim = g.mode == GridMode::radial ? space : 2;
  const std::size_t k = n_dims(g.mode);

  // Dimensions decide the byte order: the little-endian reading must account
  // for the rest of the file exactly.
  const std::size_t header_end = r.pos() + 8 * k;
  auto payload = [&](bool swap) -> std::optional<std::pair<std::uint64_t, std::uint64_t>> {
    r.seek(header_end - 8 * k);
    const std::uint64_t nx = r.get<std::uint64_t>(swap);
    const std::uint64_t ny = k == 2 ? r.get<std::uint64_t>(swap) : 1;
    if (nx == 0 || ny == 0 || nx > (1ull << 40) / ny) return std::nullopt;
    return std::pair{nx, ny};
  };
  r.need(8 * k);
  const auto le = payload(false);
  const std::size_t fixed = 8 * k + 16;
  auto expected = [&](std::pair<std::uint64_t, std::uint64_t> d) { return header_end + fixed + 8 * d.first * d.second; };
  if (!le || expected(*le) < data.size()) {
    const auto be = payload(true);
    if (be && expected(*be) == data.size()) throw FormatError(path + ": foreign byte order");
    if (!le) throw FormatError(path + ": implausible grid dimensions");
    throw FormatError(path + ": trailing bytes after the field");
  }
  g.nx = le->first;
  g.ny = le->second;
  r.seek(header_end);
  g.origin.x = r.get<double>();
  if (k == 2) g.origin.y = r.get<double>();
  g.h = r.get<double>();
  Field f;
  f.t = r.get<double>();
  f.grid = g;
  r.need(8 * g.size());
  f.u.resize(g.size());
  for (double& v : f.u) v = r.get<double>();
  return f;
}

}  // namespace rds
