#include "fsl/snapshot.hpp"

#include <bit>
#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "fsl/error.hpp"

namespace fsl {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error("truncated snapshot " + path);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

SnapshotInfo read_header(std::istream& in, const std::string& path) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "FSL1", 4) != 0) throw Error(path + " is not an FSL1 snapshot");
  SnapshotInfo info;
  info.dim = static_cast<int>(get<std::uint32_t>(in, path));
  info.points = get<std::uint32_t>(in, path);
  info.half_width = get<double>(in, path);
  info.time = get<double>(in, path);
  info.background_kind = get<std::uint32_t>(in, path);
  if (info.background_kind == 1) {
    double a = get<double>(in, path), mean = get<double>(in, path), tau = get<double>(in, path);
    info.background = FarFieldProfile::jump(a, mean, tau);
  } else if (info.background_kind == 2) {
    double tau = get<double>(in, path);
    std::uint32_t m = get<std::uint32_t>(in, path);
    if (m > (1u << 20)) throw Error("implausible angular table size in " + path);
    std::vector<double> table(m);
    for (auto& h : table) h = get<double>(in, path);
    info.background = FarFieldProfile::angular(std::move(table), tau);
  } else if (info.background_kind != 0) {
    throw Error("unknown background kind in " + path);
  }
  return info;
}

}  // namespace

void write_snapshot(const Field& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  const Grid& g = field.grid();
  out.write("FSL1", 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.points()));
  put<double>(out, g.half_width());
  put<double>(out, field.time());
  if (!field.background()) {
    put<std::uint32_t>(out, 0);
  } else if (field.background()->dim() == 1) {
    const auto& bg = *field.background();
    put<std::uint32_t>(out, 1);
    put<double>(out, bg.amplitude());
    put<double>(out, bg.mean());
    put<double>(out, bg.scale());
  } else {
    const auto& bg = *field.background();
    put<std::uint32_t>(out, 2);
    put<double>(out, bg.scale());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(bg.table().size()));
    for (double h : bg.table()) put<double>(out, h);
  }
  for (double v : field.values()) put<double>(out, v);
  if (!out) throw Error("failed writing " + path);
}

SnapshotInfo read_snapshot_info(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  auto info = read_header(in, path);
  info.file_size = std::filesystem::file_size(path);
  return info;
}

Field read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  auto info = read_header(in, path);
  Grid grid(info.dim, info.half_width, info.points);
  std::vector<double> values(grid.size());
  for (auto& v : values) v = get<double>(in, path);
  if (in.peek() != std::char_traits<char>::eof()) throw Error("trailing bytes in snapshot " + path);
  return Field(grid, std::move(values), info.background, info.time);
}

}  // namespace fsl
