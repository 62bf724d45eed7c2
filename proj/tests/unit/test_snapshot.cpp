#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fsl/error.hpp"
#include "fsl/snapshot.hpp"

using namespace fsl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "fsl_unit";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("snapshot round trip with a jump background") {
  Grid g(1, 16.0, 256);
  auto bg = FarFieldProfile::jump(0.75, 0.1, 2.5);
  auto u = Field::sample(g, [](Point x) { return std::sin(x[0]) * std::exp(-x[0] * x[0]); }, bg, 3.25);
  auto path = scratch("jump.fsl").string();
  write_snapshot(u, path);
  auto back = read_snapshot(path);
  CHECK(back.grid().points() == 256);
  CHECK(back.grid().half_width() == 16.0);
  CHECK(back.time() == 3.25);
  REQUIRE(back.has_background());
  CHECK(*back.background() == bg);
  CHECK(back.data() == u.data());
  auto info = read_snapshot_info(path);
  CHECK(info.background_kind == 1);
  CHECK(info.file_size == fs::file_size(path));
}

TEST_CASE("snapshot round trip in 2D with an angular table") {
  Grid g(2, 4.0, 32);
  std::vector<double> table{1.0, 0.5, -0.25, -1.0, 0.0, 0.75};
  auto u = Field::sample(g, [](Point x) { return x[0] - 2 * x[1]; }, FarFieldProfile::angular(table, 1.5), 0.5);
  auto path = scratch("angular.fsl").string();
  write_snapshot(u, path);
  auto back = read_snapshot(path);
  CHECK(back.grid().dim() == 2);
  CHECK(back.background()->table() == table);
  CHECK(back.background()->scale() == 1.5);
  CHECK(back.data() == u.data());
}

TEST_CASE("corrupt snapshots are rejected") {
  auto bad = scratch("bad.fsl").string();
  {
    std::ofstream out(bad, std::ios::binary);
    out << "XXXX0000";
  }
  CHECK_THROWS_AS(read_snapshot(bad), Error);
  Grid g(1, 4.0, 16);
  auto good = scratch("short.fsl").string();
  write_snapshot(Field::zeros(g), good);
  fs::resize_file(good, fs::file_size(good) - 8);
  CHECK_THROWS_AS(read_snapshot(good), Error);
  write_snapshot(Field::zeros(g), good);
  {
    std::ofstream out(good, std::ios::binary | std::ios::app);
    out << "junk";
  }
  CHECK_THROWS_AS(read_snapshot(good), Error);
  CHECK_THROWS_AS(read_snapshot(scratch("missing.fsl").string()), Error);
}
