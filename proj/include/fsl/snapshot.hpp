#pragma once

#include <cstdint>
#include <string>

#include "fsl/field.hpp"

namespace fsl {

/// Header of a field snapshot file.
///
/// Layout (little-endian): "FSL1", uint32 n, uint32 N, f64 X, f64 t,
/// uint32 background kind (0 none, 1 jump, 2 angular) followed by
/// f64 amplitude, f64 mean, f64 tau for a jump or f64 tau, uint32 M,
/// f64 h[M] for an angular table, then N^n f64 samples in row-major order.
struct SnapshotInfo {
  int dim = 1;
  std::size_t points = 0;
  double half_width = 0.0;
  double time = 0.0;
  std::uint32_t background_kind = 0;
  std::optional<FarFieldProfile> background;
  std::uintmax_t file_size = 0;
};

void write_snapshot(const Field& field, const std::string& path);
Field read_snapshot(const std::string& path);
SnapshotInfo read_snapshot_info(const std::string& path);

}  // namespace fsl
