#pragma once

#include <string>

#include "lfk/grid.hpp"

namespace lfk {

// Binary field snapshot, little-endian:
//   magic "LFK1", u32 dim, u32 points_per_axis, f64 domain_length,
//   f64 time, then n^dim f64 values row-major.
void write_snapshot(const std::string& path, const Field& f, double time);

struct SnapshotData {
    Field field;
    double time;
};
SnapshotData read_snapshot(const std::string& path);

}  // namespace lfk
