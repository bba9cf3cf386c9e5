#pragma once

// CSV exchange format for point configurations and atomic measures:
//
//   w,x1,x2,...,xd      (header; the w column is optional)
//   0.5,1,0,0
//   0.5,0,1,0
//
// Without a w column every atom gets weight 1/N. Coordinates are normalized
// on read when their norm is within 1e-6 of 1 (text round-off); anything
// further from the sphere is rejected.

#include <filesystem>
#include <iosfwd>

#include "ninput/sphere.hpp"

namespace ninput {

DiscreteMeasure read_measure_csv(std::istream& in);
DiscreteMeasure read_measure_csv(const std::filesystem::path& path);

/// Reads the coordinates only; a w column, if present, is ignored.
PointConfiguration read_points_csv(std::istream& in);
PointConfiguration read_points_csv(const std::filesystem::path& path);

/// Writes with full round-trip precision.
void write_measure_csv(std::ostream& out, const DiscreteMeasure& measure);
void write_points_csv(std::ostream& out, const PointConfiguration& config);

}  // namespace ninput
