#pragma once

#include "nasal/geometry.hpp"

#include <string>

namespace nasal {

enum class CloudFormat { xyz, ply, scanner_grid };

CloudFormat cloud_format_from_string(const std::string& s);
std::string to_string(CloudFormat f);

/// Reads a point cloud.
///
/// Formats:
///  - xyz: one "x y z" triple per line; blank lines and '#' comments allowed.
///  - ply: vertex positions from ascii or binary_little_endian PLY.
///  - scanner_grid: header "rows cols", then rows*cols row-major records
///    "x y z flag"; flag 0 marks the point invalid (kept, flagged).
///
/// Throws ParseError with line/byte offset on malformed input and
/// DegenerateInputError on an empty cloud.
PointCloud load_point_cloud(const std::string& path, CloudFormat format);

/// Writes ASCII xyz (valid and invalid points alike; xyz has no flag channel).
void save_point_cloud_xyz(const PointCloud& cloud, const std::string& path);

/// Writes the scanner_grid format; `rows`*`cols` must equal cloud.size().
void save_point_cloud_scanner_grid(const PointCloud& cloud, long rows, long cols,
                                   const std::string& path);

}  // namespace nasal
