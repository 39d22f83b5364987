#pragma once

#include <string>

#include "treepde/fdm.hpp"

namespace treepde {

/// Binary dump: 64-byte header (magic "TPDEFLD1", uint32 dim, nx, ny, pad,
/// float64 x_lo, x_hi, y_lo, y_hi, T) followed by nx*ny little-endian
/// float64 values, y outer.
void write_field_binary(const std::string& path, const Field& f);
Field read_field_binary(const std::string& path);

/// CSV with columns x[,y],value after an optional comment line.
void write_field_csv(const std::string& path, const Field& f, const std::string& comment = "");

/// 17 significant digits, enough to round-trip any double.
std::string fmt17(double v);

}  // namespace treepde
