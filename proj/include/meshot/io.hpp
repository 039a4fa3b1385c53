#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>

#include "meshot/array3.hpp"
#include "meshot/imaging.hpp"

namespace meshot {

namespace fs = std::filesystem;

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const fs::path& path, const std::string& bytes);
std::string read_file(const fs::path& path);

// 16-byte header ("MESHOTRC", u32 version, u32 reserved), u32 x3 dims, then
// interleaved float32 (re, im), all little-endian.
std::string encode_raw_cube(const Array3<cplx>& samples);
Array3<cplx> decode_raw_cube(const std::string& bytes);
void write_raw_cube(const fs::path& path, const Array3<cplx>& samples);
Array3<cplx> read_raw_cube(const fs::path& path);

// 16-byte header ("MESHOTPC", version, reserved), u32 x3 dims, float64 range,
// azimuth and elevation axes, u32-prefixed method tag and meta JSON, then
// float32 values in [r][az][el] order.
std::string encode_power_cube(const PowerCube& cube);
PowerCube decode_power_cube(const std::string& bytes);
void write_power_cube(const fs::path& path, const PowerCube& cube);
PowerCube read_power_cube(const fs::path& path);

// Rows of the matrix become lines, with optional axis header row/column.
std::string matrix_csv(const Eigen::MatrixXd& m, const std::vector<double>& row_axis = {},
                       const std::vector<double>& col_axis = {});

// 8-bit binary PGM. Pixel = 255 * (10 log10(v / max) + window_db) / window_db,
// clamped; rows of the matrix are image rows.
std::string matrix_pgm(const Eigen::MatrixXd& m, double window_db);

enum class Projection { range_azimuth, range_elevation, azimuth_elevation };
Eigen::MatrixXd max_projection(const PowerCube& cube, Projection p);

std::string fnv1a64_hex(const std::string& bytes);

}  // namespace meshot
