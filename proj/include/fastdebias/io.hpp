#pragma once

#include <Eigen/Core>
#include <string>

namespace fastdebias {

// Binary container, little-endian:
//   matrix:  'F''D''B''M'  u8 version(=1)  u64 rows  u64 cols  f64[rows*cols] column-major
//   vector:  'F''D''B''V'  u8 version(=1)  u64 len                f64[len]
// CSV is provided for small fixtures (one row per line, comma separated).
// Paths ending in ".csv" are read/written as CSV, anything else as binary.

inline constexpr unsigned char kFormatVersion = 1;

void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::string& path);

void write_vector(const std::string& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(const std::string& path);

// Shortest decimal digits that round-trip a double (printf %.17g trimmed).
std::string format_double(double v);

}  // namespace fastdebias
