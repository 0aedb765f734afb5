#pragma once

#include <string>

#include "riemlap/types.hpp"

namespace riemlap {

/// Writes a matrix as comma-separated rows, full decimal precision (%.17g),
/// no header. The samples interchange format.
void write_matrix_csv(const std::string& path, const Mat& m);
std::string matrix_to_csv(const Mat& m);

/// Reads a numeric CSV (no header) into a matrix.
Mat read_matrix_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace riemlap
