#include "riemlap/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace riemlap {

std::string matrix_to_csv(const Mat& m) {
  std::string out;
  out.reserve(static_cast<size_t>(m.size()) * 20);
  char buf[40];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out += buf;
      out += (j + 1 < m.cols()) ? ',' : '\n';
    }
  }
  return out;
}

void write_matrix_csv(const std::string& path, const Mat& m) {
  write_text_file(path, matrix_to_csv(m));
}

Mat read_matrix_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open CSV file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str()) throw std::invalid_argument(path + ": non-numeric field '" + tok + "'");
      vals.push_back(v);
    }
    if (!rows.empty() && vals.size() != rows.front().size())
      throw std::invalid_argument(path + ": ragged rows");
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::invalid_argument(path + ": empty CSV");
  Mat m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("failed writing file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace riemlap
