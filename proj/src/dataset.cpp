#include "riemlap/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace riemlap {

namespace {

bool parse_number(const std::string& tok, double& out) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      toks.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  toks.push_back(cur);
  return toks;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

void Dataset::validate_binary_labels() const {
  for (int i = 0; i < n(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw std::invalid_argument("label at row " + std::to_string(i + 1) +
                                  " is " + std::to_string(y[i]) +
                                  "; binary labels must be 0 or 1");
    }
  }
}

Dataset parse_csv_dataset(const std::string& content, bool standardize, bool add_intercept,
                          const std::string& origin) {
  std::istringstream in(content);
  std::string line;
  std::vector<std::vector<double>> rows;
  size_t ncols = 0;
  int lineno = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto toks = split_csv_line(line);
    std::vector<double> vals(toks.size());
    bool numeric = true;
    for (size_t j = 0; j < toks.size(); ++j) {
      if (!parse_number(trim(toks[j]), vals[j])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first_data_line) {
        first_data_line = false;  // header row
        continue;
      }
      throw std::invalid_argument(origin + ": cannot parse row " + std::to_string(lineno));
    }
    first_data_line = false;
    if (rows.empty()) {
      ncols = vals.size();
      if (ncols < 2)
        throw std::invalid_argument(origin + ": need at least one covariate and a label column");
    } else if (vals.size() != ncols) {
      throw std::invalid_argument(origin + ": ragged row " + std::to_string(lineno) + " has " +
                                  std::to_string(vals.size()) + " fields, expected " +
                                  std::to_string(ncols));
    }
    for (size_t j = 0; j < vals.size(); ++j) {
      if (!std::isfinite(vals[j])) {
        throw std::invalid_argument(origin + ": non-finite value at row " +
                                    std::to_string(lineno) + ", column " + std::to_string(j + 1));
      }
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::invalid_argument(origin + ": no data rows");

  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(ncols) - 1;
  Dataset ds;
  ds.X.resize(n, d + (add_intercept ? 1 : 0));
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) ds.X(i, j) = rows[i][j];
    ds.y[i] = rows[i][d];
  }
  if (standardize) {
    for (int j = 0; j < d; ++j) {
      const double mean = ds.X.col(j).mean();
      const double var = (ds.X.col(j).array() - mean).square().mean();
      if (var <= 0.0) {
        throw std::invalid_argument(origin + ": column " + std::to_string(j + 1) +
                                    " is constant; cannot standardize");
      }
      ds.X.col(j) = (ds.X.col(j).array() - mean) / std::sqrt(var);
    }
    ds.standardized = true;
  }
  if (add_intercept) ds.X.col(d).setOnes();
  return ds;
}

Dataset load_csv_dataset(const std::string& path, bool standardize, bool add_intercept) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open dataset file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_csv_dataset(buf.str(), standardize, add_intercept, path);
}

}  // namespace riemlap
