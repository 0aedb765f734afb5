#pragma once

#include <string>

#include "riemlap/types.hpp"

namespace riemlap {

/// Covariates plus labels. Binary labels for classification targets,
/// real-valued for regression.
struct Dataset {
  Mat X;             // N x D, intercept column (all ones) last when requested
  Vec y;             // N
  bool standardized = false;

  int n() const { return static_cast<int>(X.rows()); }
  int dim() const { return static_cast<int>(X.cols()); }

  void validate_binary_labels() const;
};

/// Reads a rectangular numeric CSV whose last column is the label. A header
/// row is auto-detected (non-numeric first row). With standardize, every
/// covariate column is z-scored to mean 0 / population std 1; the intercept
/// column (appended last when add_intercept) is never standardized.
///
/// Ragged rows, non-finite entries and constant columns under
/// standardization are reported with row/column positions.
Dataset load_csv_dataset(const std::string& path, bool standardize, bool add_intercept);

/// Parses CSV content already in memory (same rules as load_csv_dataset).
Dataset parse_csv_dataset(const std::string& content, bool standardize, bool add_intercept,
                          const std::string& origin = "<memory>");

}  // namespace riemlap
