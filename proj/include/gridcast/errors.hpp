#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridcast {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A file could not be opened or written.
struct IoError : Error {
  explicit IoError(const std::string& what) : Error(what) {}
};

/// Header row lacks a required column.
struct MissingColumn : Error {
  explicit MissingColumn(const std::string& column)
      : Error("missing column: " + column), column(column) {}
  std::string column;
};

/// A cell failed to parse or violated a per-field constraint.
struct UnparsableValue : Error {
  UnparsableValue(std::size_t row, const std::string& column, const std::string& detail)
      : Error("row " + std::to_string(row) + ", column '" + column + "': " + detail),
        row(row),
        column(column) {}
  std::size_t row;  // 1-based data row number (header excluded)
  std::string column;
};

struct EmptyFile : Error {
  explicit EmptyFile(const std::string& path) : Error("no data rows in " + path) {}
};

struct DuplicateDate : Error {
  explicit DuplicateDate(const std::string& date) : Error("duplicate date: " + date) {}
};

struct NegativeCount : Error {
  explicit NegativeCount(const std::string& detail) : Error("negative count: " + detail) {}
};

struct EmptyIntersection : Error {
  EmptyIntersection() : Error("weather and interruption files share no dates") {}
};

struct BadFractions : Error {
  explicit BadFractions(const std::string& detail) : Error("bad split fractions: " + detail) {}
};

struct DatasetTooSmall : Error {
  DatasetTooSmall(std::size_t have, std::size_t need)
      : Error("dataset has " + std::to_string(have) + " records, need at least " +
              std::to_string(need)) {}
};

/// Design matrix does not have full column rank (e.g. too few distinct x).
struct RankDeficient : Error {
  explicit RankDeficient(const std::string& detail) : Error("rank-deficient design: " + detail) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& detail) : Error("dimension mismatch: " + detail) {}
};

/// Every start of an iterative fit hit the iteration cap before meeting the
/// gradient tolerance.
struct NonConvergence : Error {
  explicit NonConvergence(const std::string& detail) : Error("fit did not converge: " + detail) {}
};

/// Unregularized normal equations are singular.
struct SingularSystem : Error {
  explicit SingularSystem(const std::string& detail) : Error("singular system: " + detail) {}
};

struct MissingCatalogEntry : Error {
  explicit MissingCatalogEntry(const std::string& feature)
      : Error("no catalog entry for feature: " + feature) {}
};

/// Invalid configuration value (rejected before any computation runs).
struct ConfigError : Error {
  explicit ConfigError(const std::string& detail) : Error("bad configuration: " + detail) {}
};

}  // namespace gridcast
