#pragma once

#include <string>
#include <vector>

namespace dbsplace {

/// Shortest round-trip decimal form of a double ("." separator, no locale).
std::string format_double(double value);

/// Buffered CSV writer that lands atomically: rows accumulate in memory and
/// write_to() emits through a temp file + rename, so an existing result set is
/// never partially overwritten.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::string to_string() const;

  /// Throws IoError on any filesystem failure.
  void write_to(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace dbsplace
