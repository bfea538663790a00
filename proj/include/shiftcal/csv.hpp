#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace shiftcal {

/// Shortest decimal form that round-trips the double exactly.
std::string format_real(double v);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd rows;

  /// Index of a named column, or -1.
  Eigen::Index column(const std::string& name) const;
};

/// Writes `# config_hash: <hash>` (when non-empty), the header, then rows.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows, const std::string& config_hash = {});

/// Reads a numeric CSV with one header line; lines starting with '#' are skipped.
CsvTable read_csv(const std::filesystem::path& path);

/// Writes text and a trailing newline, replacing any existing file.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace shiftcal
