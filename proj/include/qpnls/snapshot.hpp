#pragma once

// JSON snapshot files: one CoefficientField plus the iterate index, epsilon
// and the hash of the configuration that produced it.

#include <filesystem>
#include <string>

#include "qpnls/fields.hpp"

namespace qpnls {

struct Snapshot {
  CoefficientField field;
  int k = 0;
  double epsilon = 0.0;
  std::string config_hash;
};

std::string snapshot_json(const CoefficientField& field, int k, double epsilon,
                          const std::string& config_hash);
void write_snapshot(const std::filesystem::path& path, const CoefficientField& field, int k,
                    double epsilon, const std::string& config_hash);

// Throws MissingArtifactError when the file does not exist and
// ValidationError when it does not describe a consistent field.
Snapshot parse_snapshot(const std::string& text);
Snapshot read_snapshot(const std::filesystem::path& path);

// Whole file as a string; MissingArtifactError if absent.
std::string read_text(const std::filesystem::path& path);
// Writes `text` verbatim, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qpnls
