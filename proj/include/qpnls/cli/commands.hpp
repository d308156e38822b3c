#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "qpnls/cli/config.hpp"

namespace qpnls::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kDivergence = 3,
  kBoundFailure = 4,
  kMissingArtifact = 5,
};

struct RunOptions {
  std::optional<std::filesystem::path> out;
  bool override_te = false;
};

// Each command throws qpnls errors; `main` maps them to exit codes.
int cmd_run(const RunConfig& config, const RunOptions& options, std::ostream& log);
int cmd_tree(int k, std::optional<int> ell_cap, double x, std::ostream& csv);
int cmd_verify(const std::filesystem::path& run_dir, const std::optional<RunConfig>& config,
               std::ostream& out);
int cmd_sweep(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_oracle(const std::filesystem::path& run_dir, std::optional<int> steps, std::ostream& out);
// grid_spec: "xmin,xmax,nx,ymin,ymax,ny".
int cmd_synth(const std::filesystem::path& run_dir, const std::string& grid_spec,
              std::optional<int> node, std::ostream& csv);

// Full command line front end; returns the process exit code.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qpnls::cli
