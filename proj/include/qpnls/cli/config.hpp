#pragma once

// Run configuration: a single JSON document.
//
// {
//   "basis":   {"omega": [1, 1.414], "omega_prime": [1, 1.732]},
//   "box":     {"rx": 2, "ry": 2},
//   "profile": {"kind": "exponential", "kappa1": 1, "kappa2": 1},   // or "polynomial" with r1, r2
//   "epsilon": 0.01,
//   "grid":    {"t_end": 0.5}  |  {"t_eps_fraction": 1.0},
//   "nodes": 32, "k_max": 30, "tol": 1e-12, "seed": 0,
//   "rho1": 0.1, "rho2": 0.1,
//   "output_dir": "run",
//   "sweep": {"epsilons": [...], "eta": 0.5, "horizon_constant": 1, "t_cap": 10, "fixed_t": 1}
// }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpnls/fields.hpp"

namespace qpnls::cli {

struct SweepConfig {
  std::vector<double> epsilons;
  double eta = 0.5;
  double horizon_constant = 1.0;
  double t_cap = 10.0;
  std::optional<double> fixed_t;
};

struct RunConfig {
  std::vector<double> omega;
  std::vector<double> omega_prime;
  int rx = 0;
  int ry = 0;
  DecayProfile profile;
  double epsilon = 0.0;
  std::optional<double> t_end;
  std::optional<double> t_eps_fraction;
  int nodes = 16;
  int k_max = 30;
  double tol = 1e-12;
  std::uint64_t seed = 0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  std::string output_dir = "run";
  std::optional<SweepConfig> sweep;

  FrequencyBasis basis() const { return FrequencyBasis(omega, omega_prime); }
  TruncationBox box() const { return TruncationBox{rx, ry}; }
  int nu1() const { return static_cast<int>(omega.size()); }
  int nu2() const { return static_cast<int>(omega_prime.size()); }
};

// Parses and validates; every problem found is listed in one ValidationError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical JSON of the computational parameters (output_dir excluded) and
// its 64-bit FNV-1a hash as 16 hex digits.
std::string canonical_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

// Final time: t_end, or t_eps_fraction times the proven horizon.
double resolve_t_end(const RunConfig& config);

}  // namespace qpnls::cli
