#include "qpnls/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include <json.hpp>

#include "qpnls/combin.hpp"
#include "qpnls/error.hpp"
#include "qpnls/snapshot.hpp"
#include "qpnls/verify.hpp"

namespace qpnls::cli {

using nlohmann::json;

namespace {

class Collector {
 public:
  void add(std::string msg) { errors_.push_back(std::move(msg)); }
  bool empty() const { return errors_.empty(); }
  [[noreturn]] void raise() const {
    std::string all = "invalid configuration:";
    for (const auto& e : errors_) all += "\n  - " + e;
    throw ValidationError(all);
  }

  // Reads j[key] as T; records a message and returns nullopt on failure.
  template <class T>
  std::optional<T> get(const json& j, const char* key, const std::string& where, bool required) {
    if (!j.is_object() || !j.contains(key)) {
      if (required) add(where + key + " is required");
      return std::nullopt;
    }
    try {
      return j.at(key).get<T>();
    } catch (const json::exception&) {
      add(where + key + " has the wrong type");
      return std::nullopt;
    }
  }

 private:
  std::vector<std::string> errors_;
};

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");

  Collector errs;
  RunConfig c;

  static const char* known[] = {"basis", "box",  "profile", "epsilon", "grid",       "nodes",
                                "k_max", "tol",  "seed",    "rho1",    "rho2",       "output_dir",
                                "sweep"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) errs.add("unknown key " + key);
  }

  const json basis = j.value("basis", json());
  if (!j.contains("basis")) errs.add("basis is required");
  if (auto v = errs.get<std::vector<double>>(basis, "omega", "basis.", j.contains("basis")))
    c.omega = *v;
  if (auto v = errs.get<std::vector<double>>(basis, "omega_prime", "basis.", j.contains("basis")))
    c.omega_prime = *v;
  if (j.contains("basis")) {
    if (c.omega.empty()) errs.add("basis.omega must be non-empty");
    if (c.omega_prime.empty()) errs.add("basis.omega_prime must be non-empty");
    if (!all_finite(c.omega) || !all_finite(c.omega_prime)) errs.add("basis entries must be finite");
  }

  const json box = j.value("box", json());
  if (!j.contains("box")) errs.add("box is required");
  if (auto v = errs.get<int>(box, "rx", "box.", j.contains("box"))) c.rx = *v;
  if (auto v = errs.get<int>(box, "ry", "box.", j.contains("box"))) c.ry = *v;
  if (c.rx < 0 || c.ry < 0) errs.add("box radii must be >= 0");

  const json prof = j.value("profile", json());
  if (!j.contains("profile")) errs.add("profile is required");
  const auto kind = errs.get<std::string>(prof, "kind", "profile.", j.contains("profile"));
  if (kind && *kind == "exponential") {
    const auto k1 = errs.get<double>(prof, "kappa1", "profile.", true);
    const auto k2 = errs.get<double>(prof, "kappa2", "profile.", true);
    if (k1 && k2) c.profile = DecayProfile::exponential(*k1, *k2);
  } else if (kind && *kind == "polynomial") {
    const auto r1 = errs.get<double>(prof, "r1", "profile.", true);
    const auto r2 = errs.get<double>(prof, "r2", "profile.", true);
    if (r1 && r2) c.profile = DecayProfile::polynomial(*r1, *r2);
  } else if (kind) {
    errs.add("profile.kind must be exponential or polynomial");
  }
  if (kind && !c.omega.empty() && !c.omega_prime.empty()) {
    try {
      c.profile.validate(c.nu1(), c.nu2());
    } catch (const ValidationError& e) {
      errs.add(e.what());
    }
  }

  if (auto v = errs.get<double>(j, "epsilon", "", true)) {
    c.epsilon = *v;
    if (!std::isfinite(c.epsilon)) errs.add("epsilon must be finite");
  }

  const json grid = j.value("grid", json());
  if (!j.contains("grid")) errs.add("grid is required");
  c.t_end = errs.get<double>(grid, "t_end", "grid.", false);
  c.t_eps_fraction = errs.get<double>(grid, "t_eps_fraction", "grid.", false);
  if (j.contains("grid")) {
    if (c.t_end.has_value() == c.t_eps_fraction.has_value())
      errs.add("grid needs exactly one of t_end and t_eps_fraction");
    if (c.t_end && !(*c.t_end > 0.0 && std::isfinite(*c.t_end))) errs.add("grid.t_end must be > 0");
    if (c.t_eps_fraction && !(*c.t_eps_fraction > 0.0 && std::isfinite(*c.t_eps_fraction)))
      errs.add("grid.t_eps_fraction must be > 0");
    if (c.t_eps_fraction && c.profile.kind != DecayProfile::Kind::exponential)
      errs.add("grid.t_eps_fraction needs an exponential profile");
    if (c.t_eps_fraction && c.epsilon == 0.0)
      errs.add("grid.t_eps_fraction needs epsilon != 0");
  }

  if (auto v = errs.get<int>(j, "nodes", "", false)) c.nodes = *v;
  if (c.nodes < 2 || c.nodes % 2 != 0) errs.add("nodes must be even and >= 2");
  if (auto v = errs.get<int>(j, "k_max", "", false)) c.k_max = *v;
  if (c.k_max < 1) errs.add("k_max must be >= 1");
  if (auto v = errs.get<double>(j, "tol", "", false)) c.tol = *v;
  if (!(c.tol >= 0.0)) errs.add("tol must be >= 0");
  if (auto v = errs.get<std::uint64_t>(j, "seed", "", false)) c.seed = *v;

  const bool expo = c.profile.kind == DecayProfile::Kind::exponential;
  c.rho1 = expo ? c.profile.kappa1 / 8.0 : 0.0;
  c.rho2 = expo ? c.profile.kappa2 / 8.0 : 0.0;
  if (auto v = errs.get<double>(j, "rho1", "", false)) c.rho1 = *v;
  if (auto v = errs.get<double>(j, "rho2", "", false)) c.rho2 = *v;
  if (c.rho1 < 0.0 || c.rho2 < 0.0) errs.add("rho1 and rho2 must be >= 0");
  if (expo && kind && !weighted_norm_in_range(c.profile, c.rho1, c.rho2))
    errs.add("rho must satisfy 0 < kappa_j/2 - 2 rho_j <= 1");

  if (auto v = errs.get<std::string>(j, "output_dir", "", false)) c.output_dir = *v;

  if (j.contains("sweep")) {
    SweepConfig s;
    const json& sw = j.at("sweep");
    if (auto v = errs.get<std::vector<double>>(sw, "epsilons", "sweep.", true)) s.epsilons = *v;
    for (double e : s.epsilons)
      if (!(e > 0.0 && std::isfinite(e))) errs.add("sweep.epsilons must be positive");
    if (auto v = errs.get<double>(sw, "eta", "sweep.", false)) s.eta = *v;
    if (!(s.eta > 0.0 && s.eta < 1.0)) errs.add("sweep.eta must lie in (0, 1)");
    if (auto v = errs.get<double>(sw, "horizon_constant", "sweep.", false)) s.horizon_constant = *v;
    if (!(s.horizon_constant > 0.0)) errs.add("sweep.horizon_constant must be > 0");
    if (auto v = errs.get<double>(sw, "t_cap", "sweep.", false)) s.t_cap = *v;
    if (!(s.t_cap > 0.0)) errs.add("sweep.t_cap must be > 0");
    s.fixed_t = errs.get<double>(sw, "fixed_t", "sweep.", false);
    if (s.fixed_t && !(*s.fixed_t > 0.0)) errs.add("sweep.fixed_t must be > 0");
    c.sweep = s;
  }

  // Resonance check only once the lattice itself is sane.
  if (errs.empty()) {
    try {
      FrequencyBasis::checked(c.omega, c.omega_prime, c.rx, c.ry);
    } catch (const ValidationError& e) {
      errs.add(e.what());
    }
  }
  if (!errs.empty()) errs.raise();
  return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

std::string canonical_json(const RunConfig& c) {
  json j;
  j["basis"] = {{"omega", c.omega}, {"omega_prime", c.omega_prime}};
  j["box"] = {{"rx", c.rx}, {"ry", c.ry}};
  if (c.profile.kind == DecayProfile::Kind::exponential)
    j["profile"] = {{"kind", "exponential"}, {"kappa1", c.profile.kappa1}, {"kappa2", c.profile.kappa2}};
  else
    j["profile"] = {{"kind", "polynomial"}, {"r1", c.profile.r1}, {"r2", c.profile.r2}};
  j["epsilon"] = c.epsilon;
  if (c.t_end) j["grid"] = {{"t_end", *c.t_end}};
  if (c.t_eps_fraction) j["grid"] = {{"t_eps_fraction", *c.t_eps_fraction}};
  j["nodes"] = c.nodes;
  j["k_max"] = c.k_max;
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  j["rho1"] = c.rho1;
  j["rho2"] = c.rho2;
  if (c.sweep) {
    json s = {{"epsilons", c.sweep->epsilons},
              {"eta", c.sweep->eta},
              {"horizon_constant", c.sweep->horizon_constant},
              {"t_cap", c.sweep->t_cap}};
    if (c.sweep->fixed_t) s["fixed_t"] = *c.sweep->fixed_t;
    j["sweep"] = s;
  }
  return j.dump();
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical_json(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double resolve_t_end(const RunConfig& c) {
  if (c.t_end) return *c.t_end;
  return *c.t_eps_fraction * time_scale(c.profile, c.nu1(), c.nu2(), std::abs(c.epsilon));
}

}  // namespace qpnls::cli
