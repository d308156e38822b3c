#include "qpnls/snapshot.hpp"

#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "qpnls/error.hpp"

namespace qpnls {

using nlohmann::json;

std::string snapshot_json(const CoefficientField& field, int k, double epsilon,
                          const std::string& config_hash) {
  json j;
  j["config_hash"] = config_hash;
  j["k"] = k;
  j["epsilon"] = epsilon;
  j["basis"] = {{"omega", field.basis().omega()}, {"omega_prime", field.basis().omega_prime()}};
  j["box"] = {{"rx", field.box().radius_x}, {"ry", field.box().radius_y}};
  j["grid"] = {{"t_end", field.grid().t_end()}, {"nodes", field.grid().intervals()}};
  json modes = json::array();
  for (const auto& m : field.table().modes()) modes.push_back(json::array({m.m, m.n}));
  j["modes"] = std::move(modes);
  json values = json::array();
  for (std::size_t n = 0; n < field.num_nodes(); ++n) {
    json row = json::array();
    for (auto z : field.node(n)) row.push_back(json::array({z.real(), z.imag()}));
    values.push_back(std::move(row));
  }
  j["values"] = std::move(values);
  return j.dump() + "\n";
}

void write_snapshot(const std::filesystem::path& path, const CoefficientField& field, int k,
                    double epsilon, const std::string& config_hash) {
  write_text(path, snapshot_json(field, k, epsilon, config_hash));
}

Snapshot parse_snapshot(const std::string& text) {
  try {
    const json j = json::parse(text);
    FrequencyBasis basis(j.at("basis").at("omega").get<std::vector<double>>(),
                         j.at("basis").at("omega_prime").get<std::vector<double>>());
    TruncationBox box{j.at("box").at("rx").get<int>(), j.at("box").at("ry").get<int>()};
    if (box.radius_x < 0 || box.radius_y < 0) throw ValidationError("negative box radius");
    const int intervals = j.at("grid").at("nodes").get<int>();
    const TimeGrid grid = intervals == 0
                              ? TimeGrid::single()
                              : TimeGrid::uniform(j.at("grid").at("t_end").get<double>(), intervals);
    auto table = std::make_shared<const ModeTable>(basis.nu1(), basis.nu2(), box);
    const auto& modes = j.at("modes");
    if (modes.size() != table->size()) throw ValidationError("snapshot mode list does not match its box");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      ModeIndex idx{modes[i].at(0).get<IntVec>(), modes[i].at(1).get<IntVec>()};
      if (!(idx == (*table)[i])) throw ValidationError("snapshot modes are not in canonical order");
    }
    const auto& rows = j.at("values");
    if (rows.size() != grid.num_points()) throw ValidationError("snapshot node count does not match its grid");
    std::vector<Complex> values;
    values.reserve(grid.num_points() * table->size());
    for (const auto& row : rows) {
      if (row.size() != table->size()) throw ValidationError("snapshot row has the wrong length");
      for (const auto& z : row) values.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    }
    return Snapshot{CoefficientField(std::move(basis), table, grid, std::move(values)),
                    j.at("k").get<int>(), j.at("epsilon").get<double>(),
                    j.at("config_hash").get<std::string>()};
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed snapshot: ") + e.what());
  }
}

Snapshot read_snapshot(const std::filesystem::path& path) { return parse_snapshot(read_text(path)); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("missing artifact: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace qpnls
