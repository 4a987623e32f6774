#include "jsonio.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace ubw1 {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  require(!j.is_discarded(), errc::parse_error, "malformed JSON");
  return j;
}

json space_to_json(const MetricSpace& sp) {
  json j;
  j["points"] = sp.points();
  if (sp.euclidean_mode())
    j["metric"] = "euclidean";
  else
    j["metric"] = {{"matrix", sp.matrix()}};
  return j;
}

SpacePtr space_from_json(const json& j) {
  require(j.contains("points") && j["points"].is_array(), errc::parse_error,
          "measure JSON needs a 'points' array");
  std::vector<std::vector<double>> pts =
      j["points"].get<std::vector<std::vector<double>>>();
  if (!j.contains("metric") || (j["metric"].is_string() && j["metric"] == "euclidean"))
    return MetricSpace::euclidean(std::move(pts));
  require(j["metric"].is_object() && j["metric"].contains("matrix"), errc::parse_error,
          "metric must be \"euclidean\" or {\"matrix\": [[..]..]}");
  auto mat = j["metric"]["matrix"].get<std::vector<std::vector<double>>>();
  return MetricSpace::explicit_matrix(std::move(pts), std::move(mat));
}

Coupling coupling_from_json(const json& j, const SpacePtr& sp) {
  auto m = j.get<std::vector<std::vector<double>>>();
  return Coupling(sp, std::move(m));
}

}  // namespace

DiscreteMeasure measure_from_json(const std::string& text) {
  json j = parse(text);
  SpacePtr sp = space_from_json(j);
  require(j.contains("weights") && j["weights"].is_array(), errc::parse_error,
          "measure JSON needs a 'weights' array");
  auto w = j["weights"].get<std::vector<double>>();
  require(static_cast<int>(w.size()) == sp->size(), errc::parse_error,
          "weight list must match the point count exactly");
  return DiscreteMeasure(sp, std::move(w));
}

std::string measure_to_json(const DiscreteMeasure& rho) {
  json j = space_to_json(*rho.space);
  j["weights"] = rho.weights;
  return j.dump(2);
}

LocalDiscrepancy model_from_json(const std::string& text) {
  json j = parse(text);
  require(j.contains("h_s") && j["h_s"].is_object(), errc::parse_error,
          "model JSON needs an 'h_s' object");
  const json& h = j["h_s"];
  require(h.contains("breakpoints") && h.contains("values"), errc::parse_error,
          "h_s needs 'breakpoints' and 'values' arrays");
  auto x = h["breakpoints"].get<std::vector<double>>();
  auto y = h["values"].get<std::vector<double>>();
  require(x.size() == y.size(), errc::parse_error,
          "breakpoints and values must have the same length");
  std::string name = j.value("name", std::string("custom"));
  return LocalDiscrepancy::from_hs_breakpoints(name, std::move(x), std::move(y));
}

std::string solution_to_json(const TransportSolution& sol) {
  json j;
  j["model"] = sol.model;
  j["k_cuts"] = sol.k_cuts;
  j["rho0"] = json::parse(measure_to_json(sol.rho0));
  j["rho1"] = json::parse(measure_to_json(sol.rho1));
  j["pi0"] = sol.pi0.m;
  j["pi1"] = sol.pi1.m;
  j["rho0p"] = sol.rho0p.weights;
  j["rho1p"] = sol.rho1p.weights;
  j["alpha"] = sol.alpha;
  j["beta"] = sol.beta;
  j["value_bracket"] = {sol.dual_value, sol.primal_value};
  j["gap"] = sol.gap;
  std::vector<std::string> part;
  for (Region r : sol.partition) part.push_back(region_name(r));
  j["partition"] = part;
  return j.dump(2);
}

TransportSolution solution_from_json(const std::string& text) {
  json j = parse(text);
  TransportSolution sol;
  sol.model = j.value("model", std::string());
  sol.k_cuts = j.value("k_cuts", 0);
  sol.rho0 = measure_from_json(j["rho0"].dump());
  sol.rho1 = DiscreteMeasure(sol.rho0.space, j["rho1"]["weights"].get<std::vector<double>>());
  sol.pi0 = coupling_from_json(j["pi0"], sol.rho0.space);
  sol.pi1 = coupling_from_json(j["pi1"], sol.rho0.space);
  sol.rho0p = DiscreteMeasure(sol.rho0.space, j["rho0p"].get<std::vector<double>>());
  sol.rho1p = DiscreteMeasure(sol.rho0.space, j["rho1p"].get<std::vector<double>>());
  sol.alpha = j["alpha"].get<std::vector<double>>();
  sol.beta = j["beta"].get<std::vector<double>>();
  sol.dual_value = j["value_bracket"][0].get<double>();
  sol.primal_value = j["value_bracket"][1].get<double>();
  sol.gap = j.value("gap", sol.primal_value - sol.dual_value);
  for (const auto& s : j["partition"]) {
    std::string name = s.get<std::string>();
    sol.partition.push_back(name == "plus" ? Region::plus
                                           : (name == "minus" ? Region::minus
                                                              : Region::equal));
  }
  return sol;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot open '" + path + "' for writing");
  out << content;
  require(out.good(), errc::io_error, "write to '" + path + "' failed");
}

}  // namespace ubw1
