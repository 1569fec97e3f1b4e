#include "egoloc/config.hpp"

#include "egoloc/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace egoloc {

using nlohmann::json;

Pose Scenario::pose() const {
  return {rotation_from_euler(EulerAngles::from_degrees(euler_deg(0), euler_deg(1), euler_deg(2))),
          translation};
}

Scene Scenario::scene() const { return build_scene(c1, c2, pose()); }

std::string_view config_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Egoistic: return "egoistic";
    case EstimatorKind::GenieAided: return "genie_aided";
    case EstimatorKind::NaiveEig: return "naive_eig";
  }
  return "?";
}

std::string_view column_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Egoistic: return "egoistic";
    case EstimatorKind::GenieAided: return "genie";
    case EstimatorKind::NaiveEig: return "naive_eig";
  }
  return "?";
}

EstimatorKind parse_estimator(std::string_view name) {
  for (EstimatorKind kind : kAllEstimators) {
    if (name == config_name(kind)) return kind;
  }
  throw InvalidInput("config", "unknown estimator '" + std::string(name) + "'");
}

bool ExperimentConfig::uses(EstimatorKind kind) const {
  return std::find(estimators.begin(), estimators.end(), kind) != estimators.end();
}

void ExperimentConfig::validate() const {
  with_stage("config", [&] {
    validate_conformation(scenario.c1, "c1", true);
    validate_conformation(scenario.c2, "c2");
    if (!scenario.translation.allFinite() || !scenario.euler_deg.allFinite()) {
      throw InvalidInput("", "translation and euler_deg must be finite");
    }
    if (trials < 1) throw InvalidInput("", "trials must be at least 1");
    if (sigma_grid.empty()) throw InvalidInput("", "sigma_grid must not be empty");
    for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
      if (!(sigma_grid[i] >= 0.0) || !std::isfinite(sigma_grid[i])) {
        throw InvalidInput("", "sigma_grid entries must be finite and >= 0");
      }
      if (i > 0 && !(sigma_grid[i] > sigma_grid[i - 1])) {
        throw InvalidInput("", "sigma_grid must be sorted ascending without duplicates");
      }
    }
    const std::set<EstimatorKind> unique(estimators.begin(), estimators.end());
    if (unique.size() != estimators.size()) throw InvalidInput("", "duplicate estimator");
    if (axis_moments && !axis_moments->allFinite()) throw InvalidInput("", "axis_moments must be finite");
  });
}

namespace {

Matrix matrix_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) throw InvalidInput("config", key + ": expected an array of 3 rows");
  const std::size_t cols = j[0].size();
  Matrix m(3, static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < 3; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw InvalidInput("config", key + ": rows must be arrays of equal length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw InvalidInput("config", key + ": entries must be numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Vector3 vec3_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) throw InvalidInput("config", key + ": expected 3 numbers");
  Vector3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw InvalidInput("config", key + ": expected 3 numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("config", "top level must be an object");

  ExperimentConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "c1") {
        cfg.scenario.c1 = matrix_from_json(value, key);
      } else if (key == "c2") {
        cfg.scenario.c2 = matrix_from_json(value, key);
      } else if (key == "translation") {
        cfg.scenario.translation = vec3_from_json(value, key);
      } else if (key == "euler_deg") {
        cfg.scenario.euler_deg = vec3_from_json(value, key);
      } else if (key == "sigma_grid") {
        cfg.sigma_grid = value.get<std::vector<double>>();
      } else if (key == "trials") {
        cfg.trials = value.get<std::size_t>();
      } else if (key == "seed") {
        cfg.master_seed = value.get<std::uint64_t>();
      } else if (key == "estimators") {
        cfg.estimators.clear();
        for (const auto& name : value) cfg.estimators.push_back(parse_estimator(name.get<std::string>()));
      } else if (key == "axis_moments") {
        if (!value.is_null()) cfg.axis_moments = vec3_from_json(value, key);
      } else if (key == "completion") {
        cfg.completion = with_stage("config", [&] { return parse_completion(value.get<std::string>()); });
      } else if (key == "threads") {
        cfg.threads = value.get<unsigned>();
      } else if (key == "out_dir") {
        cfg.out_dir = value.get<std::string>();
      } else {
        throw InvalidInput("config", "unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidInput("config", std::string("wrong value type: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& config) {
  json doc;
  doc["c1"] = matrix_to_json(config.scenario.c1);
  doc["c2"] = matrix_to_json(config.scenario.c2);
  doc["translation"] = {config.scenario.translation(0), config.scenario.translation(1),
                        config.scenario.translation(2)};
  doc["euler_deg"] = {config.scenario.euler_deg(0), config.scenario.euler_deg(1), config.scenario.euler_deg(2)};
  doc["sigma_grid"] = config.sigma_grid;
  doc["trials"] = config.trials;
  doc["seed"] = config.master_seed;
  json names = json::array();
  for (EstimatorKind kind : config.estimators) names.push_back(std::string(config_name(kind)));
  doc["estimators"] = names;
  if (config.axis_moments) {
    doc["axis_moments"] = {(*config.axis_moments)(0), (*config.axis_moments)(1), (*config.axis_moments)(2)};
  }
  doc["completion"] = std::string(completion_name(config.completion));
  doc["threads"] = config.threads;
  doc["out_dir"] = config.out_dir.string();
  return doc.dump(2);
}

}  // namespace egoloc
