#pragma once

#include "egoloc/measure.hpp"
#include "egoloc/numkit.hpp"
#include "egoloc/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace egoloc {

/// Two bodies and the pose of body 2 relative to body 1.
struct Scenario {
  Matrix c1 = table1_c1();
  Matrix c2 = table1_c2();
  Vector3 translation{kTable1Translation[0], kTable1Translation[1], kTable1Translation[2]};
  Vector3 euler_deg{kTable1EulerDeg[0], kTable1EulerDeg[1], kTable1EulerDeg[2]};  // roll, pitch, yaw

  Pose pose() const;
  Scene scene() const;
};

enum class EstimatorKind { Egoistic, GenieAided, NaiveEig };

inline constexpr EstimatorKind kAllEstimators[] = {EstimatorKind::Egoistic, EstimatorKind::GenieAided,
                                                   EstimatorKind::NaiveEig};

/// Name used in config files ("egoistic", "genie_aided", "naive_eig").
std::string_view config_name(EstimatorKind kind);
/// Column suffix used in CSV output ("egoistic", "genie", "naive_eig").
std::string_view column_name(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);

struct ExperimentConfig {
  Scenario scenario;
  std::vector<double> sigma_grid{0.01, 0.05, 0.1, 0.2, 0.3, 0.5};
  std::size_t trials = 1000;
  std::uint64_t master_seed = 1;
  std::vector<EstimatorKind> estimators{EstimatorKind::Egoistic, EstimatorKind::GenieAided};
  std::optional<Vector3> axis_moments;  // body-2 reference moments for the rotation search
  CompletionDomain completion = CompletionDomain::Squared;
  unsigned threads = 0;                 // 0: one per hardware thread
  std::filesystem::path out_dir = ".";

  /// Throws InvalidInput when a field violates its invariant.
  void validate() const;
  bool uses(EstimatorKind kind) const;
};

/// Parses a JSON config. Every key is optional and defaults to the reference
/// scenario; unknown keys are rejected with an error naming the key.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// JSON rendering of a config (round-trips through parse_config).
std::string dump_config(const ExperimentConfig& config);

}  // namespace egoloc
