#pragma once

// Seeded Monte-Carlo runner for the two-body scenario: one trial draws a
// noisy cross-range block and runs every requested estimator on it; RMSE
// rows aggregate the trials of each ranging-error level.

#include "egoloc/config.hpp"
#include "egoloc/estimators.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace egoloc {

struct EstimatorOutcome {
  bool ok = false;
  std::string failed_stage;
  std::string error;
  Vector3 t_hat = Vector3::Zero();  // translation estimators
  double translation_error = 0.0;   // ‖t̂ - t‖
  double rotation_error = 0.0;      // min over the ambiguity set of ‖Q̂ - Q‖_F
  double rotation_objective = 0.0;
  std::size_t ambiguity_set_size = 0;
  bool converged = true;
};

struct TrialResult {
  double sigma = 0.0;
  std::size_t sigma_index = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::array<std::optional<EstimatorOutcome>, 3> outcomes;  // indexed by EstimatorKind
  std::size_t noise_clamped = 0;
  std::size_t completion_clamped = 0;
  std::size_t eigen_floored = 0;
  bool degenerate_rotation_spectrum = false;
  StageTimings timings;

  const std::optional<EstimatorOutcome>& outcome(EstimatorKind kind) const {
    return outcomes[static_cast<std::size_t>(kind)];
  }
};

/// Deterministic in (master_seed, sigma_index, trial). Stage failures are
/// recorded in the outcomes, never thrown.
TrialResult run_trial(const ExperimentConfig& config, std::size_t sigma_index, std::size_t trial);

/// sqrt( mean ‖t̂_k - t‖² ). Throws InvalidInput on an empty list.
double rmse(std::span<const Vector3> estimates, const Vector3& truth);

struct RmseRow {
  double sigma = 0.0;
  std::array<double, 3> rmse{};      // NaN when every trial failed
  std::array<std::size_t, 3> failures{};
  std::size_t n_trials = 0;
  bool valid = true;                 // false if some estimator had no successful trial
};

/// Aggregates trials of one sigma level. Failed trials are excluded from the
/// RMSE and counted. For naive_eig the entry is the rotation RMSE (Frobenius,
/// modulo sign flips).
RmseRow aggregate(const ExperimentConfig& config, double sigma, std::span<const TrialResult> trials);

/// Runs sigma_grid x trials across `config.threads` workers. Results are
/// collected in (sigma, trial) order, so the output does not depend on the
/// number of workers.
std::vector<RmseRow> run_experiment(const ExperimentConfig& config, std::vector<TrialResult>* trials = nullptr);

}  // namespace egoloc
