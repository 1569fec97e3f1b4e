#include "egoloc/harness.hpp"

#include "egoloc/error.hpp"
#include "egoloc/measure.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace egoloc {

namespace {

std::size_t slot(EstimatorKind kind) { return static_cast<std::size_t>(kind); }

EstimatorOutcome failure(const Error& e) {
  EstimatorOutcome out;
  out.failed_stage = e.stage();
  out.error = e.what();
  return out;
}

double ambiguity_error(const RotationEstimate& estimate, const Matrix3& truth) {
  double best = std::numeric_limits<double>::infinity();
  for (const Matrix3& q : estimate.ambiguity_set) best = std::min(best, (q - truth).norm());
  return best;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& config, std::size_t sigma_index, std::size_t trial) {
  const Scene scene = config.scenario.scene();
  const EdmBlocks blocks = edm_blocks(scene);

  TrialResult out;
  out.sigma = config.sigma_grid.at(sigma_index);
  out.sigma_index = sigma_index;
  out.trial = trial;
  out.seed = derive_seed(config.master_seed, sigma_index, trial);

  const PerturbedDistances noisy = perturb_distances(blocks.d12, {out.sigma, out.seed});
  out.noise_clamped = noisy.clamped;
  const Matrix& d12 = noisy.distances;
  const Vector3& t_true = scene.pose.translation;
  const Matrix3& q_true = scene.pose.rotation;

  std::optional<Matrix> s2_hat;
  if (config.uses(EstimatorKind::Egoistic)) {
    try {
      const LocalizationResult loc =
          egoistic_localize(scene.c1, blocks.d1, d12, {config.axis_moments, SolverOptions{}, config.completion});
      EstimatorOutcome o;
      o.ok = true;
      o.t_hat = loc.translation.t_hat;
      o.translation_error = (o.t_hat - t_true).norm();
      o.converged = loc.translation.converged;
      o.rotation_error = ambiguity_error(loc.rotation, q_true);
      o.rotation_objective = loc.rotation.objective;
      o.ambiguity_set_size = loc.rotation.ambiguity_set_size();
      out.outcomes[slot(EstimatorKind::Egoistic)] = o;
      out.completion_clamped = loc.measured.completion_clamped;
      out.eigen_floored = loc.embedding.floored;
      out.degenerate_rotation_spectrum = loc.rotation.degenerate_spectrum;
      out.timings = loc.timings;
      s2_hat = loc.s2_hat;
    } catch (const Error& e) {
      out.outcomes[slot(EstimatorKind::Egoistic)] = failure(e);
    }
  }

  if (config.uses(EstimatorKind::GenieAided)) {
    try {
      // External rotation: the known-shape Procrustes estimate from the same
      // noisy ranges.
      const RotationEstimate q_ext =
          with_stage("genie rotation", [&] { return estimate_rotation_opp_genie(scene.c1, scene.c2, d12); });
      const TranslationEstimate t_est =
          genie_aided_translation(scene.c1, scene.c2, q_ext.q_hat, blocks.d1, d12);
      EstimatorOutcome o;
      o.ok = true;
      o.t_hat = t_est.t_hat;
      o.translation_error = (o.t_hat - t_true).norm();
      o.converged = t_est.converged;
      o.rotation_error = (q_ext.q_hat - q_true).norm();
      o.rotation_objective = q_ext.objective;
      o.ambiguity_set_size = 1;
      out.outcomes[slot(EstimatorKind::GenieAided)] = o;
    } catch (const Error& e) {
      out.outcomes[slot(EstimatorKind::GenieAided)] = failure(e);
    }
  }

  if (config.uses(EstimatorKind::NaiveEig)) {
    try {
      if (!s2_hat) {
        const MeasuredEdm measured =
            with_stage("completion", [&] { return complete_measurements(blocks.d1, d12, config.completion); });
        const Embedding emb = with_stage("mds", [&] { return classical_mds(measured.assembled, 3); });
        s2_hat = with_stage("procrustes", [&] { return anchor_embedding(emb, scene.c1); });
      }
      const RotationEstimate r = with_stage("naive rotation", [&] { return estimate_rotation_naive_eig(*s2_hat); });
      EstimatorOutcome o;
      o.ok = true;
      o.rotation_error = ambiguity_error(r, q_true);
      o.rotation_objective = r.objective;
      o.ambiguity_set_size = r.ambiguity_set_size();
      out.outcomes[slot(EstimatorKind::NaiveEig)] = o;
    } catch (const Error& e) {
      out.outcomes[slot(EstimatorKind::NaiveEig)] = failure(e);
    }
  }
  return out;
}

double rmse(std::span<const Vector3> estimates, const Vector3& truth) {
  if (estimates.empty()) throw InvalidInput("rmse", "no estimates");
  double sum = 0.0;
  for (const Vector3& e : estimates) sum += (e - truth).squaredNorm();
  return std::sqrt(sum / static_cast<double>(estimates.size()));
}

RmseRow aggregate(const ExperimentConfig& config, double sigma, std::span<const TrialResult> trials) {
  RmseRow row;
  row.sigma = sigma;
  row.n_trials = trials.size();
  row.rmse.fill(std::numeric_limits<double>::quiet_NaN());
  const Vector3 t_true = config.scenario.translation;

  for (EstimatorKind kind : config.estimators) {
    const std::size_t s = slot(kind);
    std::vector<Vector3> estimates;
    double rot_sq = 0.0;
    std::size_t ok = 0;
    for (const TrialResult& t : trials) {
      const auto& o = t.outcomes[s];
      if (!o || !o->ok) {
        ++row.failures[s];
        continue;
      }
      ++ok;
      estimates.push_back(o->t_hat);
      rot_sq += o->rotation_error * o->rotation_error;
    }
    if (ok == 0) {
      row.valid = false;
      continue;
    }
    row.rmse[s] = kind == EstimatorKind::NaiveEig ? std::sqrt(rot_sq / static_cast<double>(ok))
                                                  : rmse(estimates, t_true);
  }
  return row;
}

std::vector<RmseRow> run_experiment(const ExperimentConfig& config, std::vector<TrialResult>* trials) {
  config.validate();
  const std::size_t k = config.trials;
  const std::size_t total = config.sigma_grid.size() * k;
  std::vector<TrialResult> results(total);

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) results[i] = run_trial(config, i / k, i % k);
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  std::vector<RmseRow> rows;
  for (std::size_t s = 0; s < config.sigma_grid.size(); ++s) {
    rows.push_back(aggregate(config, config.sigma_grid[s], std::span(results).subspan(s * k, k)));
  }
  if (trials) *trials = std::move(results);
  return rows;
}

}  // namespace egoloc
