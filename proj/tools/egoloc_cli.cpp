// egoloc: egoistic two-body localization from cross-body ranges.
//
//   egoloc simulate --config <file> [--out-dir <dir>] [--seed <u64>] [--trials <K>]
//   egoloc estimate --c1 <csv> --d12 <csv> [--d1 <csv>] [--axis-moments a,b,c] [--completion squared|distance]
//   egoloc complete --d1 <csv> --d12 <csv> [--completion squared|distance]
//   egoloc mds --edm <csv>
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include "egoloc/config.hpp"
#include "egoloc/embed_align.hpp"
#include "egoloc/error.hpp"
#include "egoloc/estimators.hpp"
#include "egoloc/harness.hpp"
#include "egoloc/measure.hpp"
#include "egoloc/outputs.hpp"
#include "egoloc/scene.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

void print_vector(const egoloc::Vector3& v) {
  egoloc::write_csv_matrix(std::cout, v.transpose());
}

int run_simulate(const std::string& config_path, const std::optional<std::string>& out_dir,
                 const std::optional<std::uint64_t>& seed, const std::optional<std::size_t>& trials,
                 const std::optional<unsigned>& threads) {
  egoloc::ExperimentConfig config = egoloc::load_config(config_path);
  if (out_dir) config.out_dir = *out_dir;
  if (seed) config.master_seed = *seed;
  if (trials) config.trials = *trials;
  if (threads) config.threads = *threads;
  config.validate();

  const auto rows = egoloc::run_experiment(config);
  const auto files = egoloc::emit_outputs(rows, config);
  std::cout << egoloc::format_csv(rows, config.estimators);
  std::cerr << "wrote " << files.csv.string() << " and " << files.svg.string() << "\n";
  for (const auto& row : rows) {
    if (!row.valid) std::cerr << "warning: sigma " << row.sigma << " has an estimator with no successful trial\n";
  }
  return kExitOk;
}

int run_estimate(const std::string& c1_path, const std::string& d12_path, const std::optional<std::string>& d1_path,
                 const std::vector<double>& axis_moments, const std::string& completion) {
  const egoloc::Matrix c1 = egoloc::read_csv_matrix(c1_path);
  const egoloc::Matrix d12 = egoloc::read_csv_matrix(d12_path);
  egoloc::validate_conformation(c1, "c1", true);
  const egoloc::Matrix d1 = d1_path ? egoloc::read_csv_matrix(*d1_path) : egoloc::exact_edm(c1, c1);

  egoloc::LocalizationOptions options;
  options.completion = egoloc::with_stage("input", [&] { return egoloc::parse_completion(completion); });
  if (!axis_moments.empty()) {
    if (axis_moments.size() != 3) throw egoloc::InvalidInput("input", "--axis-moments takes 3 values");
    options.axis_moments = egoloc::Vector3(axis_moments[0], axis_moments[1], axis_moments[2]);
  }
  const auto result = egoloc::egoistic_localize(c1, d1, d12, options);
  const auto& t = result.translation;
  const auto& q = result.rotation;
  std::cout << "# t_hat (objective " << t.objective << ", iterations " << t.iterations
            << ", converged " << (t.converged ? "yes" : "no") << ")\n";
  print_vector(t.t_hat);
  std::cout << "# q_hat (objective " << q.objective << ", permutation " << q.chosen_permutation
            << ", ambiguity set " << q.ambiguity_set_size() << (q.degenerate_spectrum ? ", degenerate spectrum" : "")
            << ")\n";
  egoloc::write_csv_matrix(std::cout, q.q_hat);
  if (result.embedding.floored > 0) {
    std::cerr << "note: " << result.embedding.floored << " negative MDS eigenvalue(s) floored to zero\n";
  }
  return kExitOk;
}

int run_complete(const std::string& d1_path, const std::string& d12_path, const std::string& domain_name) {
  const auto domain = egoloc::with_stage("input", [&] { return egoloc::parse_completion(domain_name); });
  const egoloc::Matrix d1 = egoloc::read_csv_matrix(d1_path);
  const egoloc::Matrix d12 = egoloc::read_csv_matrix(d12_path);
  const auto completion = egoloc::with_stage("completion", [&] { return egoloc::nystrom_complete(d1, d12, domain); });
  egoloc::write_csv_matrix(std::cout, completion.d2_hat);
  if (completion.clamped > 0) std::cerr << "note: " << completion.clamped << " negative entries clamped to 0\n";
  return kExitOk;
}

int run_mds(const std::string& edm_path, int dim) {
  const auto embedding =
      egoloc::with_stage("mds", [&] { return egoloc::classical_mds(egoloc::read_csv_matrix(edm_path), dim); });
  egoloc::write_csv_matrix(std::cout, embedding.points);
  if (embedding.floored > 0) std::cerr << "note: " << embedding.floored << " negative eigenvalue(s) floored\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Egoistic anchorless rigid-body localization"};
  app.require_subcommand(1);

  std::string config_path, c1_path, d12_path, edm_path, d1_required;
  std::optional<std::string> out_dir, d1_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> threads;
  std::vector<double> axis_moments;
  std::string completion = "squared";
  int dim = 3;

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo RMSE experiment");
  simulate->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out-dir", out_dir, "Directory for rmse.csv / rmse.svg");
  simulate->add_option("--seed", seed, "Master seed");
  simulate->add_option("--trials", trials, "Monte-Carlo trials per sigma")->check(CLI::PositiveNumber);
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* estimate = app.add_subcommand("estimate", "Single egoistic estimate from measurement CSVs");
  estimate->add_option("--c1", c1_path, "Body-1 conformation, 3 x N1")->required()->check(CLI::ExistingFile);
  estimate->add_option("--d12", d12_path, "Cross ranges, N1 x N2")->required()->check(CLI::ExistingFile);
  estimate->add_option("--d1", d1_path, "Body-1 intra distances (default: computed from c1)")
      ->check(CLI::ExistingFile);
  estimate->add_option("--axis-moments", axis_moments, "Reference axis moments of body 2")->delimiter(',');
  estimate->add_option("--completion", completion, "Nyström domain: squared (default) or distance");

  auto* complete = app.add_subcommand("complete", "Nyström completion of the body-2 block");
  complete->add_option("--d1", d1_required, "Body-1 intra distances")->required()->check(CLI::ExistingFile);
  complete->add_option("--d12", d12_path, "Cross ranges")->required()->check(CLI::ExistingFile);
  complete->add_option("--completion", completion, "Nyström domain: squared (default) or distance");

  auto* mds = app.add_subcommand("mds", "Classical MDS embedding of a distance matrix");
  mds->add_option("--edm", edm_path, "Square distance matrix")->required()->check(CLI::ExistingFile);
  mds->add_option("--dim", dim, "Embedding dimension")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*simulate) return run_simulate(config_path, out_dir, seed, trials, threads);
    if (*estimate) return run_estimate(c1_path, d12_path, d1_path, axis_moments, completion);
    if (*complete) return run_complete(d1_required, d12_path, completion);
    if (*mds) return run_mds(edm_path, dim);
  } catch (const egoloc::Error& e) {
    const std::string stage = e.stage().empty() ? "input" : e.stage();
    std::cerr << "error [" << stage << "]: " << e.what() << "\n";
    return e.kind() == egoloc::ErrorKind::Numerical ? kExitNumerical : kExitInvalid;
  }
  return kExitInvalid;
}
