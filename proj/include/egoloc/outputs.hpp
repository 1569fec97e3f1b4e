#pragma once

#include "egoloc/config.hpp"
#include "egoloc/harness.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace egoloc {

/// Columns: sigma, rmse_<est>..., failures_<est>..., n_trials. With no
/// estimators only the sigma column is written. Numbers use the shortest
/// round-trip representation, so equal rows give byte-identical text.
std::string format_csv(const std::vector<RmseRow>& rows, const std::vector<EstimatorKind>& estimators);

/// Static line chart, RMSE on a log10 axis against sigma.
std::string render_svg(const std::vector<RmseRow>& rows, const std::vector<EstimatorKind>& estimators);

struct OutputFiles {
  std::filesystem::path csv;
  std::filesystem::path svg;
};

/// Writes rmse.csv and rmse.svg into config.out_dir (created if missing).
OutputFiles emit_outputs(const std::vector<RmseRow>& rows, const ExperimentConfig& config);

}  // namespace egoloc
