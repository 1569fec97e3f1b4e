#include "egoloc/outputs.hpp"

#include "egoloc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace egoloc {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("output", "cannot write " + path.string());
  out << text;
  if (!out) throw InvalidInput("output", "write failed for " + path.string());
}

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c"};

}  // namespace

std::string format_csv(const std::vector<RmseRow>& rows, const std::vector<EstimatorKind>& estimators) {
  std::string out = "sigma";
  for (EstimatorKind kind : estimators) out += ",rmse_" + std::string(column_name(kind));
  for (EstimatorKind kind : estimators) out += ",failures_" + std::string(column_name(kind));
  if (!estimators.empty()) out += ",n_trials";
  out += '\n';
  for (const RmseRow& row : rows) {
    out += number(row.sigma);
    for (EstimatorKind kind : estimators) out += "," + number(row.rmse[static_cast<std::size_t>(kind)]);
    for (EstimatorKind kind : estimators) {
      out += "," + std::to_string(row.failures[static_cast<std::size_t>(kind)]);
    }
    if (!estimators.empty()) out += "," + std::to_string(row.n_trials);
    out += '\n';
  }
  return out;
}

std::string render_svg(const std::vector<RmseRow>& rows, const std::vector<EstimatorKind>& estimators) {
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 70, kRight = 160, kTop = 30, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const RmseRow& row : rows) {
    x_lo = std::min(x_lo, row.sigma);
    x_hi = std::max(x_hi, row.sigma);
    for (EstimatorKind kind : estimators) {
      const double v = row.rmse[static_cast<std::size_t>(kind)];
      if (std::isfinite(v) && v > 0.0) {
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
      }
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0;
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  int dec_lo = std::isfinite(y_lo) ? static_cast<int>(std::floor(std::log10(y_lo))) : -2;
  int dec_hi = std::isfinite(y_hi) ? static_cast<int>(std::ceil(std::log10(y_hi))) : 1;
  if (dec_hi <= dec_lo) dec_hi = dec_lo + 1;

  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (dec_hi - std::log10(y)) / (dec_hi - dec_lo) * plot_h; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) + "\" height=\"" +
       fixed(kHeight, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(plot_w) + "\" height=\"" +
       fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int d = dec_lo; d <= dec_hi; ++d) {
    const double y = py(std::pow(10.0, d));
    s += "<line x1=\"" + fixed(kLeft) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(kLeft + plot_w) + "\" y2=\"" +
         fixed(y) + "\" stroke=\"#ddd\"/>\n";
    s += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(y + 4) + "\" text-anchor=\"end\">1e" +
         std::to_string(d) + "</text>\n";
  }
  for (const RmseRow& row : rows) {
    const double x = px(row.sigma);
    s += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(kTop + plot_h) + "\" x2=\"" + fixed(x) + "\" y2=\"" +
         fixed(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(kTop + plot_h + 18) + "\" text-anchor=\"middle\">" +
         number(row.sigma) + "</text>\n";
  }
  s += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"" + fixed(kHeight - 10) +
       "\" text-anchor=\"middle\">ranging error sigma</text>\n";
  s += "<text x=\"16\" y=\"" + fixed(kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       fixed(kTop + plot_h / 2) + ")\">RMSE</text>\n";

  for (std::size_t e = 0; e < estimators.size(); ++e) {
    const auto idx = static_cast<std::size_t>(estimators[e]);
    const char* color = kColors[idx];
    std::string points;
    for (const RmseRow& row : rows) {
      const double v = row.rmse[idx];
      if (!std::isfinite(v) || v <= 0.0) continue;
      if (!points.empty()) points += ' ';
      points += fixed(px(row.sigma)) + "," + fixed(py(v));
      s += "<circle cx=\"" + fixed(px(row.sigma)) + "\" cy=\"" + fixed(py(v)) + "\" r=\"3\" fill=\"" + color +
           "\"/>\n";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + points +
         "\"/>\n";
    const double ly = kTop + 15 + 18 * static_cast<double>(e);
    s += "<line x1=\"" + fixed(kLeft + plot_w + 12) + "\" y1=\"" + fixed(ly - 4) + "\" x2=\"" +
         fixed(kLeft + plot_w + 32) + "\" y2=\"" + fixed(ly - 4) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fixed(kLeft + plot_w + 38) + "\" y=\"" + fixed(ly) + "\">" +
         std::string(column_name(estimators[e])) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

OutputFiles emit_outputs(const std::vector<RmseRow>& rows, const ExperimentConfig& config) {
  if (rows.empty()) throw InvalidInput("output", "no rows to write");
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw InvalidInput("output", "cannot create " + config.out_dir.string() + ": " + ec.message());
  OutputFiles files{config.out_dir / "rmse.csv", config.out_dir / "rmse.svg"};
  write_file(files.csv, format_csv(rows, config.estimators));
  write_file(files.svg, render_svg(rows, config.estimators));
  return files;
}

}  // namespace egoloc
