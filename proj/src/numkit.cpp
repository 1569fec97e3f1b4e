#include "egoloc/numkit.hpp"

#include "egoloc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace egoloc {

EulerAngles EulerAngles::from_degrees(double roll_deg, double pitch_deg, double yaw_deg) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  return {roll_deg * kDeg, pitch_deg * kDeg, yaw_deg * kDeg};
}

Matrix3 rotation_from_euler(const EulerAngles& angles) {
  if (!std::isfinite(angles.roll) || !std::isfinite(angles.pitch) || !std::isfinite(angles.yaw)) {
    throw InvalidInput("", "rotation_from_euler: non-finite angle");
  }
  const double ca = std::cos(angles.roll), sa = std::sin(angles.roll);
  const double cb = std::cos(angles.pitch), sb = std::sin(angles.pitch);
  const double cg = std::cos(angles.yaw), sg = std::sin(angles.yaw);

  Matrix3 qz, qy, qx;
  qz << cg, -sg, 0.0,
        sg,  cg, 0.0,
        0.0, 0.0, 1.0;
  qy << cb, 0.0, sb,
        0.0, 1.0, 0.0,
        -sb, 0.0, cb;
  qx << 1.0, 0.0, 0.0,
        0.0, ca, -sa,
        0.0, sa,  ca;
  return qz * qy * qx;
}

bool is_rotation(const Matrix3& q, double tol) {
  if (!q.allFinite()) return false;
  const double orth = (q.transpose() * q - Matrix3::Identity()).cwiseAbs().maxCoeff();
  return orth <= tol && std::abs(q.determinant() - 1.0) <= tol;
}

Matrix centering_matrix(Eigen::Index n) {
  if (n < 1) throw InvalidInput("", "centering_matrix: n must be at least 1");
  Matrix j = Matrix::Identity(n, n);
  j.array() -= 1.0 / static_cast<double>(n);
  return j;
}

Matrix double_center(const Matrix& m, Eigen::Index left_n, Eigen::Index right_n) {
  if (m.rows() != left_n || m.cols() != right_n) {
    std::ostringstream msg;
    msg << "double_center: expected " << left_n << "x" << right_n << " matrix, got " << m.rows()
        << "x" << m.cols();
    throw InvalidInput("", msg.str());
  }
  // J m J computed by subtracting row and column means; avoids forming J.
  Matrix out = m;
  out.rowwise() -= m.colwise().mean();
  const Vector row_means = out.rowwise().mean();
  out.colwise() -= row_means;
  return -0.5 * out;
}

Matrix double_center(const Matrix& m) { return double_center(m, m.rows(), m.cols()); }

Matrix hollow(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("", "hollow: matrix must be square");
  Matrix out = m;
  out.diagonal().setZero();
  return out;
}

Matrix squared(const Matrix& m) { return m.array().square().matrix(); }

Matrix center_columns(const Matrix& m) {
  Matrix out = m;
  out.colwise() -= m.rowwise().mean();
  return out;
}

Matrix pseudo_inverse(const Matrix& c, PinvSide side, std::string_view label, double condition_cap) {
  require_finite(c, label);
  if (c.rows() > c.cols()) {
    throw InvalidInput("", "pseudo_inverse: " + std::string(label) + " has more rows than columns");
  }
  const Matrix gram = c * c.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > condition_cap) {
    std::ostringstream msg;
    msg << "pseudo_inverse: " << label << " is rank deficient (C Cᵀ eigenvalues in [" << lo << ", "
        << hi << "], condition cap " << condition_cap << ")";
    throw NumericalFailure("", msg.str());
  }
  const Eigen::LDLT<Matrix> ldlt(gram);
  if (side == PinvSide::LeftOfTranspose) return ldlt.solve(c);
  return ldlt.solve(c).transpose();
}

SymEigDecomposition sym_eig(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("", "sym_eig: matrix must be square");
  require_finite(m, "sym_eig input");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalFailure("", "sym_eig: solver did not converge");
  // Eigen sorts ascending.
  return {eig.eigenvectors().rowwise().reverse(), eig.eigenvalues().reverse()};
}

SvdDecomposition svd(const Matrix& m) {
  require_finite(m, "svd input");
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw InvalidInput("", std::string(what) + " contains non-finite entries");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Matrix read_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw InvalidInput("", "csv line " + std::to_string(line_no) + ": cannot parse '" +
                                   std::string(cell) + "'");
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidInput("", "csv line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("", "csv: no data");

  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  require_finite(m, "csv");
  return m;
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("", "cannot open " + path.string());
  try {
    return read_csv_matrix(in);
  } catch (const InvalidInput& e) {
    throw InvalidInput("", path.string() + ": " + e.what());
  }
}

void write_csv_matrix(std::ostream& out, const Matrix& m) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      // Shortest representation that round-trips exactly.
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m(i, j));
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

std::string to_csv(const Matrix& m) {
  std::ostringstream out;
  write_csv_matrix(out, m);
  return out.str();
}

}  // namespace egoloc
