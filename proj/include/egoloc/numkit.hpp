#pragma once

// Dense linear-algebra primitives and the structural matrix operators used
// throughout the localization pipeline (rotations, centering, hollowing,
// pseudo-inverses, sorted eigen/singular decompositions, CSV I/O).

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace egoloc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Roll about x, pitch about y, yaw about z, all in radians.
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  static EulerAngles from_degrees(double roll_deg, double pitch_deg, double yaw_deg);
};

/// Q = Qz(yaw) * Qy(pitch) * Qx(roll).
Matrix3 rotation_from_euler(const EulerAngles& angles);

/// True when QᵀQ = I and det(Q) = +1 within `tol`.
bool is_rotation(const Matrix3& q, double tol = 1e-9);

/// J = I - (1/n) 1 1ᵀ.
Matrix centering_matrix(Eigen::Index n);

/// -1/2 * J_left * m * J_right. `m` must be left_n x right_n.
Matrix double_center(const Matrix& m, Eigen::Index left_n, Eigen::Index right_n);
Matrix double_center(const Matrix& m);

/// Copy of `m` with the diagonal zeroed. `m` must be square.
Matrix hollow(const Matrix& m);

/// Entrywise square.
Matrix squared(const Matrix& m);

/// Subtracts the column mean from every column (m * J).
Matrix center_columns(const Matrix& m);

enum class PinvSide {
  // (C Cᵀ)⁻¹ C: left inverse of Cᵀ, so that C† Cᵀ = I.
  LeftOfTranspose,
  // Cᵀ (C Cᵀ)⁻¹: right inverse of C, so that C C† = I.
  Right,
};

inline constexpr double kDefaultConditionCap = 1e12;

/// Moore-Penrose inverse of a full-row-rank 3xN matrix in either of the two
/// closed forms. Throws NumericalFailure naming `label` when C Cᵀ is singular
/// or its condition number exceeds `condition_cap`.
Matrix pseudo_inverse(const Matrix& c, PinvSide side, std::string_view label = "conformation",
                      double condition_cap = kDefaultConditionCap);

struct SymEigDecomposition {
  Matrix vectors;  // columns are eigenvectors
  Vector values;   // descending
};

/// Eigendecomposition of (m + mᵀ)/2 with eigenvalues sorted descending.
SymEigDecomposition sym_eig(const Matrix& m);

struct SvdDecomposition {
  Matrix u;
  Vector singular_values;  // descending, nonnegative
  Matrix v;
};

SvdDecomposition svd(const Matrix& m);

/// Throws InvalidInput when any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

/// Plain CSV: one row per line, comma separated, no header.
Matrix read_csv_matrix(std::istream& in);
Matrix read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(std::ostream& out, const Matrix& m);
std::string to_csv(const Matrix& m);

}  // namespace egoloc
