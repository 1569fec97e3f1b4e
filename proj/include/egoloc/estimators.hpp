#pragma once

// Egoistic two-body pose estimators: translation refinement through the
// double-centered consistency objective, rotation recovery by pseudo-inverse
// projection with an eigenvalue-permutation search, and the genie-aided /
// reference baselines they are compared against.

#include "egoloc/embed_align.hpp"
#include "egoloc/measure.hpp"
#include "egoloc/numkit.hpp"

#include <optional>
#include <vector>

namespace egoloc {

struct TranslationEstimate {
  Vector3 t_hat = Vector3::Zero();
  double objective = 0.0;
  double initial_objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;  // gradient norm reached the tolerance
};

struct RotationEstimate {
  Matrix3 q_hat = Matrix3::Identity();
  double objective = 0.0;
  int chosen_permutation = 0;          // index into the 6 column permutations
  std::vector<Matrix3> ambiguity_set;  // all candidates tied with the minimum
  Vector3 spectrum = Vector3::Zero();  // observed eigenvalues, descending
  Vector3 reference_moments = Vector3::Zero();
  bool degenerate_spectrum = false;    // relative eigen-gap below 1e-6

  std::size_t ambiguity_set_size() const { return ambiguity_set.size(); }
};

struct SolverOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-9;
  // Also stop once the Gauss-Newton predicted decrease gᵀ(JᵀJ)⁻¹g falls
  // below this fraction of the objective: further progress is under the
  // rounding level of the objective itself.
  double relative_decrease_tolerance = 1e-14;
};

/// Ŝ(t) = [C1 | body2 + t 1ᵀ]: body 1 fixed at its conformation, body 2's
/// shape block shifted by the unknown translation.
Matrix augmented_positions(const Vector3& t, const Matrix& c1, const Matrix& body2_shape);

/**
 * Least-squares problem r(t) = vec( J (Ŝ(t)ᵀŜ(t) + ½ D̂∘D̂) J ).
 *
 * `body2_shape` is the 3xN2 block that the translation is added to (Ŝ2 J in
 * the egoistic estimator, Q C2 in the genie-aided one). The Jacobian is
 * analytic: ∂R/∂t_k = ẽ p_kᵀ + p_k ẽᵀ with P = Ŝ(t) J, p_k its k-th row and
 * ẽ = J [0; 1_{N2}].
 */
class TranslationProblem {
 public:
  TranslationProblem(const Matrix& c1, const Matrix& body2_shape, const Matrix& d_hat);

  Vector residual(const Vector3& t) const;
  Eigen::Matrix<double, Eigen::Dynamic, 3> jacobian(const Vector3& t) const;
  double objective(const Vector3& t) const { return residual(t).squaredNorm(); }
  /// ∇‖r‖² = 2 Jᵀ r.
  Vector3 gradient(const Vector3& t) const;

  /// Levenberg-Marquardt from `initial`; returns the best iterate.
  TranslationEstimate solve(const Vector3& initial, const SolverOptions& options = {}) const;

 private:
  Matrix centered_base_;   // [C1 | body2] J
  Vector body2_indicator_; // J [0; 1]
  Matrix half_gram_edm_;   // ½ J (D̂∘D̂) J
};

/// ‖J(ŜᵀŜ + ½D̂∘D̂)J‖²_F with Ŝ = [C1 | Ŝ2 J + t 1ᵀ].
double translation_objective(const Vector3& t, const Matrix& c1, const Matrix& s2_hat, const Matrix& d_hat);

/// Minimizes translation_objective starting from the column mean of Ŝ2.
TranslationEstimate estimate_translation(const Matrix& c1, const Matrix& s2_hat, const Matrix& d_hat,
                                         const SolverOptions& options = {});

/// Ď = C̄1† · (-½ J D12∘D12 J), equal to Q C̄2 for exact distances.
Matrix egoistic_projection(const Matrix& c1, const Matrix& d12);

/// Centered second-moment matrix of a body in its own frame.
struct BodyMoments {
  Vector3 axis = Vector3::Zero();   // diagonal of C̄ C̄ᵀ, in local axis order
  double off_diagonal_mass = 0.0;   // ‖offdiag(C̄ C̄ᵀ)‖_F / ‖C̄ C̄ᵀ‖_F
};

BodyMoments body_moments(const Matrix& c);

/**
 * Rotation from cross-body ranges without knowledge of body 2's shape.
 *
 * Eigendecomposes ĎĎᵀ = V Λ Vᵀ and scores every proper signed column
 * permutation Q = V P S against ‖ĎĎᵀ - Q diag(m) Qᵀ‖²_F, where m are the
 * reference axis moments of body 2. Without a reference, m is the observed
 * spectrum in descending order, i.e. body 2's frame is taken to be its
 * principal-axes frame. Ties (sign flips are always tied) are broken by the
 * lexicographically smallest matrix in row-major order.
 */
RotationEstimate estimate_rotation_egoistic(const Matrix& c1, const Matrix& d12_noisy,
                                            const std::optional<Vector3>& axis_moments = std::nullopt);

/// Genie baseline with known C2: orthogonal Procrustes on C̄1 Ď with
/// Ď = (-½ J D12∘D12 J) C̄2†, determinant-corrected to a proper rotation.
RotationEstimate estimate_rotation_opp_genie(const Matrix& c1, const Matrix& c2, const Matrix& d12_noisy);

/// Eigenvectors of (Ŝ2 J)(Ŝ2 J)ᵀ ordered by eigenvalue. Breaks down when the
/// body's principal moments are close or not in descending axis order.
RotationEstimate estimate_rotation_naive_eig(const Matrix& s2_hat);

/// min over proper sign flips S of ‖Q̂ S - truth‖_F.
double rotation_error_modulo_signs(const Matrix3& q_hat, const Matrix3& truth);

struct StageTimings {
  double completion = 0.0;
  double embedding = 0.0;
  double anchoring = 0.0;
  double translation = 0.0;
  double rotation = 0.0;
};

struct LocalizationOptions {
  std::optional<Vector3> axis_moments;
  SolverOptions solver;
  CompletionDomain completion = CompletionDomain::Squared;
};

struct LocalizationResult {
  TranslationEstimate translation;
  RotationEstimate rotation;
  MeasuredEdm measured;
  Embedding embedding;
  Matrix s2_hat;
  StageTimings timings;  // seconds
};

/// Completion -> MDS -> Procrustes anchoring -> translation refinement, and
/// the egoistic rotation estimator on the same measurements. Errors carry
/// the failing stage name.
LocalizationResult egoistic_localize(const Matrix& c1, const Matrix& d1, const Matrix& d12_noisy,
                                     const LocalizationOptions& options = {});

/// Translation with genie side information: body 2's block is fixed to
/// q_external C2 + t 1ᵀ and D̂ is assembled with the true D2.
TranslationEstimate genie_aided_translation(const Matrix& c1, const Matrix& c2, const Matrix3& q_external,
                                            const Matrix& d1, const Matrix& d12_noisy,
                                            const SolverOptions& options = {});

}  // namespace egoloc
