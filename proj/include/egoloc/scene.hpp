#pragma once

#include "egoloc/numkit.hpp"

#include <string_view>

namespace egoloc {

/// Rigid-body pose: S = Q * C + t * 1ᵀ.
struct Pose {
  Matrix3 rotation = Matrix3::Identity();
  Vector3 translation = Vector3::Zero();
};

/// Validates a 3xN body conformation (N >= 3, finite). With `require_rank3`,
/// also checks that the centered landmarks span 3D.
void validate_conformation(const Matrix& c, std::string_view label, bool require_rank3 = false);

/// Absolute sensor positions of a body with the given shape and pose.
Matrix place_body(const Matrix& shape, const Pose& pose);

/// Pose of body 2 expressed in body 1's frame: (Q1ᵀ Q2, Q1ᵀ (t2 - t1)).
Pose relative_pose(const Pose& body1, const Pose& body2);

/// Two-body scene in body 1's frame: S1 = C1, S2 = Q C2 + t 1ᵀ.
struct Scene {
  Matrix c1;
  Matrix c2;
  Pose pose;
  Matrix s1;
  Matrix s2;

  Eigen::Index n1() const { return c1.cols(); }
  Eigen::Index n2() const { return c2.cols(); }
};

Scene build_scene(const Matrix& c1, const Matrix& c2, const Pose& pose);

/// Pairwise Euclidean distances between the columns of `a` and of `b`.
Matrix exact_edm(const Matrix& a, const Matrix& b);

struct EdmBlocks {
  Matrix d1;   // N1 x N1
  Matrix d2;   // N2 x N2
  Matrix d12;  // N1 x N2
};

EdmBlocks edm_blocks(const Scene& scene);

/// Full (N1+N2) x (N1+N2) distance matrix of [S1 | S2].
Matrix full_edm(const Scene& scene);

struct CrossGramDecomposition {
  Vector psi1;  // squared column norms of S1
  Vector psi2;  // squared column norms of S2
};

CrossGramDecomposition cross_gram(const Scene& scene);

/// ‖D12∘D12 - (ψ1 1ᵀ + 1 ψ2ᵀ - 2 S1ᵀ S2)‖_F.
double cross_gram_identity_residual(const Scene& scene);

/// Reference two-body scenario (a 12-sensor truck and a 10-sensor car).
Matrix table1_c1();
Matrix table1_c2();
inline constexpr double kTable1EulerDeg[3] = {10.0, 20.0, 45.0};
inline constexpr double kTable1Translation[3] = {7.0, 3.0, 0.5};
Pose table1_pose();
Scene table1_scene();

}  // namespace egoloc
