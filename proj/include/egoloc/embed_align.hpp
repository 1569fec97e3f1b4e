#pragma once

#include "egoloc/numkit.hpp"

#include <cstddef>

namespace egoloc {

struct Embedding {
  Matrix points;             // dim x N, centered
  Vector eigenvalues;        // retained (top-dim) eigenvalues after flooring
  std::size_t floored = 0;   // negative top-dim eigenvalues set to zero
};

/// Classical (Torgerson) MDS: top-`dim` eigenpairs of -1/2 J (D∘D) J,
/// points = Λ^{1/2} Vᵀ. Throws NumericalFailure when there is no positive
/// eigenvalue to embed, InvalidInput on a malformed EDM.
Embedding classical_mds(const Matrix& d_hat, Eigen::Index dim = 3);

struct RigidTransform {
  Matrix3 rotation = Matrix3::Identity();
  Vector3 translation = Vector3::Zero();

  Matrix apply(const Matrix& points) const;
};

/// Closed-form orthogonal Procrustes (Kabsch) restricted to proper rotations:
/// argmin over (Q in SO(3), t) of ‖target - (Q source + t 1ᵀ)‖_F.
RigidTransform procrustes(const Matrix& source, const Matrix& target);

/// ‖target - (Q source + t 1ᵀ)‖_F.
double procrustes_residual(const RigidTransform& transform, const Matrix& source, const Matrix& target);

/// Fits the transform mapping the first N1 embedded points onto `c1` and
/// applies it to the remaining N2 points. The mirror image of the embedding is
/// also tried and the better fit kept. Returns Ŝ2 (3 x N2).
Matrix anchor_embedding(const Embedding& embedding, const Matrix& c1);

}  // namespace egoloc
