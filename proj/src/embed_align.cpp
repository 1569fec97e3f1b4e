#include "egoloc/embed_align.hpp"

#include "egoloc/error.hpp"

#include <cmath>
#include <sstream>

namespace egoloc {

Embedding classical_mds(const Matrix& d_hat, Eigen::Index dim) {
  if (d_hat.rows() != d_hat.cols()) throw InvalidInput("", "classical_mds: EDM must be square");
  if (dim < 1 || dim > d_hat.rows()) {
    std::ostringstream msg;
    msg << "classical_mds: cannot embed " << d_hat.rows() << " points in dimension " << dim;
    throw InvalidInput("", msg.str());
  }
  require_finite(d_hat, "classical_mds input");

  const SymEigDecomposition eig = sym_eig(double_center(squared(d_hat)));
  Embedding out;
  out.eigenvalues = eig.values.head(dim);
  if (!(out.eigenvalues(0) > 0.0)) {
    throw NumericalFailure("", "classical_mds: degenerate geometry, no positive eigenvalue");
  }
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (out.eigenvalues(k) < 0.0) {
      out.eigenvalues(k) = 0.0;
      ++out.floored;
    }
  }
  out.points = out.eigenvalues.cwiseSqrt().asDiagonal() * eig.vectors.leftCols(dim).transpose();
  return out;
}

Matrix RigidTransform::apply(const Matrix& points) const {
  Matrix out = rotation * points;
  out.colwise() += translation;
  return out;
}

RigidTransform procrustes(const Matrix& source, const Matrix& target) {
  if (source.rows() != 3 || target.rows() != 3 || source.cols() != target.cols()) {
    throw InvalidInput("", "procrustes: source and target must both be 3xN with equal N");
  }
  if (source.cols() < 3) throw InvalidInput("", "procrustes: need at least 3 points");
  require_finite(source, "procrustes source");
  require_finite(target, "procrustes target");

  const Vector3 mu_s = source.rowwise().mean();
  const Vector3 mu_t = target.rowwise().mean();
  const Matrix3 cross = center_columns(target) * center_columns(source).transpose();

  Eigen::JacobiSVD<Matrix3> sv(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector3& s = sv.singularValues();
  if (!(s(1) > 1e-12 * std::max(s(0), 1e-300))) {
    throw NumericalFailure("", "procrustes: cross-covariance has rank < 2, alignment is ambiguous");
  }
  const Matrix3 u = sv.matrixU();
  const Matrix3 v = sv.matrixV();
  Vector3 fix(1.0, 1.0, (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0);

  RigidTransform out;
  out.rotation = u * fix.asDiagonal() * v.transpose();
  out.translation = mu_t - out.rotation * mu_s;
  return out;
}

double procrustes_residual(const RigidTransform& transform, const Matrix& source, const Matrix& target) {
  return (target - transform.apply(source)).norm();
}

Matrix anchor_embedding(const Embedding& embedding, const Matrix& c1) {
  const Eigen::Index n1 = c1.cols();
  const Eigen::Index n2 = embedding.points.cols() - n1;
  if (embedding.points.rows() != 3 || c1.rows() != 3 || n2 < 1) {
    throw InvalidInput("", "anchor_embedding: embedding must be 3 x (N1+N2) with N2 >= 1");
  }
  // The embedding is only defined up to an orthogonal transform, so the mirror
  // image is an equally valid candidate.
  Matrix mirrored = embedding.points;
  mirrored.row(0) *= -1.0;
  const RigidTransform fit = procrustes(embedding.points.leftCols(n1), c1);
  const RigidTransform fit_mirrored = procrustes(mirrored.leftCols(n1), c1);
  if (procrustes_residual(fit_mirrored, mirrored.leftCols(n1), c1) <
      procrustes_residual(fit, embedding.points.leftCols(n1), c1)) {
    return fit_mirrored.apply(mirrored.rightCols(n2));
  }
  return fit.apply(embedding.points.rightCols(n2));
}

}  // namespace egoloc
