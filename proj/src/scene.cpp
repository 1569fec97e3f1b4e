#include "egoloc/scene.hpp"

#include "egoloc/error.hpp"

#include <sstream>
#include <string>

namespace egoloc {

void validate_conformation(const Matrix& c, std::string_view label, bool require_rank3) {
  if (c.rows() != 3 || c.cols() < 3) {
    std::ostringstream msg;
    msg << label << ": conformation must be 3xN with N >= 3, got " << c.rows() << "x" << c.cols();
    throw InvalidInput("", msg.str());
  }
  require_finite(c, label);
  if (require_rank3) {
    const Matrix centered = center_columns(c);
    Eigen::JacobiSVD<Matrix> sv(centered);
    const auto& s = sv.singularValues();
    if (!(s(2) > 1e-9 * s(0))) {
      throw NumericalFailure("", std::string(label) + ": landmarks are coplanar (rank < 3)");
    }
  }
}

Matrix place_body(const Matrix& shape, const Pose& pose) {
  if (shape.rows() != 3) throw InvalidInput("", "place_body: shape must have 3 rows");
  Matrix s = pose.rotation * shape;
  s.colwise() += pose.translation;
  return s;
}

Pose relative_pose(const Pose& body1, const Pose& body2) {
  return {body1.rotation.transpose() * body2.rotation,
          body1.rotation.transpose() * (body2.translation - body1.translation)};
}

Scene build_scene(const Matrix& c1, const Matrix& c2, const Pose& pose) {
  validate_conformation(c1, "c1");
  validate_conformation(c2, "c2");
  if (!is_rotation(pose.rotation)) throw InvalidInput("", "build_scene: pose rotation is not in SO(3)");
  if (!pose.translation.allFinite()) throw InvalidInput("", "build_scene: non-finite translation");
  return {c1, c2, pose, c1, place_body(c2, pose)};
}

Matrix exact_edm(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw InvalidInput("", "exact_edm: row-count mismatch");
  Matrix d(a.cols(), b.cols());
  for (Eigen::Index m = 0; m < b.cols(); ++m) {
    for (Eigen::Index n = 0; n < a.cols(); ++n) d(n, m) = (a.col(n) - b.col(m)).norm();
  }
  return d;
}

EdmBlocks edm_blocks(const Scene& scene) {
  return {exact_edm(scene.s1, scene.s1), exact_edm(scene.s2, scene.s2), exact_edm(scene.s1, scene.s2)};
}

Matrix full_edm(const Scene& scene) {
  Matrix s(3, scene.n1() + scene.n2());
  s << scene.s1, scene.s2;
  return exact_edm(s, s);
}

CrossGramDecomposition cross_gram(const Scene& scene) {
  return {scene.s1.colwise().squaredNorm().transpose(), scene.s2.colwise().squaredNorm().transpose()};
}

double cross_gram_identity_residual(const Scene& scene) {
  const auto [psi1, psi2] = cross_gram(scene);
  const Matrix lhs = squared(exact_edm(scene.s1, scene.s2));
  Matrix rhs = -2.0 * scene.s1.transpose() * scene.s2;
  rhs.colwise() += psi1;
  rhs.rowwise() += psi2.transpose();
  return (lhs - rhs).norm();
}

Matrix table1_c1() {
  Matrix c(3, 12);
  c << -1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25,
       -4, -4, -4, -4, 0, 0, 0, 0, 4, 4, 4, 4,
       0.5, 0.5, 1, 1, 1, 1, 4, 4, 4, 4, 0.5, 0.5;
  return c;
}

Matrix table1_c2() {
  Matrix c(3, 10);
  c << -1, 1, -1, 1, -1, 1, -1, 1, -1, 1,
       2, 2, 1, 1, -1, -1, -2, -2, 0, 0,
       1, 1, 1.5, 1.5, 1.5, 1.5, 1, 1, 0.5, 0.5;
  return c;
}

Pose table1_pose() {
  return {rotation_from_euler(
              EulerAngles::from_degrees(kTable1EulerDeg[0], kTable1EulerDeg[1], kTable1EulerDeg[2])),
          Vector3(kTable1Translation[0], kTable1Translation[1], kTable1Translation[2])};
}

Scene table1_scene() { return build_scene(table1_c1(), table1_c2(), table1_pose()); }

}  // namespace egoloc
