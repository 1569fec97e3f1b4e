#include "egoloc/error.hpp"
#include "egoloc/scene.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace egoloc;
namespace et = egoloc::testing;

namespace {

Scene random_scene(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(4, 14);
  Matrix c1 = et::random_points(rng, count(rng));
  Matrix c2 = et::random_points(rng, count(rng));
  return build_scene(c1, c2, {et::random_rotation(rng), et::random_vector(rng, 10.0)});
}

}  // namespace

TEST(TableOne, ConformationsAsPublished) {
  const double c1[3][12] = {{-1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25},
                            {-4, -4, -4, -4, 0, 0, 0, 0, 4, 4, 4, 4},
                            {0.5, 0.5, 1, 1, 1, 1, 4, 4, 4, 4, 0.5, 0.5}};
  const double c2[3][10] = {{-1, 1, -1, 1, -1, 1, -1, 1, -1, 1},
                            {2, 2, 1, 1, -1, -1, -2, -2, 0, 0},
                            {1, 1, 1.5, 1.5, 1.5, 1.5, 1, 1, 0.5, 0.5}};
  const Matrix a = table1_c1(), b = table1_c2();
  ASSERT_EQ(a.rows(), 3);
  ASSERT_EQ(a.cols(), 12);
  ASSERT_EQ(b.cols(), 10);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 12; ++j) EXPECT_EQ(a(i, j), c1[i][j]);
    for (int j = 0; j < 10; ++j) EXPECT_EQ(b(i, j), c2[i][j]);
  }
  const Pose p = table1_pose();
  EXPECT_EQ(p.translation, Vector3(7, 3, 0.5));
  EXPECT_LE((p.rotation - et::euler_closed_form(et::deg(10), et::deg(20), et::deg(45))).norm(), 1e-14);
}

TEST(TableOne, ShapesAreUncenteredAsPrinted) {
  EXPECT_NEAR(table1_c1().row(2).mean(), 22.0 / 12.0, 1e-15);
  EXPECT_NEAR(table1_c2().row(2).mean(), 1.1, 1e-15);
  EXPECT_NEAR(table1_c2().row(0).mean(), 0.0, 1e-15);
}

TEST(PlaceBody, IdentityAndPureShift) {
  const Matrix c = table1_c2();
  EXPECT_EQ(place_body(c, Pose{}), c);
  const Matrix shifted = place_body(c, {Matrix3::Identity(), Vector3(1, 2, 3)});
  for (Eigen::Index j = 0; j < c.cols(); ++j) EXPECT_EQ(shifted.col(j), c.col(j) + Vector3(1, 2, 3));
  EXPECT_THROW(place_body(Matrix::Zero(2, 4), Pose{}), InvalidInput);
}

TEST(PlaceBody, TableOneBodyTwoColumnByColumn) {
  const Matrix c2 = table1_c2();
  const Matrix3 q = et::euler_closed_form(et::deg(10), et::deg(20), et::deg(45));
  const Matrix s2 = place_body(c2, table1_pose());
  for (Eigen::Index j = 0; j < c2.cols(); ++j) {
    Vector3 expected = Vector3(7, 3, 0.5);
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) expected(r) += q(r, k) * c2(k, j);
    }
    EXPECT_LE((s2.col(j) - expected).norm(), 1e-14);
  }
}

TEST(BuildScene, CoincidentBodies) {
  const Matrix c = table1_c1();
  const Scene s = build_scene(c, c, Pose{});
  EXPECT_EQ(s.s1, c);
  EXPECT_EQ(s.s2, s.s1);
  EXPECT_EQ(s.n1(), 12);
}

TEST(BuildScene, PureTranslationShiftsMeans) {
  const Scene s = build_scene(table1_c1(), table1_c2(), {Matrix3::Identity(), Vector3(7, 3, 0.5)});
  const Vector3 expected = table1_c2().rowwise().mean() + Vector3(7, 3, 0.5);
  EXPECT_LE((s.s2.rowwise().mean() - expected).norm(), 1e-14);
  EXPECT_LE((expected - Vector3(7, 3, 1.6)).norm(), 1e-14);
}

TEST(BuildScene, TableOneInvariants) {
  const Scene s = table1_scene();
  EXPECT_EQ(s.s1, table1_c1());
  const Matrix expected = (s.pose.rotation * s.c2).colwise() + s.pose.translation;
  EXPECT_LE((s.s2 - expected).norm(), 1e-14);
}

TEST(BuildScene, RejectsInvalidInput) {
  Matrix3 not_rotation = Matrix3::Identity();
  not_rotation(0, 0) = -1;
  EXPECT_THROW(build_scene(table1_c1(), table1_c2(), {not_rotation, Vector3::Zero()}), InvalidInput);
  EXPECT_THROW(build_scene(Matrix::Zero(3, 2), table1_c2(), Pose{}), InvalidInput);
  EXPECT_THROW(build_scene(table1_c1(), Matrix::Zero(4, 5), Pose{}), InvalidInput);
  Matrix nan_shape = table1_c2();
  nan_shape(1, 1) = std::nan("");
  EXPECT_THROW(build_scene(table1_c1(), nan_shape, Pose{}), InvalidInput);
}

TEST(ValidateConformation, RankCheckForBodyOne) {
  Matrix planar = table1_c1();
  planar.row(2).setConstant(1.0);
  EXPECT_THROW(validate_conformation(planar, "c1", true), NumericalFailure);
  EXPECT_NO_THROW(validate_conformation(planar, "c2"));
}

TEST(RelativePose, ComposesAsBodyOneFrame) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const Pose p1{et::random_rotation(rng), et::random_vector(rng, 5)};
    const Pose p2{et::random_rotation(rng), et::random_vector(rng, 5)};
    const Pose rel = relative_pose(p1, p2);
    EXPECT_LE((rel.rotation - p1.rotation.transpose() * p2.rotation).norm(), 1e-12);
    // A point of body 2 expressed in body 1's frame.
    const Vector3 c = et::random_vector(rng, 2);
    const Vector3 world = p2.rotation * c + p2.translation;
    const Vector3 in_body1 = p1.rotation.transpose() * (world - p1.translation);
    EXPECT_LE((rel.rotation * c + rel.translation - in_body1).norm(), 1e-12);
  }
  const Pose reduced = relative_pose(Pose{}, table1_pose());
  EXPECT_LE((reduced.rotation - table1_pose().rotation).norm(), 1e-15);
}

TEST(ExactEdm, Examples) {
  Matrix a(3, 2);
  a << 0, 3, 0, 4, 0, 0;
  const Matrix d = exact_edm(a, a);
  EXPECT_DOUBLE_EQ(d(0, 1), 5.0);
  EXPECT_EQ(d(0, 0), 0.0);
  EXPECT_EQ(d, d.transpose());
  EXPECT_THROW(exact_edm(Matrix::Zero(3, 2), Matrix::Zero(2, 2)), InvalidInput);
}

TEST(ExactEdm, TableOneCrossBlockMatchesLoop) {
  const Scene s = table1_scene();
  const EdmBlocks b = edm_blocks(s);
  EXPECT_LE((b.d12 - et::brute_edm(s.s1, s.s2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((b.d1 - et::brute_edm(s.c1, s.c1)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((b.d2 - et::brute_edm(s.c2, s.c2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(b.d12.minCoeff(), 0.0);
  EXPECT_EQ(b.d1.diagonal(), Vector::Zero(12));

  const Matrix full = full_edm(s);
  EXPECT_EQ(full.rows(), 22);
  EXPECT_EQ(full.topRightCorner(12, 10), b.d12);
  EXPECT_EQ(full.bottomLeftCorner(10, 12), b.d12.transpose());
}

TEST(ExactEdm, RigidMotionPreservesIntraDistances) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    const Matrix c = et::random_points(rng, 9);
    const Matrix moved = place_body(c, {et::random_rotation(rng), et::random_vector(rng, 20)});
    EXPECT_LE((exact_edm(moved, moved) - exact_edm(c, c)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(CrossGram, PsiAreSquaredColumnNorms) {
  const Scene s = table1_scene();
  const auto g = cross_gram(s);
  for (Eigen::Index j = 0; j < s.n1(); ++j) EXPECT_NEAR(g.psi1(j), s.s1.col(j).squaredNorm(), 1e-12);
  for (Eigen::Index j = 0; j < s.n2(); ++j) EXPECT_NEAR(g.psi2(j), s.s2.col(j).squaredNorm(), 1e-12);
}

TEST(CrossGram, IdentityResidual) {
  const Matrix c = table1_c1();
  EXPECT_LE(cross_gram_identity_residual(build_scene(c, c, Pose{})), 1e-12);
  EXPECT_LE(cross_gram_identity_residual(table1_scene()), 1e-9);
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) worst = std::max(worst, cross_gram_identity_residual(random_scene(rng)));
  EXPECT_LE(worst, 1e-9);
}
