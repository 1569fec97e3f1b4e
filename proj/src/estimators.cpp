#include "egoloc/estimators.hpp"

#include "egoloc/error.hpp"
#include "egoloc/scene.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

namespace egoloc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::array<std::array<int, 3>, 6> kPermutations = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

const std::array<Vector3, 4>& proper_sign_flips() {
  static const std::array<Vector3, 4> flips = {
      Vector3(1, 1, 1), Vector3(1, -1, -1), Vector3(-1, 1, -1), Vector3(-1, -1, 1)};
  return flips;
}

bool lex_less(const Matrix3& a, const Matrix3& b) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
    }
  }
  return false;
}

Matrix3 proper_polar(const Matrix3& m) {
  Eigen::JacobiSVD<Matrix3> sv(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix3 u = sv.matrixU(), v = sv.matrixV();
  const Vector3 fix(1.0, 1.0, (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
  return u * fix.asDiagonal() * v.transpose();
}

}  // namespace

Matrix augmented_positions(const Vector3& t, const Matrix& c1, const Matrix& body2_shape) {
  Matrix s(3, c1.cols() + body2_shape.cols());
  s << c1, body2_shape.colwise() + t;
  return s;
}

TranslationProblem::TranslationProblem(const Matrix& c1, const Matrix& body2_shape, const Matrix& d_hat) {
  const Eigen::Index n1 = c1.cols(), n2 = body2_shape.cols(), n = n1 + n2;
  if (c1.rows() != 3 || body2_shape.rows() != 3) {
    throw InvalidInput("", "translation problem: conformations must have 3 rows");
  }
  if (d_hat.rows() != n || d_hat.cols() != n) {
    throw InvalidInput("", "translation problem: D̂ must be (N1+N2) x (N1+N2)");
  }
  require_finite(d_hat, "D̂");
  centered_base_ = center_columns(augmented_positions(Vector3::Zero(), c1, body2_shape));
  body2_indicator_ = Vector::Zero(n);
  body2_indicator_.tail(n2).setOnes();
  body2_indicator_.array() -= static_cast<double>(n2) / static_cast<double>(n);
  half_gram_edm_ = -double_center(squared(d_hat));
}

Vector TranslationProblem::residual(const Vector3& t) const {
  const Matrix p = centered_base_ + t * body2_indicator_.transpose();
  Matrix r = p.transpose() * p + half_gram_edm_;
  return Eigen::Map<const Vector>(r.data(), r.size());
}

Eigen::Matrix<double, Eigen::Dynamic, 3> TranslationProblem::jacobian(const Vector3& t) const {
  const Matrix p = centered_base_ + t * body2_indicator_.transpose();
  const Eigen::Index n = p.cols();
  Eigen::Matrix<double, Eigen::Dynamic, 3> jac(n * n, 3);
  for (int k = 0; k < 3; ++k) {
    const Vector pk = p.row(k).transpose();
    Matrix dk = body2_indicator_ * pk.transpose();
    dk += dk.transpose().eval();
    jac.col(k) = Eigen::Map<const Vector>(dk.data(), dk.size());
  }
  return jac;
}

Vector3 TranslationProblem::gradient(const Vector3& t) const {
  return 2.0 * jacobian(t).transpose() * residual(t);
}

TranslationEstimate TranslationProblem::solve(const Vector3& initial, const SolverOptions& options) const {
  // Levenberg-Marquardt with Nielsen's damping update on ½‖r‖².
  Vector3 t = initial;
  Vector r = residual(t);
  Eigen::Matrix<double, Eigen::Dynamic, 3> jac = jacobian(t);
  Matrix3 jtj = jac.transpose() * jac;
  Vector3 jtr = jac.transpose() * r;
  double cost = r.squaredNorm();

  TranslationEstimate out;
  out.initial_objective = cost;
  double mu = 1e-3 * jtj.diagonal().maxCoeff();
  double nu = 2.0;
  int iter = 0;
  bool stationary = false;
  for (; iter < options.max_iterations; ++iter) {
    if (2.0 * jtr.norm() <= options.gradient_tolerance) {
      stationary = true;
      break;
    }
    const double decrease = jtr.dot(jtj.ldlt().solve(jtr));
    if (decrease >= 0.0 && decrease <= options.relative_decrease_tolerance * cost) {
      stationary = true;
      break;
    }
    const Vector3 step = (jtj + mu * Matrix3::Identity()).ldlt().solve(-jtr);
    if (!step.allFinite() || step.norm() <= 1e-15 * (t.norm() + 1e-15)) break;

    const Vector3 t_new = t + step;
    const Vector r_new = residual(t_new);
    const double cost_new = r_new.squaredNorm();
    const double predicted = step.dot(mu * step - jtr);  // 2 * predicted decrease of ½‖r‖²
    const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;
    if (rho > 0.0 && cost_new <= cost) {
      t = t_new;
      r = r_new;
      cost = cost_new;
      jac = jacobian(t);
      jtj = jac.transpose() * jac;
      jtr = jac.transpose() * r;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu)) break;
    }
  }

  out.t_hat = t;
  out.objective = cost;
  out.iterations = iter;
  out.gradient_norm = 2.0 * jtr.norm();
  out.converged = stationary || out.gradient_norm <= options.gradient_tolerance;
  return out;
}

double translation_objective(const Vector3& t, const Matrix& c1, const Matrix& s2_hat, const Matrix& d_hat) {
  return TranslationProblem(c1, center_columns(s2_hat), d_hat).objective(t);
}

TranslationEstimate estimate_translation(const Matrix& c1, const Matrix& s2_hat, const Matrix& d_hat,
                                         const SolverOptions& options) {
  const TranslationProblem problem(c1, center_columns(s2_hat), d_hat);
  return problem.solve(s2_hat.rowwise().mean(), options);
}

Matrix egoistic_projection(const Matrix& c1, const Matrix& d12) {
  if (d12.rows() != c1.cols()) throw InvalidInput("", "d12 must have N1 rows");
  const Matrix pinv = pseudo_inverse(center_columns(c1), PinvSide::LeftOfTranspose, "body 1 (c1)");
  return pinv * double_center(squared(d12), d12.rows(), d12.cols());
}

BodyMoments body_moments(const Matrix& c) {
  validate_conformation(c, "body");
  const Matrix centered = center_columns(c);
  const Matrix3 gram = centered * centered.transpose();
  Matrix3 off = gram;
  off.diagonal().setZero();
  return {gram.diagonal(), off.norm() / gram.norm()};
}

RotationEstimate estimate_rotation_egoistic(const Matrix& c1, const Matrix& d12_noisy,
                                            const std::optional<Vector3>& axis_moments) {
  validate_conformation(c1, "c1", true);
  require_finite(d12_noisy, "d12");
  const Matrix dcheck = egoistic_projection(c1, d12_noisy);
  const Matrix3 target = dcheck * dcheck.transpose();
  const SymEigDecomposition eig = sym_eig(target);
  const Matrix3 v = eig.vectors;

  RotationEstimate out;
  out.spectrum = eig.values;
  out.reference_moments = axis_moments.value_or(out.spectrum);
  if (!out.reference_moments.allFinite()) throw InvalidInput("", "axis moments must be finite");
  const double scale = std::max(std::abs(out.spectrum(0)), std::numeric_limits<double>::min());
  const double gap = std::min(out.spectrum(0) - out.spectrum(1), out.spectrum(1) - out.spectrum(2));
  out.degenerate_spectrum = gap / scale < 1e-6;

  struct Candidate {
    Matrix3 q;
    double objective;
    int permutation;
  };
  std::vector<Candidate> candidates;
  for (int p = 0; p < 6; ++p) {
    Matrix3 permuted;
    for (int j = 0; j < 3; ++j) permuted.col(j) = v.col(kPermutations[p][j]);
    for (int mask = 0; mask < 8; ++mask) {
      Vector3 signs = Vector3::Ones();
      for (int j = 0; j < 3; ++j) {
        if (mask & (1 << j)) signs(j) = -1.0;
      }
      const Matrix3 q = permuted * signs.asDiagonal();
      if (q.determinant() < 0.0) continue;
      const double obj = (target - q * out.reference_moments.asDiagonal() * q.transpose()).squaredNorm();
      candidates.push_back({q, obj, p});
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best = std::min(best, c.objective);
  const double tie = best + 1e-12 * target.squaredNorm() + std::numeric_limits<double>::min();

  const Candidate* chosen = nullptr;
  for (const auto& c : candidates) {
    if (c.objective > tie) continue;
    out.ambiguity_set.push_back(c.q);
    if (!chosen || lex_less(c.q, chosen->q)) chosen = &c;
  }
  out.q_hat = chosen->q;
  out.objective = chosen->objective;
  out.chosen_permutation = chosen->permutation;
  return out;
}

RotationEstimate estimate_rotation_opp_genie(const Matrix& c1, const Matrix& c2, const Matrix& d12_noisy) {
  validate_conformation(c1, "c1", true);
  validate_conformation(c2, "c2", true);
  if (d12_noisy.rows() != c1.cols() || d12_noisy.cols() != c2.cols()) {
    throw InvalidInput("", "d12 must be N1 x N2");
  }
  const Matrix c1_bar = center_columns(c1);
  const Matrix c2_pinv = pseudo_inverse(center_columns(c2), PinvSide::Right, "body 2 (c2)");
  const Matrix dcheck = double_center(squared(d12_noisy), c1.cols(), c2.cols()) * c2_pinv;

  RotationEstimate out;
  out.q_hat = proper_polar(c1_bar * dcheck);
  out.objective = (dcheck - c1_bar.transpose() * out.q_hat).squaredNorm();
  out.ambiguity_set = {out.q_hat};
  const Matrix3 gram = c1_bar * dcheck;
  out.spectrum = Eigen::JacobiSVD<Matrix3>(gram).singularValues();
  out.reference_moments = out.spectrum;
  return out;
}

RotationEstimate estimate_rotation_naive_eig(const Matrix& s2_hat) {
  if (s2_hat.rows() != 3 || s2_hat.cols() < 3) throw InvalidInput("", "s2_hat must be 3 x N2 with N2 >= 3");
  require_finite(s2_hat, "s2_hat");
  const Matrix centered = center_columns(s2_hat);
  const Matrix3 gram = centered * centered.transpose();
  const SymEigDecomposition eig = sym_eig(gram);
  if (!(eig.values(2) > 1e-12 * eig.values(0))) {
    throw NumericalFailure("", "naive eigen rotation: estimated body is rank deficient");
  }
  Matrix3 q = eig.vectors;
  if (q.determinant() < 0.0) q.col(2) *= -1.0;

  RotationEstimate out;
  out.q_hat = q;
  out.spectrum = eig.values;
  out.reference_moments = eig.values;
  out.objective = (gram - q * eig.values.asDiagonal() * q.transpose()).squaredNorm();
  for (const Vector3& s : proper_sign_flips()) out.ambiguity_set.push_back(q * s.asDiagonal());
  const double gap = std::min(eig.values(0) - eig.values(1), eig.values(1) - eig.values(2));
  out.degenerate_spectrum = gap / eig.values(0) < 1e-6;
  return out;
}

double rotation_error_modulo_signs(const Matrix3& q_hat, const Matrix3& truth) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vector3& s : proper_sign_flips()) best = std::min(best, (q_hat * s.asDiagonal() - truth).norm());
  return best;
}

LocalizationResult egoistic_localize(const Matrix& c1, const Matrix& d1, const Matrix& d12_noisy,
                                     const LocalizationOptions& options) {
  with_stage("input", [&] {
    validate_conformation(c1, "c1", true);
    if (d1.rows() != c1.cols() || d1.cols() != c1.cols()) throw InvalidInput("", "d1 must be N1 x N1");
    if (d12_noisy.rows() != c1.cols()) throw InvalidInput("", "d12 must have N1 rows");
  });

  LocalizationResult out;
  auto start = Clock::now();
  out.measured = with_stage("completion", [&] { return complete_measurements(d1, d12_noisy, options.completion); });
  out.timings.completion = seconds_since(start);

  start = Clock::now();
  out.embedding = with_stage("mds", [&] { return classical_mds(out.measured.assembled, 3); });
  out.timings.embedding = seconds_since(start);

  start = Clock::now();
  out.s2_hat = with_stage("procrustes", [&] { return anchor_embedding(out.embedding, c1); });
  out.timings.anchoring = seconds_since(start);

  start = Clock::now();
  out.translation = with_stage("translation", [&] {
    return estimate_translation(c1, out.s2_hat, out.measured.assembled, options.solver);
  });
  out.timings.translation = seconds_since(start);

  start = Clock::now();
  out.rotation = with_stage("rotation", [&] {
    return estimate_rotation_egoistic(c1, d12_noisy, options.axis_moments);
  });
  out.timings.rotation = seconds_since(start);
  return out;
}

TranslationEstimate genie_aided_translation(const Matrix& c1, const Matrix& c2, const Matrix3& q_external,
                                            const Matrix& d1, const Matrix& d12_noisy,
                                            const SolverOptions& options) {
  validate_conformation(c1, "c1");
  validate_conformation(c2, "c2");
  if (!is_rotation(q_external, 1e-6)) throw InvalidInput("genie", "external rotation is not in SO(3)");
  const Matrix d_hat = assemble_edm(d1, d12_noisy, exact_edm(c2, c2));
  const Matrix body2 = q_external * c2;

  // Start from the anchored MDS solution of the genie EDM.
  const Embedding embedding = with_stage("genie mds", [&] { return classical_mds(d_hat, 3); });
  const Matrix s2 = with_stage("genie procrustes", [&] { return anchor_embedding(embedding, c1); });
  const Vector3 initial = s2.rowwise().mean() - body2.rowwise().mean();

  return with_stage("genie translation",
                    [&] { return TranslationProblem(c1, body2, d_hat).solve(initial, options); });
}

}  // namespace egoloc
