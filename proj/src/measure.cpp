#include "egoloc/measure.hpp"

#include "egoloc/error.hpp"

#include <cmath>
#include <sstream>

namespace egoloc {

double GaussianStream::uniform_pm1() {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return 2.0 * (static_cast<double>(engine_() >> 11) * kScale) - 1.0;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = uniform_pm1();
    v = uniform_pm1();
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sigma_index, std::uint64_t trial_index) {
  return mix64(mix64(mix64(master) ^ sigma_index) ^ trial_index);
}

PerturbedDistances perturb_distances(const Matrix& d12, const NoiseModel& noise) {
  require_finite(d12, "perturb_distances input");
  if (!(noise.sigma >= 0.0)) throw InvalidInput("", "perturb_distances: sigma must be >= 0");
  if ((d12.array() < 0.0).any()) throw InvalidInput("", "perturb_distances: negative distance");

  PerturbedDistances out{d12, 0};
  if (noise.sigma == 0.0) return out;

  GaussianStream gauss(noise.seed);
  for (Eigen::Index i = 0; i < d12.rows(); ++i) {
    for (Eigen::Index j = 0; j < d12.cols(); ++j) {
      double& v = out.distances(i, j);
      v += noise.sigma * gauss.next();
      if (v < 0.0) {
        v = 0.0;
        ++out.clamped;
      }
    }
  }
  return out;
}

OmegaMoments omega_moments(double d, double sigma) {
  if (!(d >= 0.0) || !(sigma >= 0.0)) throw InvalidInput("", "omega_moments: d and sigma must be >= 0");
  const double s2 = sigma * sigma;
  return {s2, 4.0 * d * d * s2 + 2.0 * s2 * s2};
}

namespace {

// (M + Mᵀ)/2, negative off-diagonal entries set to 0, zero diagonal.
std::size_t symmetrize_clamp_hollow(Matrix& m) {
  m = (0.5 * (m + m.transpose())).eval();
  std::size_t clamped = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) < 0.0) {
        m(i, j) = 0.0;
        ++clamped;
      }
    }
  }
  m.diagonal().setZero();
  return clamped;
}

}  // namespace

Completion nystrom_complete(const Matrix& d1, const Matrix& d12, double condition_cap) {
  if (d1.rows() != d1.cols()) throw InvalidInput("", "nystrom_complete: d1 must be square");
  if (d12.rows() != d1.rows()) throw InvalidInput("", "nystrom_complete: d12 must have N1 rows");
  require_finite(d1, "d1");
  require_finite(d12, "d12");

  Eigen::JacobiSVD<Matrix> sv(d1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = sv.singularValues();
  const double cond = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
  if (!(cond <= condition_cap)) {
    std::ostringstream msg;
    msg << "nystrom_complete: D1 is singular or ill-conditioned (condition " << cond << " > cap "
        << condition_cap
        << "); the Nyström approximation needs rank(D1) >= rank(D2), consider a different "
           "matrix-completion method";
    throw NumericalFailure("", msg.str());
  }

  const Matrix x = Eigen::PartialPivLU<Matrix>(d1).solve(d12);
  Completion out;
  out.condition = cond;
  out.rank = d1.rows();
  out.d2_hat = d12.transpose() * x;
  out.clamped = symmetrize_clamp_hollow(out.d2_hat);
  return out;
}

Completion nystrom_complete_squared(const Matrix& d1, const Matrix& d12, double rank_tolerance) {
  if (d1.rows() != d1.cols()) throw InvalidInput("", "nystrom_complete: d1 must be square");
  if (d12.rows() != d1.rows()) throw InvalidInput("", "nystrom_complete: d12 must have N1 rows");
  require_finite(d1, "d1");
  require_finite(d12, "d12");

  const Matrix a = squared(d1);
  const Matrix b = squared(d12);
  Eigen::JacobiSVD<Matrix> sv(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = sv.singularValues();
  Completion out;
  if (!(s(0) > 0.0)) throw NumericalFailure("", "nystrom_complete: D1 is zero");
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size() && s(i) > rank_tolerance * s(0); ++i) {
    inv(i) = 1.0 / s(i);
    out.rank = i + 1;
  }
  out.condition = s(0) / s(out.rank - 1);

  const Matrix left = sv.matrixV().transpose() * b;
  const Matrix right = sv.matrixU().transpose() * b;
  out.d2_hat = left.transpose() * inv.asDiagonal() * right;
  out.clamped = symmetrize_clamp_hollow(out.d2_hat);
  out.d2_hat = out.d2_hat.cwiseSqrt();
  return out;
}

Completion nystrom_complete(const Matrix& d1, const Matrix& d12, CompletionDomain domain) {
  return domain == CompletionDomain::Squared ? nystrom_complete_squared(d1, d12) : nystrom_complete(d1, d12);
}

std::string_view completion_name(CompletionDomain domain) {
  return domain == CompletionDomain::Squared ? "squared" : "distance";
}

CompletionDomain parse_completion(std::string_view name) {
  if (name == "squared") return CompletionDomain::Squared;
  if (name == "distance") return CompletionDomain::Distance;
  throw InvalidInput("", "unknown completion domain '" + std::string(name) + "' (expected squared or distance)");
}

Matrix assemble_edm(const Matrix& d1, const Matrix& d12, const Matrix& d2_hat) {
  const Eigen::Index n1 = d1.rows(), n2 = d2_hat.rows();
  if (d1.cols() != n1 || d2_hat.cols() != n2 || d12.rows() != n1 || d12.cols() != n2) {
    std::ostringstream msg;
    msg << "assemble_edm: incompatible blocks d1 " << d1.rows() << "x" << d1.cols() << ", d12 "
        << d12.rows() << "x" << d12.cols() << ", d2 " << d2_hat.rows() << "x" << d2_hat.cols();
    throw InvalidInput("", msg.str());
  }
  Matrix d(n1 + n2, n1 + n2);
  d << d1, d12, d12.transpose(), d2_hat;
  return d;
}

MeasuredEdm complete_measurements(const Matrix& d1, const Matrix& d12_noisy, CompletionDomain domain) {
  Completion completion = nystrom_complete(d1, d12_noisy, domain);
  MeasuredEdm out;
  out.assembled = assemble_edm(d1, d12_noisy, completion.d2_hat);
  out.d1 = d1;
  out.d12_noisy = d12_noisy;
  out.d2_hat = std::move(completion.d2_hat);
  out.completion_clamped = completion.clamped;
  return out;
}

}  // namespace egoloc
