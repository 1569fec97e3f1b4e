#pragma once

#include "egoloc/numkit.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace egoloc {

struct NoiseModel {
  double sigma = 0.0;  // standard deviation of the additive ranging error
  std::uint64_t seed = 0;
};

/**
 * Portable, seedable standard-normal stream.
 *
 * mt19937_64 output is fixed by the C++ standard; uniforms are built from its
 * top 53 bits and transformed with the Marsaglia polar method, so a given seed
 * yields the same variates on every conforming platform (unlike
 * std::normal_distribution, whose algorithm is implementation-defined).
 */
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next();

 private:
  double uniform_pm1();  // uniform on (-1, 1)

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Independent stream seed for (master seed, sigma index, trial index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sigma_index, std::uint64_t trial_index);

struct PerturbedDistances {
  Matrix distances;
  std::size_t clamped = 0;  // entries that went negative and were set to 0
};

/// d̃ = d + υ with υ ~ N(0, σ²) i.i.d., drawn in row-major order. Negative
/// results are clamped to zero and counted.
PerturbedDistances perturb_distances(const Matrix& d12, const NoiseModel& noise);

struct OmegaMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Moments of ω = d̃² - d²: E[ω] = σ², Var[ω] = 4d²σ² + 2σ⁴.
OmegaMoments omega_moments(double d, double sigma);

struct Completion {
  Matrix d2_hat;
  std::size_t clamped = 0;  // negative entries set to 0
  double condition = 0.0;   // 2-norm condition number of the inverted block
  Eigen::Index rank = 0;    // rank of the inverted block
};

/// Which matrix the Nyström extension is applied to. `Squared` extends the
/// squared block D1∘D1 (rank <= 5 for points in 3-D) with a rank-truncated
/// pseudo-inverse and takes the entrywise root; `Distance` extends the plain
/// distances with D1⁻¹.
enum class CompletionDomain { Squared, Distance };

std::string_view completion_name(CompletionDomain domain);
CompletionDomain parse_completion(std::string_view name);

/// Nyström estimate of the unobserved intra-body block:
/// D̂2 = H[ sym(D12ᵀ D1⁻¹ D12) ] with negatives clamped to 0.
/// Throws NumericalFailure when D1 is singular or its condition number
/// exceeds `condition_cap`.
Completion nystrom_complete(const Matrix& d1, const Matrix& d12,
                            double condition_cap = kDefaultConditionCap);

/// D̂2 = sqrt∘H[ sym(D12²ᵀ (D1²)⁺ D12²) ], squares taken entrywise. Singular
/// values of D1² below `rank_tolerance` times the largest are discarded.
Completion nystrom_complete_squared(const Matrix& d1, const Matrix& d12, double rank_tolerance = 1e-10);

Completion nystrom_complete(const Matrix& d1, const Matrix& d12, CompletionDomain domain);

/// Block matrix [D1, D12; D12ᵀ, D̂2].
Matrix assemble_edm(const Matrix& d1, const Matrix& d12, const Matrix& d2_hat);

struct MeasuredEdm {
  Matrix d1;
  Matrix d12_noisy;
  Matrix d2_hat;
  Matrix assembled;
  std::size_t completion_clamped = 0;
};

/// Nyström completion followed by block assembly.
MeasuredEdm complete_measurements(const Matrix& d1, const Matrix& d12_noisy,
                                  CompletionDomain domain = CompletionDomain::Squared);

}  // namespace egoloc
