#ifndef MDIEW_SAMPLER_HPP
#define MDIEW_SAMPLER_HPP

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

#include "mdiew/gaussian.hpp"
#include "mdiew/prior.hpp"
#include "mdiew/rng.hpp"

namespace mdiew {

/// One round of the MDI protocol: the drawn coherent amplitudes and the four
/// reported outcomes (a1, a2) for Alice and (b1, b2) for Bob.
struct MdiSample {
  double alpha_x = 0, alpha_p = 0, beta_x = 0, beta_p = 0;
  double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
};

/// Measurement description.
///
/// * paper_optimal: each probe is mixed with the matching mode of rho_AB on
///   a balanced beam splitter; x is read out on the sum port and p on the
///   difference port, then the known state means are subtracted
///   (a1 = A1 - <x_A>/sqrt2, a2 = A2 + <p_A>/sqrt2, likewise for Bob).
/// * separable_heterodyne: rho_AB is ignored; each side heterodynes its own
///   coherent input and reports the Bayesian posterior-mean estimate of the
///   amplitude, scaled by 1/sqrt2 into the outcome slots.  This is the
///   optimal product strategy and saturates the separable bound.
struct MeasurementScheme {
  enum class Variant { paper_optimal, separable_heterodyne };
  Variant variant = Variant::paper_optimal;
  /// Known state-quadrature means (<x_A>, <p_A>, <x_B>, <p_B>); these are
  /// configuration inputs, not estimated from data.
  std::array<double, 4> offsets = {0, 0, 0, 0};
};

/// Precomputed description of the outcome distribution of the beam-splitter
/// + homodyne measurement for a fixed two-mode state:
/// outcome = mean(alpha, beta) + L z with z standard normal, L the Cholesky
/// factor of the measured covariance.
class MeasurementKernel {
 public:
  MeasurementKernel(const GaussianState& rho_ab, const MeasurementScheme& scheme);

  /// Outcome means conditioned on the drawn amplitudes (offsets applied).
  Eigen::Vector4d outcome_mean(double alpha_x, double alpha_p, double beta_x,
                               double beta_p) const;
  const Eigen::Matrix4d& outcome_cov() const { return cov_; }

  /// Draws z (4 normal deviates) and produces the outcome vector.  Entries
  /// are NaN if the covariance factorization failed.
  MdiSample sample(const PriorSpec& prior, RngStream& rng) const;

 private:
  Eigen::Matrix4d cov_;
  Eigen::Matrix4d chol_;          // lower factor, or NaN on failure
  Eigen::Vector4d base_mean_;     // state contribution including offsets
  bool factorization_ok_ = true;
};

/// Single protocol round against a two-mode state (scheme paper_optimal),
/// or the product-strategy round when the scheme says so.
MdiSample mdi_round(const GaussianState& rho_ab, const PriorSpec& prior,
                    const MeasurementScheme& scheme, RngStream& rng);

/// Optimal product strategy: both sides heterodyne their own input and
/// report posterior-mean estimates (Gaussian prior: linear shrinkage
/// sigma^2/(1+sigma^2); smooth box: posterior mean by quadrature).
MdiSample separable_adversary_round(const PriorSpec& prior, RngStream& rng);

/// Batch summary: per-slot means and the (U_kappa^2 + V_kappa^2) first and
/// second moments over a kappa grid.
struct BatchSummary {
  std::uint64_t trials = 0;
  std::array<double, 8> slot_means = {};  // alpha_x..b2, same order as MdiSample
  std::vector<double> kappa_grid;
  std::vector<double> score_mean;      // mean of U^2+V^2 per kappa
  std::vector<double> score_second;    // mean of (U^2+V^2)^2 per kappa
};

struct BatchResult {
  std::vector<MdiSample> samples;
  BatchSummary summary;
};

struct BatchConfig {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  /// kappa values for the summary moments; defaults to {1} when empty.
  std::vector<double> kappa_grid = {1.0};
  /// worker threads; 0 picks the hardware concurrency
  int threads = 0;
  bool keep_samples = true;
};

/// Runs `trials` independent rounds, one counter-based stream per trial
/// (stream index == trial index), so results are identical for a fixed seed
/// no matter how the work is partitioned.
BatchResult run_batch(const BatchConfig& config, const GaussianState& rho_ab,
                      const PriorSpec& prior, const MeasurementScheme& scheme);

double u_kappa(const MdiSample& s, double kappa);
double v_kappa(const MdiSample& s, double kappa);

}  // namespace mdiew

#endif  // MDIEW_SAMPLER_HPP
