#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdiew/sampler.hpp"
#include "mdiew/witness.hpp"
#include "test_util.hpp"

using namespace mdiew;

TEST_CASE("round on two vacua with pinned amplitudes") {
  const GaussianState rho = vacuum(2);
  const PriorSpec pinned = PriorSpec::point(0.0, 0.0);
  MeasurementScheme scheme;
  const int n = 200000;
  double mean[4] = {0, 0, 0, 0};
  double var_a1 = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(71, static_cast<std::uint64_t>(i));
    const MdiSample s = mdi_round(rho, pinned, scheme, rng);
    mean[0] += s.a1;
    mean[1] += s.a2;
    mean[2] += s.b1;
    mean[3] += s.b2;
    var_a1 += s.a1 * s.a1;
  }
  for (double m : mean) CHECK(std::abs(m / n) < 0.005);
  CHECK(var_a1 / n == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("conditional outcome mean tracks the drawn amplitude") {
  // E[a1 | alpha] = alpha_x / sqrt2 for zero-mean states
  const GaussianState rho = tmsv(0.4);
  const PriorSpec pinned = PriorSpec::point(1.3, -0.6);
  MeasurementScheme scheme;
  const int n = 200000;
  double sum_a1 = 0.0, sum_a2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(72, static_cast<std::uint64_t>(i));
    const MdiSample s = mdi_round(rho, pinned, scheme, rng);
    sum_a1 += s.a1;
    sum_a2 += s.a2;
  }
  CHECK(sum_a1 / n == doctest::Approx(1.3 / std::sqrt(2.0)).epsilon(0.01));
  CHECK(sum_a2 / n == doctest::Approx(-0.6 / std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("sampled marginals match the analytic gaussian law") {
  const GaussianState rho = tmsv(0.5);
  MeasurementScheme scheme;
  const MeasurementKernel kernel(rho, scheme);
  const PriorSpec pinned = PriorSpec::point(0.7, -0.2);
  const Eigen::Vector4d mean = kernel.outcome_mean(0.7, -0.2, 0.7, -0.2);
  const Eigen::Matrix4d cov = kernel.outcome_cov();

  const int n = 100000;
  std::vector<std::vector<double>> slots(4);
  for (auto& s : slots) s.reserve(n);
  for (int i = 0; i < n; ++i) {
    RngStream rng(73, static_cast<std::uint64_t>(i));
    const MdiSample s = kernel.sample(pinned, rng);
    slots[0].push_back(s.a1);
    slots[1].push_back(s.a2);
    slots[2].push_back(s.b1);
    slots[3].push_back(s.b2);
  }
  for (int k = 0; k < 4; ++k) {
    const double p = testutil::ks_p_value(slots[static_cast<size_t>(k)], [&](double x) {
      return testutil::normal_cdf(x, mean(k), cov(k, k));
    });
    CHECK(p > 0.001);
  }
}

TEST_CASE("empirical score matches the analytic value") {
  // MDIEW from rounds on the TMSV converges to (1 + e^{-2r})/2
  BatchConfig cfg;
  cfg.trials = 400000;
  cfg.seed = 2024;
  cfg.keep_samples = true;
  const GaussianState rho = tmsv(0.5);
  const PriorSpec prior = PriorSpec::gaussian(2.0);
  MeasurementScheme scheme;
  const BatchResult batch = run_batch(cfg, rho, prior, scheme);
  const ScoreReport rep = mdi_score_from_samples(batch.samples, {1.0, std::nullopt}, 2.0);
  const double expected = 0.5 * (1.0 + std::exp(-1.0));
  CHECK(std::abs(rep.score - expected) < 3.0 * rep.std_error);
  CHECK(rep.bound == doctest::Approx(0.8));
  CHECK(rep.entangled_certified);

  // agreement with the analytic route for random states with known offsets
  for (int inst = 0; inst < 5; ++inst) {
    RngStream gen(99, static_cast<std::uint64_t>(inst));
    const GaussianState s = testutil::random_two_mode_state(gen);
    MeasurementScheme off;
    off.offsets = {s.mean()(0), s.mean()(1), s.mean()(2), s.mean()(3)};
    BatchConfig c2;
    c2.trials = 200000;
    c2.seed = 500 + static_cast<std::uint64_t>(inst);
    const BatchResult b = run_batch(c2, s, prior, off);
    const ScoreReport r = mdi_score_from_samples(b.samples, {1.0, std::nullopt}, 2.0);
    const double analytic = mdi_score_analytic(s, {1.0, std::nullopt});
    CHECK(std::abs(r.score - analytic) < 3.0 * r.std_error);
  }
}

TEST_CASE("separable adversary saturates the bound") {
  BatchConfig cfg;
  cfg.trials = 400000;
  cfg.seed = 31337;
  MeasurementScheme adv;
  adv.variant = MeasurementScheme::Variant::separable_heterodyne;

  // sigma = 1: achieved score approaches the bound 1/2
  {
    const BatchResult b = run_batch(cfg, vacuum(2), PriorSpec::gaussian(1.0), adv);
    const ScoreReport r = mdi_score_from_samples(b.samples, {1.0, std::nullopt}, 1.0);
    CHECK(std::abs(r.score - 0.5) < 3.0 * r.std_error);
  }
  // large sigma: per-side achieved variance sum approaches 1
  {
    const double sigma = 1e3;
    const BatchResult b = run_batch(cfg, vacuum(2), PriorSpec::gaussian(sigma), adv);
    double acc = 0.0;
    for (const MdiSample& s : b.samples) {
      const double ex = std::sqrt(2.0) * s.a1 - s.alpha_x;
      const double ep = std::sqrt(2.0) * s.a2 - s.alpha_p;
      acc += ex * ex + ep * ep;
    }
    CHECK(acc / static_cast<double>(b.samples.size()) ==
          doctest::Approx(sigma * sigma / (1 + sigma * sigma)).epsilon(0.01));
  }
  // sigma = 2, kappa = 1: bound value 4/5
  {
    const BatchResult b = run_batch(cfg, vacuum(2), PriorSpec::gaussian(2.0), adv);
    const ScoreReport r = mdi_score_from_samples(b.samples, {1.0, std::nullopt}, 2.0);
    CHECK(std::abs(r.score - 0.8) < 3.0 * r.std_error);
    CHECK_FALSE(r.entangled_certified);
  }
  // the smooth-box adversary cannot beat the flagged bound either
  {
    BatchConfig small = cfg;
    small.trials = 20000;
    const PriorSpec box = PriorSpec::smooth_box(3.0, 1.5);
    const BatchResult b = run_batch(small, vacuum(2), box, adv);
    const ScoreReport r = mdi_score_from_samples(b.samples, {1.0, std::nullopt},
                                                 std::numeric_limits<double>::infinity());
    const SeparableBound bound = separable_mdi_bound(1.0, box);
    CHECK(r.score > bound.value - 3.0 * r.std_error);
  }
}

TEST_CASE("batch determinism and partitioning") {
  BatchConfig cfg;
  cfg.trials = 5000;
  cfg.seed = 11;
  cfg.threads = 1;
  const GaussianState rho = tmsv(0.3);
  const PriorSpec prior = PriorSpec::gaussian(1.5);
  MeasurementScheme scheme;

  const BatchResult a = run_batch(cfg, rho, prior, scheme);
  cfg.threads = 7;
  const BatchResult b = run_batch(cfg, rho, prior, scheme);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].a1 == b.samples[i].a1);
    CHECK(a.samples[i].b2 == b.samples[i].b2);
    CHECK(a.samples[i].alpha_x == b.samples[i].alpha_x);
  }
  CHECK(a.summary.score_mean[0] == b.summary.score_mean[0]);

  // doubling the trials shrinks the standard error roughly by sqrt2
  BatchConfig half = cfg;
  half.trials = 50000;
  BatchConfig full = cfg;
  full.trials = 100000;
  const ScoreReport r_half = mdi_score_from_samples(run_batch(half, rho, prior, scheme).samples,
                                                    {1.0, std::nullopt}, 1.5);
  const ScoreReport r_full = mdi_score_from_samples(run_batch(full, rho, prior, scheme).samples,
                                                    {1.0, std::nullopt}, 1.5);
  const double ratio = r_half.std_error / r_full.std_error;
  CHECK(ratio > std::sqrt(2.0) * 0.8);
  CHECK(ratio < std::sqrt(2.0) * 1.2);

  CHECK_THROWS_AS(run_batch(BatchConfig{0, 0, {1.0}, 0, true}, rho, prior, scheme),
                  std::invalid_argument);
}

TEST_CASE("alice/bob relabeling symmetry at kappa = 1") {
  BatchConfig cfg;
  cfg.trials = 50000;
  cfg.seed = 404;
  const GaussianState rho = tmsv(0.5);  // swap-symmetric state
  const PriorSpec prior = PriorSpec::gaussian(2.0);
  MeasurementScheme scheme;
  const BatchResult b = run_batch(cfg, rho, prior, scheme);

  std::vector<MdiSample> swapped(b.samples.size());
  for (size_t i = 0; i < b.samples.size(); ++i) {
    const MdiSample& s = b.samples[i];
    swapped[i] = {s.beta_x, s.beta_p, s.alpha_x, s.alpha_p, s.b1, s.b2, s.a1, s.a2};
  }
  const ScoreReport orig = mdi_score_from_samples(b.samples, {1.0, std::nullopt}, 2.0);
  const ScoreReport swap = mdi_score_from_samples(swapped, {1.0, std::nullopt}, 2.0);
  CHECK(orig.score == doctest::Approx(swap.score).epsilon(1e-12));

  // analytic score of the mode-swapped state matches as well
  std::vector<int> perm = {1, 0};
  const GaussianState swapped_state = restrict_modes(rho, perm);
  CHECK(mdi_score_analytic(rho, {1.0, std::nullopt}) ==
        doctest::Approx(mdi_score_analytic(swapped_state, {1.0, std::nullopt})).epsilon(1e-12));
}
