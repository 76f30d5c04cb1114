#include "mdiew/sampler.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "mdiew/numeric.hpp"

namespace mdiew {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Posterior mean of one amplitude component given the heterodyne estimate
// `est` (= amplitude + N(0, 1/2) noise) under the prior.
double posterior_mean_component(const PriorSpec& prior, double est) {
  if (prior.kind() == PriorSpec::Kind::gaussian) {
    const double s2 = prior.sigma() * prior.sigma();
    return est * s2 / (s2 + 1.0);
  }
  // numeric posterior mean for the smooth box: weights p(x) * N(est; x, 1/2)
  const double l = prior.box_l(), delta = prior.box_delta();
  const double lo = -l / 2.0 - delta / 2.0, hi = l / 2.0 + delta / 2.0;
  auto weight = [&](double x) {
    const double d = est - x;
    return prior.component_density(x) * std::exp(-d * d);
  };
  const double knots[4] = {lo, -l / 2.0 + delta / 2.0, l / 2.0 - delta / 2.0, hi};
  double z = 0.0, zx = 0.0;
  for (int k = 0; k < 3; ++k) {
    z += adaptive_simpson(weight, knots[k], knots[k + 1], 1e-12);
    zx += adaptive_simpson([&](double x) { return x * weight(x); }, knots[k], knots[k + 1], 1e-12);
  }
  return z > 0.0 ? zx / z : 0.0;
}

}  // namespace

double u_kappa(const MdiSample& s, double kappa) {
  return kappa * s.a1 - s.b1 / kappa - (kappa * s.alpha_x - s.beta_x / kappa) * kInvSqrt2;
}

double v_kappa(const MdiSample& s, double kappa) {
  return kappa * s.a2 + s.b2 / kappa - (kappa * s.alpha_p + s.beta_p / kappa) * kInvSqrt2;
}

MeasurementKernel::MeasurementKernel(const GaussianState& rho_ab,
                                     const MeasurementScheme& scheme) {
  if (rho_ab.n_modes() != 2) {
    throw std::invalid_argument("MeasurementKernel: rho_AB must have exactly 2 modes");
  }
  for (double o : scheme.offsets) {
    if (!std::isfinite(o)) throw std::invalid_argument("MeasurementKernel: offsets must be finite");
  }
  // Four-mode arrangement (alpha probe, A, B, beta probe); the probes carry
  // zero mean here, amplitude shifts are added linearly per round.
  GaussianState joint = coherent(0, 0).tensor(rho_ab).tensor(coherent(0, 0));
  auto bs_a = SymplecticMap::beam_splitter_50_50(4, 0, 1);
  auto bs_b = SymplecticMap::beam_splitter_50_50(4, 3, 2);
  GaussianState out = bs_b.apply(bs_a.apply(joint));
  // measured quadratures: x on the alpha sum port (mode 0), p on the A
  // difference port (mode 1), x on the beta sum port (mode 3), p on the B
  // difference port (mode 2)
  const int idx[4] = {0, 3, 6, 5};
  for (int i = 0; i < 4; ++i) {
    base_mean_(i) = out.mean()(idx[i]);
    for (int j = 0; j < 4; ++j) cov_(i, j) = out.cov()(idx[i], idx[j]);
  }
  // offset rule: a1 = A1 - <x_A>/sqrt2, a2 = A2 + <p_A>/sqrt2, same for Bob
  base_mean_(0) -= scheme.offsets[0] * kInvSqrt2;
  base_mean_(1) += scheme.offsets[1] * kInvSqrt2;
  base_mean_(2) -= scheme.offsets[2] * kInvSqrt2;
  base_mean_(3) += scheme.offsets[3] * kInvSqrt2;

  Eigen::LLT<Eigen::Matrix4d> llt(cov_);
  if (llt.info() == Eigen::Success) {
    chol_ = llt.matrixL();
  } else {
    factorization_ok_ = false;
    chol_.setConstant(std::numeric_limits<double>::quiet_NaN());
  }
}

Eigen::Vector4d MeasurementKernel::outcome_mean(double alpha_x, double alpha_p, double beta_x,
                                                double beta_p) const {
  // probe amplitudes propagate through the beam splitters with weight
  // 1/sqrt2 onto their sum/difference ports
  Eigen::Vector4d mean = base_mean_;
  mean(0) += alpha_x * kInvSqrt2;
  mean(1) += alpha_p * kInvSqrt2;
  mean(2) += beta_x * kInvSqrt2;
  mean(3) += beta_p * kInvSqrt2;
  return mean;
}

MdiSample MeasurementKernel::sample(const PriorSpec& prior, RngStream& rng) const {
  MdiSample s;
  std::tie(s.alpha_x, s.alpha_p) = prior.draw(rng);
  std::tie(s.beta_x, s.beta_p) = prior.draw(rng);
  Eigen::Vector4d z;
  for (int i = 0; i < 4; ++i) z(i) = rng.normal();
  const Eigen::Vector4d out = outcome_mean(s.alpha_x, s.alpha_p, s.beta_x, s.beta_p) + chol_ * z;
  s.a1 = out(0);
  s.a2 = out(1);
  s.b1 = out(2);
  s.b2 = out(3);
  return s;
}

MdiSample mdi_round(const GaussianState& rho_ab, const PriorSpec& prior,
                    const MeasurementScheme& scheme, RngStream& rng) {
  if (scheme.variant == MeasurementScheme::Variant::separable_heterodyne) {
    return separable_adversary_round(prior, rng);
  }
  MeasurementKernel kernel(rho_ab, scheme);
  return kernel.sample(prior, rng);
}

MdiSample separable_adversary_round(const PriorSpec& prior, RngStream& rng) {
  MdiSample s;
  std::tie(s.alpha_x, s.alpha_p) = prior.draw(rng);
  std::tie(s.beta_x, s.beta_p) = prior.draw(rng);
  // heterodyne of a coherent state: unbiased amplitude estimate with
  // variance 1/2 per component
  const double noise = std::sqrt(0.5);
  const double est_ax = posterior_mean_component(prior, s.alpha_x + noise * rng.normal());
  const double est_ap = posterior_mean_component(prior, s.alpha_p + noise * rng.normal());
  const double est_bx = posterior_mean_component(prior, s.beta_x + noise * rng.normal());
  const double est_bp = posterior_mean_component(prior, s.beta_p + noise * rng.normal());
  s.a1 = est_ax * kInvSqrt2;
  s.a2 = est_ap * kInvSqrt2;
  s.b1 = est_bx * kInvSqrt2;
  s.b2 = est_bp * kInvSqrt2;
  return s;
}

BatchResult run_batch(const BatchConfig& config, const GaussianState& rho_ab,
                      const PriorSpec& prior, const MeasurementScheme& scheme) {
  if (config.trials < 1) throw std::invalid_argument("run_batch: trials must be >= 1");
  const std::vector<double> kappas =
      config.kappa_grid.empty() ? std::vector<double>{1.0} : config.kappa_grid;
  for (double k : kappas) {
    if (!(k > 0.0)) throw std::invalid_argument("run_batch: kappa grid entries must be positive");
  }
  const bool adversary = scheme.variant == MeasurementScheme::Variant::separable_heterodyne;
  MeasurementKernel kernel(adversary ? vacuum(2) : rho_ab, scheme);

  const std::uint64_t n = config.trials;
  BatchResult result;
  result.samples.resize(config.keep_samples ? n : 0);
  const size_t nk = kappas.size();

  // trials are summed per fixed-size block and block sums are reduced in
  // block order, so the summary is bit-identical for any thread count
  constexpr std::uint64_t kBlock = 8192;
  const std::uint64_t n_blocks = (n + kBlock - 1) / kBlock;

  struct Accum {
    std::array<double, 8> slots = {};
    std::vector<double> s1, s2;
  };
  std::vector<Accum> blocks(static_cast<size_t>(n_blocks));
  for (auto& a : blocks) {
    a.s1.assign(nk, 0.0);
    a.s2.assign(nk, 0.0);
  }

  auto run_block = [&](std::uint64_t block) {
    Accum& acc = blocks[static_cast<size_t>(block)];
    const std::uint64_t lo = block * kBlock;
    const std::uint64_t hi = std::min(n, lo + kBlock);
    for (std::uint64_t trial = lo; trial < hi; ++trial) {
      RngStream rng(config.seed, trial);
      const MdiSample s =
          adversary ? separable_adversary_round(prior, rng) : kernel.sample(prior, rng);
      if (config.keep_samples) result.samples[trial] = s;
      const double vals[8] = {s.alpha_x, s.alpha_p, s.beta_x, s.beta_p, s.a1, s.a2, s.b1, s.b2};
      for (int i = 0; i < 8; ++i) acc.slots[static_cast<size_t>(i)] += vals[i];
      for (size_t k = 0; k < nk; ++k) {
        const double u = u_kappa(s, kappas[k]);
        const double v = v_kappa(s, kappas[k]);
        const double w = u * u + v * v;
        acc.s1[k] += w;
        acc.s2[k] += w * w;
      }
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  int threads = config.threads > 0 ? config.threads : static_cast<int>(hw ? hw : 1);
  if (static_cast<std::uint64_t>(threads) > n_blocks) threads = static_cast<int>(n_blocks);
  if (threads <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::uint64_t b = next.fetch_add(1);
          if (b >= n_blocks) return;
          run_block(b);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  BatchSummary& sum = result.summary;
  sum.trials = n;
  sum.kappa_grid = kappas;
  sum.score_mean.assign(nk, 0.0);
  sum.score_second.assign(nk, 0.0);
  for (const auto& a : blocks) {
    for (int i = 0; i < 8; ++i) {
      sum.slot_means[static_cast<size_t>(i)] += a.slots[static_cast<size_t>(i)];
    }
    for (size_t k = 0; k < nk; ++k) {
      sum.score_mean[k] += a.s1[k];
      sum.score_second[k] += a.s2[k];
    }
  }
  const double dn = static_cast<double>(n);
  for (auto& m : sum.slot_means) m /= dn;
  for (size_t k = 0; k < nk; ++k) {
    sum.score_mean[k] /= dn;
    sum.score_second[k] /= dn;
  }
  return result;
}

}  // namespace mdiew
