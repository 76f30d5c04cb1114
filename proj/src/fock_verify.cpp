#include "mdiew/fock_verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "mdiew/fock.hpp"
#include "mdiew/io.hpp"

namespace mdiew::fock {

namespace {

VerifyCheck check_povm_equivalence(const VerifyConfig& cfg) {
  VerifyCheck c;
  c.name = "povm_projector_vs_conjugation";
  // renormalizing the truncated projector perturbs the brute-force route at
  // the level of the truncation deficit, so the tolerance tracks it
  const double deficit = std::pow(cfg.lambda, 2 * cfg.cutoff);
  c.tolerance = std::max(1e-8, 20.0 * deficit);
  for (int inst = 0; inst < cfg.instances; ++inst) {
    RngStream rng(cfg.seed, 1000 + static_cast<std::uint64_t>(inst));
    const FockOperator rho = random_density({cfg.cutoff, cfg.cutoff}, rng);
    const FockOperator closed = povm_element(rho, cfg.lambda);
    const FockOperator brute = povm_element_projector_route(rho, cfg.lambda);
    c.max_error = std::max(c.max_error, (closed.matrix() - brute.matrix()).cwiseAbs().maxCoeff());
  }
  c.passed = c.max_error <= c.tolerance;
  c.detail = "projector truncation deficit ~ " + io::format_double(deficit);
  return c;
}

VerifyCheck check_trace_identity(const VerifyConfig& cfg) {
  VerifyCheck c;
  c.name = "witness_trace_identity";
  c.tolerance = 1e-9;  // relative
  const double pref = std::pow(1.0 - cfg.lambda * cfg.lambda, 2);
  for (int inst = 0; inst < cfg.instances; ++inst) {
    RngStream rng(cfg.seed, 2000 + static_cast<std::uint64_t>(inst));
    const FockOperator rho = random_density({cfg.cutoff, cfg.cutoff}, rng);
    const FockOperator w = random_hermitian({cfg.cutoff, cfg.cutoff}, rng);
    const FockOperator m = povm_element(rho, cfg.lambda);
    const FockOperator wt = witness_tilde(w, cfg.lambda);
    const double lhs = (m.matrix() * wt.matrix()).trace().real();
    const double rhs = pref * (rho.matrix() * w.matrix()).trace().real();
    const double rel = std::abs(lhs - rhs) / std::max(1e-30, std::abs(rhs));
    c.max_error = std::max(c.max_error, rel);
  }
  c.passed = c.max_error <= c.tolerance;
  return c;
}

VerifyCheck check_separable_transform(const VerifyConfig& cfg) {
  VerifyCheck c;
  c.name = "separable_transform";
  c.tolerance = 1e-10;
  const int cutoff = std::min(cfg.cutoff, 6);
  bool all = true;
  for (int inst = 0; inst < cfg.instances; ++inst) {
    RngStream rng(cfg.seed, 3000 + static_cast<std::uint64_t>(inst));
    const int terms = 1 + static_cast<int>(rng.next_u64() % 3);
    const auto decomposition = random_separable_terms(cutoff, cutoff, terms, rng);
    const SeparableTransformReport rep =
        separable_transform_check(decomposition, cfg.lambda, c.tolerance);
    c.max_error = std::max(c.max_error, rep.decomposition_error);
    all = all && rep.passed;
  }
  c.passed = all && c.max_error <= c.tolerance;
  return c;
}

VerifyCheck check_three_mode_identity(const VerifyConfig& cfg) {
  VerifyCheck c;
  c.name = "three_mode_trace_identity";
  c.tolerance = 1e-9;
  const int cutoff = std::min(cfg.cutoff, 4);
  const double pref = std::pow(1.0 - cfg.lambda * cfg.lambda, 3);
  for (int inst = 0; inst < cfg.instances; ++inst) {
    RngStream rng(cfg.seed, 4000 + static_cast<std::uint64_t>(inst));
    const FockOperator rho = random_density({cutoff, cutoff, cutoff}, rng);
    const FockOperator w = random_hermitian({cutoff, cutoff, cutoff}, rng);
    const FockOperator m = multimode_povm_element(rho, cfg.lambda, 2, 1);
    const FockOperator wt = witness_tilde(w, cfg.lambda);
    const double lhs = (m.matrix() * wt.matrix()).trace().real();
    const double rhs = pref * (rho.matrix() * w.matrix()).trace().real();
    const double rel = std::abs(lhs - rhs) / std::max(1e-30, std::abs(rhs));
    c.max_error = std::max(c.max_error, rel);
  }
  c.passed = c.max_error <= c.tolerance;
  return c;
}

VerifyCheck check_npt_sign(const VerifyConfig& cfg) {
  VerifyCheck c;
  c.name = "partial_transpose_sign";
  c.tolerance = 1e-12;
  bool all = true;
  int npt_seen = 0, ppt_seen = 0;
  for (int inst = 0; inst < std::max(cfg.instances, 20); ++inst) {
    RngStream rng(cfg.seed, 5000 + static_cast<std::uint64_t>(inst));
    FockOperator rho = random_density({3, 3}, rng, 1 + static_cast<int>(rng.next_u64() % 9));
    if (inst % 2 == 1) {
      // mix towards the maximally mixed state so both signs appear
      Matrix m = 0.35 * rho.matrix() + 0.65 * Matrix::Identity(9, 9) / 9.0;
      rho = FockOperator({3, 3}, std::move(m));
    }
    const double before = min_eigenvalue_hermitian(rho.partial_transpose_b());
    const FockOperator m = povm_element(rho, cfg.lambda);
    const double after = min_eigenvalue_hermitian(m.partial_transpose_b());
    (before < -1e-12 ? npt_seen : ppt_seen) += 1;
    const bool same_sign = (before < -1e-12 && after < -1e-14) ||
                           (before >= -1e-12 && after >= -1e-12);
    all = all && same_sign;
  }
  c.passed = all && npt_seen > 0 && ppt_seen > 0;
  c.detail = "npt instances: " + std::to_string(npt_seen) +
             ", ppt instances: " + std::to_string(ppt_seen);
  return c;
}

VerifyCheck check_lambda_window(const VerifyConfig& cfg) {
  VerifyCheck c;
  c.name = "lambda_window";
  const DampingWindow window = damping_factor(cfg.energy_scale);
  c.detail = "window (" + io::format_double(window.lambda_min) + ", 1), factor " +
             io::format_double(window.factor);
  RngStream rng(cfg.seed, 6000);
  const int cutoff = std::min(cfg.cutoff, 6);
  const FockOperator base = random_hermitian({cutoff, cutoff}, rng);
  const FockOperator w = energy_damped(base, cfg.energy_scale);
  const double inside = std::min(0.5 * (window.lambda_min + 1.0), 0.999);
  const double outside = window.lambda_min * 0.95;
  bool inside_ok = false, outside_rejected = false;
  try {
    (void)witness_tilde_checked(w, inside, cfg.energy_scale);
    inside_ok = true;
  } catch (const std::exception&) {
  }
  if (outside > 0.0) {
    try {
      (void)witness_tilde_checked(w, outside, cfg.energy_scale);
    } catch (const std::domain_error&) {
      outside_rejected = true;
    }
  } else {
    outside_rejected = true;
  }
  // boundary is rejected as well (the window is open)
  bool boundary_rejected = false;
  try {
    (void)witness_tilde_checked(w, window.lambda_min, cfg.energy_scale);
  } catch (const std::domain_error&) {
    boundary_rejected = true;
  }
  c.passed = inside_ok && outside_rejected && boundary_rejected;
  return c;
}

VerifyCheck check_tomography(const VerifyConfig& cfg) {
  VerifyCheck c;
  c.name = "tomography_round_trip";
  c.tolerance = 1e-6;
  RngStream rng(cfg.seed, 7000);
  const FockOperator rho = random_density({3, 3}, rng);
  const FockOperator m = povm_element(rho, cfg.lambda);
  const TomographyGrid grid = make_tomography_grid(m, 8, std::sqrt(2.0));
  const Reconstruction rec = reconstruct_povm(grid, {3, 3});
  c.max_error = (rec.m_hat.matrix() - m.matrix()).norm();
  c.passed = c.max_error <= c.tolerance;
  c.detail = "design condition " + io::format_double(rec.condition) + ", residual " +
             io::format_double(rec.residual);
  return c;
}

}  // namespace

VerifyReport run_fock_verification(const VerifyConfig& config) {
  if (config.cutoff < 2 || config.cutoff > 14) {
    throw std::invalid_argument("fock verification: cutoff must lie in [2, 14]");
  }
  if (config.instances < 1) {
    throw std::invalid_argument("fock verification: need at least one instance");
  }
  if (!(config.lambda > 0.0 && config.lambda < 1.0)) {
    throw std::invalid_argument("fock verification: lambda must lie in (0, 1)");
  }
  const DampingWindow window = damping_factor(config.energy_scale);
  if (config.lambda <= window.lambda_min) {
    throw std::invalid_argument(
        "fock verification: lambda " + io::format_double(config.lambda) +
        " is outside the admissible window (" + io::format_double(window.lambda_min) +
        ", 1) for energy scale N = " + io::format_double(config.energy_scale));
  }

  VerifyReport report;
  report.config = config;
  report.checks.push_back(check_povm_equivalence(config));
  report.checks.push_back(check_trace_identity(config));
  report.checks.push_back(check_separable_transform(config));
  report.checks.push_back(check_three_mode_identity(config));
  report.checks.push_back(check_npt_sign(config));
  report.checks.push_back(check_lambda_window(config));
  if (config.with_tomography) report.checks.push_back(check_tomography(config));
  report.all_passed = std::all_of(report.checks.begin(), report.checks.end(),
                                  [](const VerifyCheck& c) { return c.passed; });
  return report;
}

std::string verify_report_to_json(const VerifyReport& report) {
  nlohmann::json j;
  j["config"] = {{"cutoff", report.config.cutoff},
                 {"instances", report.config.instances},
                 {"lambda", report.config.lambda},
                 {"energy_scale", report.config.energy_scale},
                 {"seed", report.config.seed},
                 {"with_tomography", report.config.with_tomography}};
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"max_error", c.max_error},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  }
  j["checks"] = std::move(checks);
  j["all_passed"] = report.all_passed;
  return j.dump(2);
}

}  // namespace mdiew::fock
