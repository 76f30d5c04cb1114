#include "mdiew/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mdiew/numeric.hpp"

namespace mdiew {

namespace {

Eigen::Matrix2d rotation2(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return r;
}

Eigen::Matrix2d squeeze2(double s) { return Eigen::Vector2d(s, 1.0 / s).asDiagonal(); }

Eigen::Matrix4d local_map(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<2, 2>() = a;
  m.bottomRightCorner<2, 2>() = b;
  return m;
}

Eigen::Matrix4d oriented_cov(const GaussianState& state, const WitnessSpec& spec) {
  Eigen::Matrix4d cov = state.cov();
  if (spec.orientation) {
    const Eigen::Matrix4d l = local_map(spec.orientation->block_a, spec.orientation->block_b);
    cov = l * cov * l.transpose();
  }
  return cov;
}

double ew_from_cov(const Eigen::Matrix4d& cov, double kappa) {
  const double k2 = kappa * kappa;
  return k2 * cov(0, 0) + cov(2, 2) / k2 - 2.0 * cov(0, 2) +
         k2 * cov(1, 1) + cov(3, 3) / k2 + 2.0 * cov(1, 3);
}

// min over kappa of ew - separable bound, given the oriented covariance;
// the objective is k^2 (P - 1/2) + (Q - 1/2)/k^2 + c with
// P = Var(x_A)+Var(p_A), Q = Var(x_B)+Var(p_B), c the cross term.
struct KappaOptimum {
  double slack;
  double kappa;
};

KappaOptimum best_kappa_closed_form(const Eigen::Matrix4d& cov) {
  const double p = cov(0, 0) + cov(1, 1) - 0.5;
  const double q = cov(2, 2) + cov(3, 3) - 0.5;
  const double c = -2.0 * cov(0, 2) + 2.0 * cov(1, 3);
  const double p2 = std::max(p, 0.0), q2 = std::max(q, 0.0);
  double kappa = 1.0;
  if (p2 > 0.0 && q2 > 0.0) kappa = std::pow(q2 / p2, 0.25);
  return {2.0 * std::sqrt(p2 * q2) + c, kappa};
}

void check_kappa(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("witness: kappa must be positive and finite");
  }
}

void check_orientation(const WitnessSpec& spec) {
  if (!spec.orientation) return;
  for (const Eigen::Matrix2d* b : {&spec.orientation->block_a, &spec.orientation->block_b}) {
    if (std::abs(b->determinant() - 1.0) > 1e-10) {
      throw std::invalid_argument("witness: orientation blocks must be symplectic (det 1)");
    }
  }
}

}  // namespace

double duan_ew(const GaussianState& state, const WitnessSpec& spec) {
  check_kappa(spec.kappa);
  check_orientation(spec);
  if (state.n_modes() != 2) throw std::invalid_argument("duan_ew: state must have 2 modes");
  return ew_from_cov(oriented_cov(state, spec), spec.kappa);
}

double separable_bound_ew(double kappa) {
  check_kappa(kappa);
  return (kappa * kappa + 1.0 / (kappa * kappa)) / 2.0;
}

double mdi_bound(double kappa, double sigma) {
  check_kappa(kappa);
  if (std::isinf(sigma)) return separable_bound_ew(kappa);
  if (!(sigma > 0.0)) throw std::invalid_argument("mdi_bound: sigma must be positive");
  return separable_bound_ew(kappa) * sigma * sigma / (1.0 + sigma * sigma);
}

ScoreReport mdi_score_from_samples(std::span<const MdiSample> samples, const WitnessSpec& spec,
                                   double sigma) {
  check_kappa(spec.kappa);
  if (samples.empty()) throw std::invalid_argument("mdi_score_from_samples: no samples");
  const size_t n = samples.size();
  double total = 0.0;
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) {
    const double u = u_kappa(samples[i], spec.kappa);
    const double v = v_kappa(samples[i], spec.kappa);
    w[i] = u * u + v * v;
    total += w[i];
  }
  const double mean = total / static_cast<double>(n);

  // jackknife over leave-one-out means
  double se = 0.0;
  if (n > 1) {
    const double dn = static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double loo = (total - w[i]) / (dn - 1.0);
      ss += (loo - mean) * (loo - mean);
    }
    se = std::sqrt((dn - 1.0) / dn * ss);
  }

  ScoreReport report;
  report.score = mean;
  report.std_error = se;
  report.kappa = spec.kappa;
  report.sigma = sigma;
  report.bound = mdi_bound(spec.kappa, sigma);
  // a single round carries no error estimate and can never certify
  report.entangled_certified = n > 1 && report.score + 3.0 * report.std_error < report.bound;
  return report;
}

double mdi_score_analytic(const GaussianState& state, const WitnessSpec& spec) {
  return 0.5 * (separable_bound_ew(spec.kappa) + duan_ew(state, spec));
}

double noisy_tmsv_ew(const NoiseParams& params, double kappa) {
  check_kappa(kappa);
  if (!(params.eta_a >= 0.0 && params.eta_a <= 1.0 && params.eta_b >= 0.0 && params.eta_b <= 1.0)) {
    throw std::invalid_argument("noisy_tmsv_ew: loss fractions must lie in [0,1]");
  }
  if (!std::isfinite(params.r)) throw std::invalid_argument("noisy_tmsv_ew: r must be finite");
  const double k2 = kappa * kappa;
  const double ta = std::sqrt(1.0 - params.eta_a);
  const double tb = std::sqrt(1.0 - params.eta_b);
  const double minus = kappa * ta - tb / kappa;
  const double plus = kappa * ta + tb / kappa;
  return 0.5 * (k2 * params.eta_a + params.eta_b / k2) +
         std::exp(2.0 * params.r) / 4.0 * minus * minus +
         std::exp(-2.0 * params.r) / 4.0 * plus * plus;
}

double optimal_kappa(double eta_a, double eta_b) {
  if (!(eta_a >= 0.0 && eta_a < 1.0 && eta_b >= 0.0 && eta_b < 1.0)) {
    throw std::domain_error("optimal_kappa: requires eta_A < 1 and eta_B < 1 "
                            "(no finite balancing kappa at full loss)");
  }
  return std::pow((1.0 - eta_b) / (1.0 - eta_a), 0.25);
}

bool is_entangled_ppt(const GaussianState& state, double tol) {
  if (state.n_modes() != 2) throw std::invalid_argument("is_entangled_ppt: needs a 2-mode state");
  Eigen::Matrix4d lambda = Eigen::Vector4d(1, 1, 1, -1).asDiagonal();
  const Eigen::MatrixXd tilde = lambda * state.cov() * lambda;
  return symplectic_eigenvalues(tilde).minCoeff() < kVacuumVariance - tol;
}

ContourTable contour_scan(std::span<const double> r_grid, std::span<const double> eta_grid,
                          std::span<const double> sigma_list) {
  ContourTable table;
  table.values.reserve(r_grid.size() * eta_grid.size());
  for (double r : r_grid) {
    for (double eta : eta_grid) {
      const double ew = noisy_tmsv_ew({eta, eta, r}, 1.0);
      table.values.push_back({r, eta, 0.5 * (1.0 + ew)});
    }
  }
  for (double sigma : sigma_list) {
    const double b = mdi_bound(1.0, sigma);
    for (double eta : eta_grid) {
      // value(r, eta) = (1 + eta + (1-eta) e^{-2r})/2, decreasing in r with
      // limit (1+eta)/2; a finite crossing needs (1+eta)/2 < b <= value(0)
      const double limit_term = 2.0 * b - 1.0 - eta;
      if (eta >= 1.0 || limit_term <= 0.0 || limit_term >= 1.0 - eta) continue;
      table.boundaries.push_back({sigma, eta, -0.5 * std::log(limit_term / (1.0 - eta))});
    }
  }
  return table;
}

namespace {

// Standard-form reduction: local symplectics making both diagonal blocks
// isotropic and the cross block diagonal with non-negative x-correlation.
struct StandardForm {
  Eigen::Matrix4d cov;
  Orientation orientation;
};

StandardForm standard_form(const Eigen::Matrix4d& cov) {
  Orientation orient;
  Eigen::Matrix2d* blocks[2] = {&orient.block_a, &orient.block_b};
  for (int side = 0; side < 2; ++side) {
    const Eigen::Matrix2d a = cov.block<2, 2>(2 * side, 2 * side);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    Eigen::Matrix2d r = es.eigenvectors();
    Eigen::Vector2d w = es.eigenvalues();
    if (r.determinant() < 0.0) r.col(1) *= -1.0;
    const double nu = std::sqrt(w(0) * w(1));
    *blocks[side] = Eigen::Vector2d(std::sqrt(nu / w(0)), std::sqrt(nu / w(1))).asDiagonal() *
                    r.transpose();
  }
  Eigen::Matrix4d m1 = local_map(orient.block_a, orient.block_b) * cov *
                       local_map(orient.block_a, orient.block_b).transpose();

  // rotate away the off-diagonal part of the cross block
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m1.block<2, 2>(0, 2),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d u = svd.matrixU(), v = svd.matrixV();
  if (u.determinant() < 0.0) u.col(1) *= -1.0;
  if (v.determinant() < 0.0) v.col(1) *= -1.0;
  orient.block_a = u.transpose() * orient.block_a;
  orient.block_b = v.transpose() * orient.block_b;
  Eigen::Matrix4d m2 = local_map(u.transpose(), v.transpose()) * m1 *
                       local_map(u.transpose(), v.transpose()).transpose();

  if (m2(0, 2) < 0.0) {
    const Eigen::Matrix2d flip = rotation2(std::numbers::pi);
    orient.block_b = flip * orient.block_b;
    m2 = local_map(Eigen::Matrix2d::Identity(), flip) * m2 *
         local_map(Eigen::Matrix2d::Identity(), flip).transpose();
  }
  return {m2, orient};
}

struct SearchState {
  double slack = std::numeric_limits<double>::infinity();
  double kappa = 1.0;
  Orientation orientation;
};

void consider(SearchState& best, const Eigen::Matrix4d& base_cov, const Orientation& orient) {
  const Eigen::Matrix4d cov =
      local_map(orient.block_a, orient.block_b) * base_cov *
      local_map(orient.block_a, orient.block_b).transpose();
  const KappaOptimum opt = best_kappa_closed_form(cov);
  if (opt.slack < best.slack) best = {opt.slack, opt.kappa, orient};
}

// rotation-only search: 64-point grids in the two mixing angles, then local
// golden refinement around the best cell
SearchState rotation_search(const Eigen::Matrix4d& cov, const Orientation& pre) {
  constexpr int kGrid = 64;
  SearchState best;
  double best_ta = 0.0, best_tb = 0.0;
  for (int ia = 0; ia < kGrid; ++ia) {
    const double ta = std::numbers::pi * ia / kGrid;
    for (int ib = 0; ib < kGrid; ++ib) {
      const double tb = std::numbers::pi * ib / kGrid;
      Orientation o{rotation2(ta) * pre.block_a, rotation2(tb) * pre.block_b};
      const double before = best.slack;
      consider(best, cov, o);
      if (best.slack < before) {
        best_ta = ta;
        best_tb = tb;
      }
    }
  }
  const double step = std::numbers::pi / kGrid;
  auto slack_at = [&](double ta, double tb) {
    Orientation o{rotation2(ta) * pre.block_a, rotation2(tb) * pre.block_b};
    const Eigen::Matrix4d c = local_map(o.block_a, o.block_b) * cov *
                              local_map(o.block_a, o.block_b).transpose();
    return best_kappa_closed_form(c).slack;
  };
  for (int sweep = 0; sweep < 3; ++sweep) {
    best_ta = golden_section_minimize([&](double t) { return slack_at(t, best_tb); },
                                      best_ta - step, best_ta + step, 1e-9);
    best_tb = golden_section_minimize([&](double t) { return slack_at(best_ta, t); },
                                      best_tb - step, best_tb + step, 1e-9);
  }
  consider(best, cov, {rotation2(best_ta) * pre.block_a, rotation2(best_tb) * pre.block_b});
  return best;
}

}  // namespace

WitnessOptimum optimize_witness(const GaussianState& state) {
  if (state.n_modes() != 2) throw std::invalid_argument("optimize_witness: needs a 2-mode state");
  const Eigen::Matrix4d cov = state.cov();

  SearchState best = rotation_search(cov, Orientation{});

  if (best.slack >= -1e-9) {
    // standard-form reduction plus a search over local squeezers; for NPT
    // states this family always contains a violating configuration
    const StandardForm sf = standard_form(cov);
    auto slack_at = [&](double lsa, double lsb) {
      Orientation o{squeeze2(std::exp(lsa)) * sf.orientation.block_a,
                    squeeze2(std::exp(lsb)) * sf.orientation.block_b};
      const Eigen::Matrix4d c = local_map(o.block_a, o.block_b) * cov *
                                local_map(o.block_a, o.block_b).transpose();
      return best_kappa_closed_form(c).slack;
    };
    double lsa = 0.0, lsb = 0.0, val = slack_at(0, 0);
    for (double ga = -1.5; ga <= 1.5; ga += 0.25) {
      for (double gb = -1.5; gb <= 1.5; gb += 0.25) {
        const double v = slack_at(ga, gb);
        if (v < val) {
          val = v;
          lsa = ga;
          lsb = gb;
        }
      }
    }
    for (int sweep = 0; sweep < 24; ++sweep) {
      const double la = golden_section_minimize([&](double t) { return slack_at(t, lsb); },
                                                lsa - 0.5, lsa + 0.5, 1e-10);
      const double lb = golden_section_minimize([&](double t) { return slack_at(la, t); },
                                                lsb - 0.5, lsb + 0.5, 1e-10);
      if (std::abs(la - lsa) + std::abs(lb - lsb) < 1e-12) {
        lsa = la;
        lsb = lb;
        break;
      }
      lsa = la;
      lsb = lb;
    }
    consider(best, cov,
             {squeeze2(std::exp(lsa)) * sf.orientation.block_a,
              squeeze2(std::exp(lsb)) * sf.orientation.block_b});
    // let the rotation stage polish the squeezed frame
    const SearchState polished = rotation_search(
        cov, {squeeze2(std::exp(lsa)) * sf.orientation.block_a,
              squeeze2(std::exp(lsb)) * sf.orientation.block_b});
    if (polished.slack < best.slack) best = polished;
  }

  // final kappa by golden section on log kappa in [-3, 3]
  const Eigen::Matrix4d oc = local_map(best.orientation.block_a, best.orientation.block_b) * cov *
                             local_map(best.orientation.block_a, best.orientation.block_b)
                                 .transpose();
  auto slack_of_logk = [&](double lk) {
    const double k = std::exp(lk);
    return ew_from_cov(oc, k) - separable_bound_ew(k);
  };
  const double lk = golden_section_minimize(slack_of_logk, -3.0, 3.0, 1e-8);
  double kappa = std::exp(lk);
  if (slack_of_logk(lk) > best.slack + 1e-12) kappa = best.kappa;  // keep the analytic optimum

  WitnessOptimum out;
  out.kappa = kappa;
  out.orientation = best.orientation;
  out.bound = separable_bound_ew(kappa);
  out.score = ew_from_cov(oc, kappa);
  out.violation = out.score < out.bound - 1e-12;
  return out;
}

}  // namespace mdiew
