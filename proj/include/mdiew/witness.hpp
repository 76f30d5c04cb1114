#ifndef MDIEW_WITNESS_HPP
#define MDIEW_WITNESS_HPP

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdiew/gaussian.hpp"
#include "mdiew/sampler.hpp"

namespace mdiew {

/// Local pre-rotation of the witness quadratures: one symplectic 2x2 block
/// per mode, applied to the state before the variances are read off.
struct Orientation {
  Eigen::Matrix2d block_a = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d block_b = Eigen::Matrix2d::Identity();
};

/// Witness parameters: kappa > 0 plus an optional quadrature orientation.
struct WitnessSpec {
  double kappa = 1.0;
  std::optional<Orientation> orientation;
};

struct ScoreReport {
  double score = 0.0;
  double std_error = 0.0;  // 0 for analytic evaluations
  double bound = 0.0;
  double kappa = 1.0;
  double sigma = 0.0;      // +infinity when no prior constrains the bound
  bool entangled_certified = false;  // score + 3 std_error < bound
};

/// Variance witness Var(k x_A - x_B/k) + Var(k p_A + p_B/k) evaluated on the
/// (optionally re-oriented) two-mode covariance matrix.
double duan_ew(const GaussianState& state, const WitnessSpec& spec);

/// Separable floor of the variance witness: (kappa^2 + kappa^-2)/2.
double separable_bound_ew(double kappa);

/// MDI separable bound (kappa^2 + kappa^-2)/2 * sigma^2/(1+sigma^2).
double mdi_bound(double kappa, double sigma);

/// Mean of U_kappa^2 + V_kappa^2 with a jackknife standard error; the bound
/// comes from mdi_bound (sigma = +infinity gives the kappa-only floor).
ScoreReport mdi_score_from_samples(std::span<const MdiSample> samples, const WitnessSpec& spec,
                                   double sigma);

/// Analytic MDI score of the beam-splitter + homodyne scheme:
/// 1/2 ((kappa^2 + kappa^-2)/2 + duan_ew).
double mdi_score_analytic(const GaussianState& state, const WitnessSpec& spec);

struct NoiseParams {
  double eta_a = 0.0;
  double eta_b = 0.0;
  double r = 0.0;
};

/// Closed form of the variance witness for a TMSV source with independent
/// losses on the two arms:
///   (k^2 eta_A + eta_B/k^2)/2
///   + e^{2r}/4 (k sqrt(1-eta_A) - sqrt(1-eta_B)/k)^2
///   + e^{-2r}/4 (k sqrt(1-eta_A) + sqrt(1-eta_B)/k)^2.
double noisy_tmsv_ew(const NoiseParams& params, double kappa);

/// kappa balancing the amplified term: ((1-eta_B)/(1-eta_A))^{1/4}.
/// Requires eta_A < 1 and eta_B < 1.
double optimal_kappa(double eta_a, double eta_b);

/// PPT test on the covariance matrix (necessary and sufficient for
/// two-mode Gaussian states): entangled iff the partial transpose has a
/// symplectic eigenvalue below 1/4.
bool is_entangled_ppt(const GaussianState& state, double tol = 1e-10);

/// One cell of the kappa = 1, eta_A = eta_B noise scan.
struct ContourPoint {
  double r = 0.0;
  double eta = 0.0;
  double mdiew_value = 0.0;
};

/// Point on a certification boundary: smallest squeezing at which the scan
/// value reaches the sigma-dependent separable bound.
struct BoundaryPoint {
  double sigma = 0.0;
  double eta = 0.0;
  double r_star = 0.0;
};

struct ContourTable {
  std::vector<ContourPoint> values;        // row-major over (r, eta)
  std::vector<BoundaryPoint> boundaries;   // grouped by sigma, ordered in eta
};

/// MDI witness value at kappa = 1 for symmetric losses over a grid, plus the
/// boundary curves value(r*, eta) == mdi_bound(1, sigma) per requested sigma
/// (rows are emitted only where a finite r* exists).
ContourTable contour_scan(std::span<const double> r_grid, std::span<const double> eta_grid,
                          std::span<const double> sigma_list);

struct WitnessOptimum {
  double kappa = 1.0;
  Orientation orientation;
  double score = 0.0;       // duan_ew at the optimum
  double bound = 0.0;       // separable_bound_ew(kappa)
  bool violation = false;   // score < bound - slack
};

/// Minimizes duan_ew - separable_bound_ew over kappa (golden section on
/// log kappa in [-3, 3]) and local quadrature orientations: first over
/// per-mode phase rotations (64-point grids, then local refinement), and if
/// no violation is found, after a standard-form reduction by local
/// symplectics with an additional search over local squeezers.  For every
/// NPT state the second stage finds a violating configuration.
WitnessOptimum optimize_witness(const GaussianState& state);

}  // namespace mdiew

#endif  // MDIEW_WITNESS_HPP
