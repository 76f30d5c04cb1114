#ifndef MDIEW_PRIOR_HPP
#define MDIEW_PRIOR_HPP

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "mdiew/rng.hpp"

namespace mdiew {

/// Prior distribution for the drawn coherent amplitudes alpha = a_x + i a_p.
///
/// * gaussian(sigma):  P(alpha) = exp(-|alpha|^2/sigma^2) / (pi sigma^2),
///   i.e. each quadrature component is N(0, sigma^2/2).
/// * smooth_box(l, delta): each component has density I_{delta,l}(x)/l where
///   I_{delta,l} is the sine-smoothed indicator of [-l/2, l/2] with ramp
///   width delta (0 < delta <= l).
/// * point(a_x, a_p): degenerate prior pinning the amplitude (test hook).
class PriorSpec {
 public:
  enum class Kind { gaussian, smooth_box, point };

  static PriorSpec gaussian(double sigma);
  static PriorSpec smooth_box(double l, double delta);
  static PriorSpec point(double alpha_x, double alpha_p);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double box_l() const { return l_; }
  double box_delta() const { return delta_; }

  /// Draw one amplitude (alpha_x, alpha_p).
  std::pair<double, double> draw(RngStream& rng) const;

  /// Per-component density (components are iid for every kind).
  double component_density(double x) const;

  /// Per-component variance: sigma^2/2 for the Gaussian prior, evaluated by
  /// quadrature for the smooth box.
  double component_variance() const;

 private:
  PriorSpec() = default;
  double sample_component(RngStream& rng) const;

  Kind kind_ = Kind::gaussian;
  double sigma_ = 1.0;
  double l_ = 0.0, delta_ = 0.0;
  double point_x_ = 0.0, point_p_ = 0.0;
  // inverse-CDF table for the smooth box (2^14 knots, linear interpolation)
  std::shared_ptr<const std::vector<double>> inv_cdf_;
};

/// Fisher information matrix of a prior over (alpha_x, alpha_p): 2x2,
/// symmetric, PSD.
using FisherMatrix = Eigen::Matrix2d;

/// FIM of the Gaussian prior: diag(2/sigma^2, 2/sigma^2).
FisherMatrix fim_gaussian(double sigma);

/// FIM of the smooth-box prior: diag(pi^2/(l*delta), pi^2/(l*delta)).
FisherMatrix fim_smooth_box(double l, double delta);

/// Same quantities evaluated by adaptive quadrature of the defining
/// integral (cross-check route; the closed forms above are the fast path).
FisherMatrix fim_gaussian_quadrature(double sigma);
FisherMatrix fim_smooth_box_quadrature(double l, double delta);

/// Bayesian Cramer-Rao floor for the sum of the two estimation variances
/// with a Gaussian prior of width sigma: sigma^2 / (1 + sigma^2).
double bayesian_crb_sum(double sigma);

/// Result of the separable MDI bound evaluation.  `possibly_loose` is set
/// when the multi-parameter bound is not known to be achievable (smooth box
/// with delta < l).
struct SeparableBound {
  double value = 0.0;
  bool possibly_loose = false;
};

/// Separable bound (kappa^2 + kappa^-2)/2 * crb_sum for the given prior.
/// For the smooth box with delta == l this reduces to the Gaussian case with
/// sigma = sqrt(2) l / pi; for delta < l the prior FIM enters the
/// multi-parameter Cramer-Rao form sum_i 1/(2 + A_ii) and the bound is
/// flagged as possibly loose.
SeparableBound separable_mdi_bound(double kappa, const PriorSpec& prior);

}  // namespace mdiew

#endif  // MDIEW_PRIOR_HPP
