#include "mdiew/prior.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mdiew/numeric.hpp"

namespace mdiew {

namespace {

constexpr int kInvCdfKnots = 1 << 14;

double smooth_box_density(double x, double l, double delta) {
  const double lo = -l / 2.0 - delta / 2.0;
  const double hi = l / 2.0 + delta / 2.0;
  if (x <= lo || x >= hi) return 0.0;
  if (x <= -l / 2.0 + delta / 2.0) {
    return (0.5 + 0.5 * std::sin(std::numbers::pi / delta * (x + l / 2.0))) / l;
  }
  if (x >= l / 2.0 - delta / 2.0) {
    return (0.5 - 0.5 * std::sin(std::numbers::pi / delta * (x - l / 2.0))) / l;
  }
  return 1.0 / l;
}

// CDF of the smooth box in closed form (density is piecewise sine/constant).
double smooth_box_cdf(double x, double l, double delta) {
  const double pi = std::numbers::pi;
  const double lo = -l / 2.0 - delta / 2.0;
  const double hi = l / 2.0 + delta / 2.0;
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  auto ramp_up = [&](double t) {
    // integral of (1/2 + 1/2 sin(pi/delta (u + l/2)))/l du from lo to t
    return (0.5 * (t - lo) - delta / (2.0 * pi) * (std::cos(pi / delta * (t + l / 2.0)) -
                                                   std::cos(pi / delta * (lo + l / 2.0)))) / l;
  };
  if (x <= -l / 2.0 + delta / 2.0) return ramp_up(x);
  double acc = ramp_up(-l / 2.0 + delta / 2.0);
  if (x <= l / 2.0 - delta / 2.0) return acc + (x - (-l / 2.0 + delta / 2.0)) / l;
  acc += (l - delta) / l;
  const double a = l / 2.0 - delta / 2.0;
  // integral of (1/2 - 1/2 sin(pi/delta (u - l/2)))/l from a to x
  return acc + (0.5 * (x - a) + delta / (2.0 * pi) * (std::cos(pi / delta * (x - l / 2.0)) -
                                                      std::cos(pi / delta * (a - l / 2.0)))) / l;
}

std::shared_ptr<const std::vector<double>> build_inv_cdf(double l, double delta) {
  auto table = std::make_shared<std::vector<double>>(kInvCdfKnots + 1);
  const double lo = -l / 2.0 - delta / 2.0;
  const double hi = l / 2.0 + delta / 2.0;
  double x = lo;
  for (int k = 0; k <= kInvCdfKnots; ++k) {
    const double u = static_cast<double>(k) / kInvCdfKnots;
    // monotone bisection refined by a few Newton steps
    if (k == 0) {
      (*table)[0] = lo;
      continue;
    }
    if (k == kInvCdfKnots) {
      (*table)[kInvCdfKnots] = hi;
      continue;
    }
    double a = x, b = hi;
    for (int it = 0; it < 60 && b - a > 1e-15 * (hi - lo); ++it) {
      const double m = (a + b) / 2.0;
      (smooth_box_cdf(m, l, delta) < u ? a : b) = m;
    }
    x = (a + b) / 2.0;
    (*table)[static_cast<size_t>(k)] = x;
  }
  return table;
}

}  // namespace

PriorSpec PriorSpec::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("PriorSpec::gaussian: sigma must be positive and finite");
  }
  PriorSpec p;
  p.kind_ = Kind::gaussian;
  p.sigma_ = sigma;
  return p;
}

PriorSpec PriorSpec::smooth_box(double l, double delta) {
  if (!(l > 0.0) || !(delta > 0.0) || delta > l || !std::isfinite(l) || !std::isfinite(delta)) {
    throw std::invalid_argument("PriorSpec::smooth_box: need 0 < delta <= l");
  }
  PriorSpec p;
  p.kind_ = Kind::smooth_box;
  p.l_ = l;
  p.delta_ = delta;
  // normalization sanity check on the closed-form pieces
  const double lo = -l / 2.0 - delta / 2.0;
  double mass = adaptive_simpson([&](double x) { return smooth_box_density(x, l, delta); },
                                 lo, -l / 2.0 + delta / 2.0, 1e-10);
  mass += adaptive_simpson([&](double x) { return smooth_box_density(x, l, delta); },
                           -l / 2.0 + delta / 2.0, l / 2.0 - delta / 2.0, 1e-10);
  mass += adaptive_simpson([&](double x) { return smooth_box_density(x, l, delta); },
                           l / 2.0 - delta / 2.0, l / 2.0 + delta / 2.0, 1e-10);
  if (std::abs(mass - 1.0) > 1e-6) {
    throw std::invalid_argument("PriorSpec::smooth_box: density does not normalize");
  }
  p.inv_cdf_ = build_inv_cdf(l, delta);
  return p;
}

PriorSpec PriorSpec::point(double alpha_x, double alpha_p) {
  if (!std::isfinite(alpha_x) || !std::isfinite(alpha_p)) {
    throw std::invalid_argument("PriorSpec::point: amplitude must be finite");
  }
  PriorSpec p;
  p.kind_ = Kind::point;
  p.point_x_ = alpha_x;
  p.point_p_ = alpha_p;
  return p;
}

double PriorSpec::sample_component(RngStream& rng) const {
  switch (kind_) {
    case Kind::gaussian:
      return sigma_ / std::sqrt(2.0) * rng.normal();
    case Kind::smooth_box: {
      const double u = rng.uniform01() * kInvCdfKnots;
      const int k = std::min(static_cast<int>(u), kInvCdfKnots - 1);
      const double frac = u - k;
      const auto& t = *inv_cdf_;
      return t[static_cast<size_t>(k)] +
             frac * (t[static_cast<size_t>(k) + 1] - t[static_cast<size_t>(k)]);
    }
    case Kind::point:
      return 0.0;  // handled in draw()
  }
  return 0.0;
}

std::pair<double, double> PriorSpec::draw(RngStream& rng) const {
  if (kind_ == Kind::point) return {point_x_, point_p_};
  const double ax = sample_component(rng);
  const double ap = sample_component(rng);
  return {ax, ap};
}

double PriorSpec::component_density(double x) const {
  switch (kind_) {
    case Kind::gaussian:
      return std::exp(-x * x / (sigma_ * sigma_)) / (sigma_ * std::sqrt(std::numbers::pi));
    case Kind::smooth_box:
      return smooth_box_density(x, l_, delta_);
    case Kind::point:
      return 0.0;
  }
  return 0.0;
}

double PriorSpec::component_variance() const {
  switch (kind_) {
    case Kind::gaussian:
      return sigma_ * sigma_ / 2.0;
    case Kind::smooth_box: {
      const double lo = -l_ / 2.0 - delta_ / 2.0;
      const double hi = l_ / 2.0 + delta_ / 2.0;
      auto f = [&](double x) { return x * x * smooth_box_density(x, l_, delta_); };
      return adaptive_simpson(f, lo, -l_ / 2.0 + delta_ / 2.0, 1e-12) +
             adaptive_simpson(f, -l_ / 2.0 + delta_ / 2.0, l_ / 2.0 - delta_ / 2.0, 1e-12) +
             adaptive_simpson(f, l_ / 2.0 - delta_ / 2.0, hi, 1e-12);
    }
    case Kind::point:
      return 0.0;
  }
  return 0.0;
}

FisherMatrix fim_gaussian(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("fim_gaussian: sigma must be positive");
  return FisherMatrix{{2.0 / (sigma * sigma), 0.0}, {0.0, 2.0 / (sigma * sigma)}};
}

FisherMatrix fim_smooth_box(double l, double delta) {
  if (!(l > 0.0) || !(delta > 0.0) || delta > l) {
    throw std::invalid_argument("fim_smooth_box: need 0 < delta <= l");
  }
  const double f = std::numbers::pi * std::numbers::pi / (l * delta);
  return FisherMatrix{{f, 0.0}, {0.0, f}};
}

FisherMatrix fim_gaussian_quadrature(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("fim_gaussian_quadrature: sigma must be positive");
  // F = int p(x) (d log p / dx)^2, with d log p/dx = -2x/sigma^2
  auto integrand = [sigma](double x) {
    const double p = std::exp(-x * x / (sigma * sigma)) / (sigma * std::sqrt(std::numbers::pi));
    const double score = -2.0 * x / (sigma * sigma);
    return p * score * score;
  };
  const double f = adaptive_simpson(integrand, -10.0 * sigma, 10.0 * sigma, 1e-12);
  return FisherMatrix{{f, 0.0}, {0.0, f}};
}

FisherMatrix fim_smooth_box_quadrature(double l, double delta) {
  if (!(l > 0.0) || !(delta > 0.0) || delta > l) {
    throw std::invalid_argument("fim_smooth_box_quadrature: need 0 < delta <= l");
  }
  const double pi = std::numbers::pi;
  // the score vanishes on the plateau; integrate (p')^2/p over the two ramps
  auto ramp = [&](double a, double b, double center_sign) {
    return adaptive_simpson(
        [&](double x) {
          const double p = smooth_box_density(x, l, delta);
          if (p <= 0.0) return 0.0;
          const double dp =
              center_sign * pi / (2.0 * delta) *
              std::cos(pi / delta * (x + center_sign * l / 2.0)) / l;
          return dp * dp / p;
        },
        a, b, 1e-12);
  };
  const double f = ramp(-l / 2.0 - delta / 2.0, -l / 2.0 + delta / 2.0, +1.0) +
                   ramp(l / 2.0 - delta / 2.0, l / 2.0 + delta / 2.0, -1.0);
  return FisherMatrix{{f, 0.0}, {0.0, f}};
}

double bayesian_crb_sum(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("bayesian_crb_sum: sigma must be positive");
  return sigma * sigma / (1.0 + sigma * sigma);
}

SeparableBound separable_mdi_bound(double kappa, const PriorSpec& prior) {
  if (!(kappa > 0.0)) throw std::invalid_argument("separable_mdi_bound: kappa must be positive");
  const double prefactor = (kappa * kappa + 1.0 / (kappa * kappa)) / 2.0;
  switch (prior.kind()) {
    case PriorSpec::Kind::gaussian:
      return {prefactor * bayesian_crb_sum(prior.sigma()), false};
    case PriorSpec::Kind::smooth_box: {
      if (prior.box_delta() == prior.box_l()) {
        // equivalent Gaussian width: l/pi = sigma/sqrt(2)
        const double sigma_eff = std::sqrt(2.0) * prior.box_l() / std::numbers::pi;
        return {prefactor * bayesian_crb_sum(sigma_eff), false};
      }
      // multi-parameter Cramer-Rao with the prior FIM: sum_i 1/(2 + A_ii)
      const FisherMatrix a = fim_smooth_box(prior.box_l(), prior.box_delta());
      const double crb = 1.0 / (2.0 + a(0, 0)) + 1.0 / (2.0 + a(1, 1));
      return {prefactor * crb, true};
    }
    case PriorSpec::Kind::point:
      throw std::invalid_argument("separable_mdi_bound: point prior has no separable bound");
  }
  throw std::invalid_argument("separable_mdi_bound: unsupported prior");
}

}  // namespace mdiew
