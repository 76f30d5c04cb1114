#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mdiew/numeric.hpp"
#include "mdiew/prior.hpp"

using namespace mdiew;

TEST_CASE("gaussian prior draws") {
  const PriorSpec prior = PriorSpec::gaussian(1.0);
  RngStream rng(42, 0);
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [ax, ap] = prior.draw(rng);
    sum += ax;
    sum2 += ax * ax;
    (void)ap;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.003);
  CHECK(var == doctest::Approx(0.5).epsilon(0.006));  // sigma^2/2
}

TEST_CASE("smooth box normalization and moments") {
  // density integrates to 1 across the (delta, l) grid including endpoints
  for (double l : {1.0, 2.0, std::numbers::pi}) {
    for (double frac : {1.0, 0.5}) {
      const PriorSpec p = PriorSpec::smooth_box(l, frac * l);
      const double lo = -l / 2 - frac * l / 2, hi = l / 2 + frac * l / 2;
      double mass = adaptive_simpson([&](double x) { return p.component_density(x); },
                                     lo, 0.0, 1e-12) +
                    adaptive_simpson([&](double x) { return p.component_density(x); },
                                     0.0, hi, 1e-12);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
  }

  // delta = l: raised-cosine component, variance l^2 (1/3 - 2/pi^2)
  // (frozen from the quadrature oracle in component_variance)
  const double l = 1.7;
  const PriorSpec p = PriorSpec::smooth_box(l, l);
  const double expected = l * l * (1.0 / 3.0 - 2.0 / (std::numbers::pi * std::numbers::pi));
  CHECK(p.component_variance() == doctest::Approx(expected).epsilon(1e-9));

  RngStream rng(7, 1);
  const int n = 400000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [ax, ap] = p.draw(rng);
    sum += ax + ap;
    sum2 += ax * ax;
  }
  CHECK(std::abs(sum / (2 * n)) < 0.005);
  CHECK(sum2 / n == doctest::Approx(expected).epsilon(0.02));

  CHECK_THROWS_AS(PriorSpec::smooth_box(1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(PriorSpec::smooth_box(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(PriorSpec::gaussian(0.0), std::invalid_argument);
}

TEST_CASE("fisher information closed forms") {
  CHECK(fim_gaussian(1.0)(0, 0) == doctest::Approx(2.0));
  CHECK(fim_gaussian(1.0)(1, 1) == doctest::Approx(2.0));
  CHECK(fim_gaussian(1.0)(0, 1) == 0.0);
  CHECK(fim_gaussian(std::sqrt(2.0))(0, 0) == doctest::Approx(1.0));

  CHECK(fim_smooth_box(std::numbers::pi, std::numbers::pi)(0, 0) == doctest::Approx(1.0));
  CHECK(fim_smooth_box(std::numbers::pi, std::numbers::pi)(1, 1) == doctest::Approx(1.0));

  // diverges as delta -> 0
  CHECK(fim_smooth_box(2.0, 1e-6)(0, 0) > 1e6);

  // quadrature cross-checks
  for (double sigma : {0.5, 1.0, 2.0, 3.0}) {
    CHECK(fim_gaussian_quadrature(sigma)(0, 0) ==
          doctest::Approx(fim_gaussian(sigma)(0, 0)).epsilon(1e-8));
  }
  for (auto [l, delta] : {std::pair{2.0, 1.0}, {3.0, 0.5}, {std::numbers::pi, std::numbers::pi},
                          {1.0, 1.0}}) {
    CHECK(fim_smooth_box_quadrature(l, delta)(0, 0) ==
          doctest::Approx(fim_smooth_box(l, delta)(0, 0)).epsilon(1e-6));
  }

  // smooth box with delta = l matches the Gaussian prior at l/pi = sigma/sqrt2
  for (double l : {1.0, 2.0, std::numbers::pi, 5.0}) {
    const double sigma = std::sqrt(2.0) * l / std::numbers::pi;
    CHECK(fim_smooth_box(l, l)(0, 0) == doctest::Approx(fim_gaussian(sigma)(0, 0)).epsilon(1e-12));
  }
}

TEST_CASE("bayesian bounds") {
  CHECK(bayesian_crb_sum(1.0) == doctest::Approx(0.5));
  CHECK(bayesian_crb_sum(1e9) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(bayesian_crb_sum(-1.0), std::invalid_argument);

  // strictly increasing in sigma
  double prev = 0.0;
  for (double s = 0.25; s < 6.0; s += 0.25) {
    const double v = bayesian_crb_sum(s);
    CHECK(v > prev);
    prev = v;
  }

  CHECK(separable_mdi_bound(1.0, PriorSpec::gaussian(2.0)).value == doctest::Approx(0.8));
  CHECK(separable_mdi_bound(2.0, PriorSpec::gaussian(1.0)).value ==
        doctest::Approx(17.0 / 16.0));

  // smooth box at delta = l = pi equals the Gaussian sigma = sqrt2 case
  const SeparableBound box = separable_mdi_bound(1.0, PriorSpec::smooth_box(std::numbers::pi,
                                                                            std::numbers::pi));
  CHECK(box.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(box.possibly_loose);

  // delta < l uses the multi-parameter form and is flagged
  const SeparableBound loose = separable_mdi_bound(1.0, PriorSpec::smooth_box(2.0, 1.0));
  CHECK(loose.possibly_loose);
  CHECK(loose.value > 0.0);
  CHECK(loose.value < 1.0);

  // bound collapses to the trivial one as delta -> 0
  const SeparableBound tiny = separable_mdi_bound(1.0, PriorSpec::smooth_box(2.0, 1e-5));
  CHECK(tiny.value < 1e-3);
}
