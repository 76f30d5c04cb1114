#ifndef MDIEW_NUMERIC_HPP
#define MDIEW_NUMERIC_HPP

#include <functional>

namespace mdiew {

/// Adaptive Simpson quadrature on [a, b] with absolute tolerance.  The
/// integrand must be continuous on the interval; callers are expected to
/// split at known kinks before integrating.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, int max_depth = 40);

/// Golden-section minimization of a unimodal function on [a, b]; returns the
/// abscissa of the minimum to within `tol`.
double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-8);

}  // namespace mdiew

#endif  // MDIEW_NUMERIC_HPP
