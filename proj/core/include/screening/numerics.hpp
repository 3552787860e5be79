#pragma once

#include <cmath>
#include <functional>
#include <utility>

namespace screening::numerics {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

/// Bisection for a sign change of `f` on [lo, hi].
///
/// Stops when |f(mid)| <= f_tol or the bracket is narrower than x_tol. The
/// caller guarantees f(lo) and f(hi) have opposite signs (or one is zero).
RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                  double x_tol, double f_tol = 0.0, int max_iter = 400);

/// Bisection on a predicate that is false on the left and true on the right.
/// Returns the bracket [last false, first true] once narrower than x_tol.
std::pair<double, double> bisect_predicate(const std::function<bool(double)>& is_right,
                                           double lo, double hi, double x_tol,
                                           int max_iter = 400);

struct MaxResult {
    double x = 0.0;
    double fx = 0.0;
};

/// Golden-section search for the maximizer of a unimodal function on [lo, hi].
MaxResult golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                             double x_tol);

}  // namespace screening::numerics
