#include "screening/numerics.hpp"

#include <cmath>

namespace screening::numerics {

RootResult bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
                  double f_tol, int max_iter) {
    double f_lo = f(lo);
    if (f_lo == 0.0) return {lo, 0.0, 0};
    double f_hi = f(hi);
    if (f_hi == 0.0) return {hi, 0.0, 0};

    RootResult best{lo, f_lo, 0};
    if (std::abs(f_hi) < std::abs(f_lo)) best = {hi, f_hi, 0};

    for (int it = 1; it <= max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        best = {mid, f_mid, it};
        if (f_mid == 0.0 || std::abs(f_mid) <= f_tol || (hi - lo) <= x_tol) break;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if (mid == lo && mid == hi) break;
    }
    return best;
}

std::pair<double, double> bisect_predicate(const std::function<bool(double)>& is_right, double lo,
                                           double hi, double x_tol, int max_iter) {
    for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (is_right(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {lo, hi};
}

MaxResult golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                             double x_tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double lo0 = lo;
    const double hi0 = hi;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 500 && (hi - lo) > x_tol; ++it) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    const double x = 0.5 * (lo + hi);
    MaxResult best{x, f(x)};
    // The interior probes never evaluate the original endpoints.
    for (double edge : {lo0, hi0}) {
        const double fe = f(edge);
        if (fe > best.fx) best = {edge, fe};
    }
    return best;
}

}  // namespace screening::numerics
