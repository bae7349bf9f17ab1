#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "prymsieve/error.hpp"

namespace prymsieve {

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval for a binomial proportion. Default z is the 95%
/// two-sided normal quantile.
inline Interval wilson_interval(std::size_t successes, std::size_t n,
                                double z = 1.959963984540054) {
    if (n == 0) throw config_error("wilson_interval: n must be positive");
    if (successes > n) throw config_error("wilson_interval: successes > n");
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = phat + z2 / (2.0 * nn);
    const double spread = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
    Interval r;
    r.low = successes == 0 ? 0.0 : std::max(0.0, (center - spread) / denom);
    r.high = successes == n ? 1.0 : std::min(1.0, (center + spread) / denom);
    return r;
}

namespace detail {

/// Regularized lower incomplete gamma P(a,x) by series expansion (x < a+1).
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a,x) by continued fraction
/// (modified Lentz), valid for x >= a+1.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Q(a,x) = 1 - P(a,x), the normalized upper incomplete gamma function.
inline double regularized_gamma_q(double a, double x) {
    if (a <= 0.0) throw config_error("regularized_gamma_q: a must be positive");
    if (x < 0.0) throw config_error("regularized_gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

/// Survival function of the chi-square distribution with dof degrees of
/// freedom: Prob(X > x).
inline double chi_square_sf(double x, unsigned dof) {
    if (dof == 0) throw config_error("chi_square_sf: dof must be positive");
    if (x <= 0.0) return 1.0;
    return regularized_gamma_q(static_cast<double>(dof) / 2.0, x / 2.0);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope*x.
inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw config_error("least_squares: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw config_error("least_squares: need at least 2 points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw config_error("least_squares: x values are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

/// q-th percentile (q in [0,1]) with linear interpolation between order
/// statistics; the input is copied and sorted.
inline double percentile(std::vector<double> v, double q) {
    if (v.empty()) throw config_error("percentile of empty sample");
    if (q < 0.0 || q > 1.0) throw config_error("percentile: q must be in [0,1]");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

}  // namespace prymsieve
