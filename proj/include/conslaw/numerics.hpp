#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace conslaw {

// |x|^p with an exact repeated-multiplication path for small integer p.
// The integer path commutes with power-of-two rescaling of x, which the
// variation homogeneity identity relies on.
inline double pow_abs(double x, double p) {
    const double ax = std::fabs(x);
    if (p == 1.0) return ax;
    const double rp = std::nearbyint(p);
    if (rp == p && rp >= 0.0 && rp <= 64.0) {
        double acc = 1.0;
        double base = ax;
        auto n = static_cast<std::uint64_t>(rp);
        while (n > 0) {
            if (n & 1u) acc *= base;
            n >>= 1u;
            if (n) base *= base;
        }
        return acc;
    }
    return std::pow(ax, p);
}

inline int sign(double x) { return (x > 0.0) - (x < 0.0); }

// Compensated accumulator; summation order is fixed by the caller.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares y = slope*x + intercept with R^2.
// Degenerate spreads: R^2 is 1 when residuals vanish with the data, else 0.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit out;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return out;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) {
        out.r2 = (syy <= 0.0) ? 1.0 : 0.0;
        out.intercept = my;
        return out;
    }
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (out.slope * x[i] + out.intercept);
        ssr += r * r;
    }
    if (syy <= 0.0) {
        out.r2 = (ssr <= 0.0) ? 1.0 : 0.0;
    } else {
        out.r2 = 1.0 - ssr / syy;
    }
    return out;
}

// Least squares in log-log space over the strictly positive pairs.
// Returns the number of usable points; fit is meaningful only when >= 2.
inline std::size_t loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
                              LinearFit& fit) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    fit = linear_fit(lx, ly);
    return lx.size();
}

// Bisection for a sign change of f bracketed by [a, b].
// Returns the midpoint of the final bracket; exact roots are returned as hit.
inline double bisect_root(const std::function<double(double)>& f, double a, double b,
                          double fa, double fb, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    for (int i = 0; i < max_iter; ++i) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;  // bracket at machine resolution
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace conslaw
