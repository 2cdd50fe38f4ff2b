#include "conslaw/flux_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "conslaw/numerics.hpp"

namespace conslaw {

namespace {

constexpr double kMinWidth = 1e-12;

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(std::isfinite(lo) && std::isfinite(hi)))
        throw std::invalid_argument("interval endpoints must be finite");
    if (!(hi - lo >= kMinWidth))
        throw std::invalid_argument("interval width below 1e-12");
}

Flux::Flux(Family f, Interval domain) : family_(f), domain_(domain) {}

Flux Flux::power_law(double exponent, Interval domain) {
    if (!(exponent >= 1.0) || !std::isfinite(exponent))
        throw std::invalid_argument("power-law exponent must be >= 1");
    Flux f(Family::PowerLaw, domain);
    f.exponent_ = exponent;
    f.check_derivative_rules();
    return f;
}

Flux Flux::polynomial(std::vector<double> coeffs, Interval domain) {
    if (coeffs.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw std::invalid_argument("polynomial coefficient not finite");
    Flux f(Family::Polynomial, domain);
    f.coeffs_ = std::move(coeffs);
    f.check_derivative_rules();
    return f;
}

Flux Flux::user_rule(std::vector<std::function<double(double)>> rules, Interval domain) {
    if (rules.empty()) throw std::invalid_argument("user flux needs at least the order-0 rule");
    for (const auto& r : rules)
        if (!r) throw std::invalid_argument("user flux rule is empty");
    Flux f(Family::UserRule, domain);
    f.rules_ = std::move(rules);
    f.check_derivative_rules();
    return f;
}

int Flux::max_derivative_order() const {
    if (family_ == Family::UserRule) return static_cast<int>(rules_.size()) - 1;
    return std::numeric_limits<int>::max();
}

double Flux::eval_unchecked(double u, int k) const {
    switch (family_) {
        case Family::PowerLaw: {
            const double q = exponent_;
            if (k == 0) return std::pow(std::fabs(u), q);
            double falling = 1.0;
            for (int j = 0; j < k; ++j) falling *= q - j;
            if (u == 0.0) {
                if (q > static_cast<double>(k)) return 0.0;
                if (q == static_cast<double>(k) || falling == 0.0) return falling;
                // one-sided limit at the kink
                return falling > 0.0 ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
            }
            double v = falling * std::pow(std::fabs(u), q - static_cast<double>(k));
            if (k % 2 == 1 && u < 0.0) v = -v;
            return v;
        }
        case Family::Polynomial: {
            const int deg = static_cast<int>(coeffs_.size()) - 1;
            if (k > deg) return 0.0;
            // Horner on the k-th derivative's coefficients
            double acc = 0.0;
            for (int j = deg; j >= k; --j) {
                double c = coeffs_[static_cast<std::size_t>(j)];
                for (int m = 0; m < k; ++m) c *= static_cast<double>(j - m);
                acc = acc * u + c;
            }
            return acc;
        }
        case Family::UserRule:
            return rules_[static_cast<std::size_t>(k)](u);
    }
    return 0.0;
}

double Flux::eval(double u) const {
    if (!domain_.contains(u)) throw DomainError("flux evaluated outside its domain");
    return eval_unchecked(u, 0);
}

double Flux::derivative(double u, int k) const {
    if (k < 1) throw std::invalid_argument("derivative order must be >= 1");
    if (k > max_derivative_order())
        throw OrderUnsupported("flux has no derivative rule of order " + std::to_string(k));
    if (!domain_.contains(u)) throw DomainError("flux derivative evaluated outside its domain");
    return eval_unchecked(u, k);
}

void Flux::check_derivative_rules() const {
    const int top = std::min(3, max_derivative_order());
    const double lo = domain_.lo(), hi = domain_.hi();
    const double w = domain_.width();
    for (int k = 1; k <= top; ++k) {
        // sample an interior grid; power-law rules are one-sided at 0
        std::vector<double> pts;
        for (int i = 1; i <= 9; ++i) {
            double u = lo + w * static_cast<double>(i) / 10.0;
            if (family_ == Family::PowerLaw && std::fabs(u) < 0.05 * w) continue;
            pts.push_back(u);
        }
        double scale = 1.0;
        for (double u : pts) {
            const double v = eval_unchecked(u, k);
            if (std::isfinite(v)) scale = std::max(scale, std::fabs(v));
        }
        for (double u : pts) {
            const double h = std::min(1e-5 * std::max(1.0, std::fabs(u)), 0.04 * w);
            if (u - h < lo || u + h > hi) continue;
            const double exact = eval_unchecked(u, k);
            if (!std::isfinite(exact)) continue;
            const double fd = (eval_unchecked(u + h, k - 1) - eval_unchecked(u - h, k - 1)) / (2.0 * h);
            if (std::fabs(fd - exact) > 1e-5 * scale)
                throw std::invalid_argument("derivative rule of order " + std::to_string(k) +
                                            " disagrees with finite differences");
        }
    }
}

std::string Flux::describe() const {
    if (!label_.empty()) return label_;
    std::string s;
    switch (family_) {
        case Family::PowerLaw:
            s = "powerlaw(" + fmt_g(exponent_) + ")";
            break;
        case Family::Polynomial: {
            s = "poly(";
            for (std::size_t j = 0; j < coeffs_.size(); ++j) {
                if (j) s += ",";
                s += fmt_g(coeffs_[j]);
            }
            s += ")";
            break;
        }
        case Family::UserRule:
            s = "user(orders=" + std::to_string(rules_.size() - 1) + ")";
            break;
    }
    s += "[" + fmt_g(domain_.lo()) + "," + fmt_g(domain_.hi()) + "]";
    return s;
}

LptProbe::LptProbe(double tau_in, double xi_in, double delta_in)
    : tau(tau_in), xi(xi_in), delta(delta_in) {
    const double r = std::hypot(tau_in, xi_in);
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("probe direction must be nonzero");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("probe delta must be positive");
    tau /= r;
    xi /= r;
}

SmoothDegeneracy smooth_degeneracy(const Flux& flux, int kmax, int grid_size, double zero_tol) {
    if (kmax < 1) throw std::invalid_argument("kmax must be >= 1");
    if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
    if (flux.max_derivative_order() < 1 + kmax)
        throw OrderUnsupported("smooth degeneracy needs derivative rules to order " +
                               std::to_string(1 + kmax));
    const double lo = flux.domain().lo(), w = flux.domain().width();
    std::vector<double> grid(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i)
        grid[static_cast<std::size_t>(i)] = lo + w * static_cast<double>(i) / (grid_size - 1);

    // roots of f'' sharpen the argmax before the scan
    std::vector<double> candidates = grid;
    auto fpp = [&](double u) { return flux.derivative(u, 2); };
    for (int i = 0; i + 1 < grid_size; ++i) {
        const double a = grid[static_cast<std::size_t>(i)], b = grid[static_cast<std::size_t>(i + 1)];
        const double fa = fpp(a), fb = fpp(b);
        if (fa == 0.0 && i > 0) candidates.push_back(a);
        if (std::isfinite(fa) && std::isfinite(fb) && fa * fb < 0.0)
            candidates.push_back(bisect_root(fpp, a, b, fa, fb));
    }

    std::vector<double> threshold(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (int k = 1; k <= kmax; ++k) {
        double scale = 0.0;
        for (double u : grid) {
            const double v = flux.derivative(u, 1 + k);
            if (std::isfinite(v)) scale = std::max(scale, std::fabs(v));
        }
        threshold[static_cast<std::size_t>(k)] = zero_tol * scale;
    }

    auto order_at = [&](double u) -> int {  // 0 means none up to kmax
        for (int k = 1; k <= kmax; ++k) {
            const double v = flux.derivative(u, 1 + k);
            if (!std::isfinite(v) || std::fabs(v) > threshold[static_cast<std::size_t>(k)]) return k;
        }
        return 0;
    };

    int best = 0;
    double base = candidates.front();
    for (double u : candidates) {
        const int m = order_at(u);
        if (m == 0) return SmoothDegeneracy{std::nullopt, u};
        if (m > best) {
            best = m;
            base = u;
        }
    }
    return SmoothDegeneracy{best, base};
}

std::vector<double> derivative_sign_roots(const Flux& flux, int k, int resolution) {
    if (k < 1) throw std::invalid_argument("derivative order must be >= 1");
    if (resolution < 8) throw std::invalid_argument("resolution must be >= 8");
    if (flux.max_derivative_order() < k)
        throw OrderUnsupported("no derivative rule of order " + std::to_string(k));
    const double lo = flux.domain().lo(), w = flux.domain().width();
    std::vector<double> breaks;
    const std::size_t n = static_cast<std::size_t>(resolution);
    auto fk = [&](double u) { return flux.derivative(u, k); };
    std::vector<double> v(n + 1), s(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        v[i] = lo + w * static_cast<double>(i) / static_cast<double>(n);
        s[i] = fk(v[i]);
    }
    for (std::size_t i = 0; i + 1 <= n; ++i) {
        if (i > 0 && s[i] == 0.0 && s[i - 1] != 0.0 && s[i + 1] != 0.0) breaks.push_back(v[i]);
        if (std::isfinite(s[i]) && std::isfinite(s[i + 1]) && s[i] * s[i + 1] < 0.0)
            breaks.push_back(bisect_root(fk, v[i], v[i + 1], s[i], s[i + 1]));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
}

namespace {

// Interior breakpoints of [lo,hi] where f' can change monotonicity:
// bisected sign changes of f'' plus isolated grid zeros of f''.
std::vector<double> curvature_breaks(const Flux& flux, int resolution) {
    const double lo = flux.domain().lo(), w = flux.domain().width();
    std::vector<double> breaks;
    const std::size_t n = static_cast<std::size_t>(resolution);
    if (flux.max_derivative_order() >= 2) {
        return derivative_sign_roots(flux, 2, resolution);
    } else {
        // fall back to forward differences of f'
        auto fp = [&](double u) { return flux.derivative(u, 1); };
        double prev = fp(lo);
        double prev_d = 0.0;
        bool have_d = false;
        for (std::size_t i = 1; i <= n; ++i) {
            const double u = lo + w * static_cast<double>(i) / static_cast<double>(n);
            const double cur = fp(u);
            const double d = cur - prev;
            if (have_d && d * prev_d < 0.0) breaks.push_back(u - w / static_cast<double>(n));
            if (d != 0.0) {
                prev_d = d;
                have_d = true;
            }
            prev = cur;
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
}

double measure_with_breaks(const Flux& flux, const LptProbe& probe,
                           const std::vector<double>& breaks) {
    const double lo = flux.domain().lo(), hi = flux.domain().hi();
    const double delta = probe.delta;
    auto phi = [&](double v) { return probe.tau + probe.xi * flux.derivative(v, 1); };

    std::vector<double> pieces = {lo};
    for (double b : breaks)
        if (b > lo && b < hi) pieces.push_back(b);
    pieces.push_back(hi);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        const double a = pieces[i], b = pieces[i + 1];
        const double pa = phi(a), pb = phi(b);
        if (pa == pb) {
            if (std::fabs(phi(0.5 * (a + b))) < delta) total += b - a;
            continue;
        }
        double left, right;
        if (pb > pa) {
            if (pa >= delta || pb <= -delta) continue;
            left = (pa > -delta) ? a
                                 : bisect_root([&](double v) { return phi(v) + delta; }, a, b,
                                               pa + delta, pb + delta);
            right = (pb < delta) ? b
                                 : bisect_root([&](double v) { return phi(v) - delta; }, a, b,
                                               pa - delta, pb - delta);
        } else {
            if (pb >= delta || pa <= -delta) continue;
            left = (pa < delta) ? a
                                : bisect_root([&](double v) { return phi(v) - delta; }, a, b,
                                              pa - delta, pb - delta);
            right = (pb > -delta) ? b
                                  : bisect_root([&](double v) { return phi(v) + delta; }, a, b,
                                                pa + delta, pb + delta);
        }
        if (right > left) total += right - left;
    }
    return std::min(total, hi - lo);
}

}  // namespace

double lpt_measure(const Flux& flux, const LptProbe& probe, int resolution) {
    if (resolution < 1000) throw std::invalid_argument("lpt_measure resolution must be >= 1000");
    return measure_with_breaks(flux, probe, curvature_breaks(flux, resolution));
}

AlphaFit lpt_alpha(const Flux& flux, const std::vector<double>& deltas, int directions,
                   int resolution) {
    if (deltas.size() < 4) throw std::invalid_argument("need at least 4 deltas");
    double dmin = deltas.front(), dmax = deltas.front();
    for (double d : deltas) {
        if (!(d > 0.0)) throw std::invalid_argument("deltas must be positive");
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (dmax / dmin < 100.0) throw std::invalid_argument("deltas must span at least two decades");
    if (directions < 4) throw std::invalid_argument("need at least 4 directions");

    const auto breaks = curvature_breaks(flux, resolution);
    std::vector<std::pair<double, double>> dirs;
    for (int j = 0; j < directions; ++j) {
        const double ang = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(directions);
        dirs.emplace_back(std::cos(ang), std::sin(ang));
    }
    dirs.emplace_back(1.0, 0.0);
    dirs.emplace_back(0.0, 1.0);

    const double width = flux.domain().width();
    std::vector<double> usable_delta, usable_measure;
    std::size_t informative = 0;
    for (double d : deltas) {
        double worst = 0.0;
        for (const auto& [tau, xi] : dirs)
            worst = std::max(worst, measure_with_breaks(flux, LptProbe(tau, xi, d), breaks));
        if (worst > 0.0 && worst < width * (1.0 - 1e-9)) {
            usable_delta.push_back(d);
            usable_measure.push_back(worst);
            ++informative;
        }
    }
    if (informative < 2)
        throw FitDegenerate("worst-direction measures are all zero or saturated");
    LinearFit fit;
    loglog_fit(usable_delta, usable_measure, fit);
    return AlphaFit{fit.slope, std::exp(fit.intercept)};
}

double holder_degeneracy(const Flux& flux, int grid_size, double p_tol) {
    if (grid_size < 100) throw std::invalid_argument("holder grid_size must be >= 100");
    if (!(p_tol > 0.0)) throw std::invalid_argument("p_tol must be positive");
    const double lo = flux.domain().lo(), hi = flux.domain().hi(), w = flux.domain().width();
    auto a = [&](double u) { return flux.derivative(u, 1); };

    std::vector<double> pts(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i)
        pts[static_cast<std::size_t>(i)] = lo + w * static_cast<double>(i) / (grid_size - 1);

    // Geometric clusters toward curvature roots: the pairwise quotient needs
    // pairs at many scales around a degeneracy point to resolve the exponent.
    // Descent stops when either the abscissa or the a-value stops changing.
    for (double r : curvature_breaks(flux, std::max(1000, grid_size))) {
        const double ar = a(r);
        pts.push_back(r);
        for (int side = 0; side < 2; ++side) {
            const double sgn = side == 0 ? 1.0 : -1.0;
            for (int j = 1; j <= 400; ++j) {
                const double u = r + sgn * w * std::pow(10.0, -j);
                if (u <= lo || u >= hi || u == r) break;
                const double au = a(u);
                if (!std::isfinite(au) || au == ar) break;
                pts.push_back(u);
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<double> av(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        av[i] = a(pts[i]);
        if (!std::isfinite(av[i]))
            throw DomainError("flux derivative not finite on the evaluation grid");
    }

    // log-space pair table: quotient exponent comparisons become mul-adds
    std::vector<double> log_du, log_da;
    log_du.reserve(pts.size() * pts.size() / 2);
    log_da.reserve(pts.size() * pts.size() / 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double da = std::fabs(av[j] - av[i]);
            if (da == 0.0) return std::numeric_limits<double>::infinity();
            log_du.push_back(std::log(pts[j] - pts[i]));
            log_da.push_back(std::log(da));
        }
    }

    const double log_thr = std::log(1e-8);
    auto above = [&](double p) {
        double qmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < log_du.size(); ++i)
            qmin = std::min(qmin, log_da[i] - p * log_du[i]);
        return qmin > log_thr;
    };

    const double p_max = 16.0;
    if (above(1.0)) return 1.0;
    if (!above(p_max)) return std::numeric_limits<double>::infinity();
    double lo_p = 1.0, hi_p = p_max;
    while (hi_p - lo_p > p_tol) {
        const double mid = 0.5 * (lo_p + hi_p);
        if (above(mid))
            hi_p = mid;
        else
            lo_p = mid;
    }
    return hi_p;
}

DegeneracyReport degeneracy_report(const Flux& flux) {
    const int kmax = std::max(1, std::min(8, flux.max_derivative_order() - 1));
    const auto sd = smooth_degeneracy(flux, kmax);
    // Ladder sits below the angular-grid transition: at larger delta the
    // worst direction drifts off the sampled axes and inflates the slope.
    const std::vector<double> deltas = {1e-2, std::pow(10.0, -2.5), 1e-3,
                                        std::pow(10.0, -3.5), 1e-4};
    const auto af = lpt_alpha(flux, deltas);
    const double p = holder_degeneracy(flux);

    DegeneracyReport rep;
    rep.d = sd.d;
    rep.base_state = sd.base_state;
    rep.alpha_fit = af.alpha;
    rep.alpha_intercept = af.c;
    rep.p_holder = p;
    rep.alpha_d_consistent =
        sd.d.has_value() && std::fabs(af.alpha * static_cast<double>(*sd.d) - 1.0) <= 0.1;
    return rep;
}

}  // namespace conslaw
