#include "conslaw/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "conslaw/numerics.hpp"

namespace conslaw {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

double reduce_period(double x) { return x - std::floor(x); }

std::vector<double> uniform_points(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + static_cast<double>(i) * h;
    g.back() = hi;
    return g;
}

}  // namespace

OscillatorParams OscillatorParams::from_exponents(double s, double eta) {
    if (!(s > 0.0) || !(s < 1.0))
        throw std::invalid_argument("oscillator exponent s must lie in (0,1)");
    if (!(eta > 0.0) || !(eta < 1.0 - s))
        throw std::invalid_argument("oscillator exponent eta must lie in (0, 1-s)");
    OscillatorParams p;
    p.s = s;
    p.eta = eta;
    p.b = s + s * s / eta;
    p.c = s / eta;
    return p;
}

double oscillator(const OscillatorParams& params, double x) {
    if (!(x >= 0.0) || !(x <= 1.0))
        throw DomainError("oscillator argument outside [0,1]");
    if (x == 0.0) return 0.0;
    const double denom = std::pow(x, params.c);
    if (denom == 0.0) return 0.0;
    const double phase = std::numbers::pi / denom;
    if (!std::isfinite(phase)) return 0.0;  // amplitude x^b is below resolution here
    return std::pow(x, params.b) * std::cos(phase);
}

std::vector<double> oscillator_extrema(const OscillatorParams& params, int n) {
    if (n < 1) throw std::invalid_argument("need at least one alternation point");
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k)
        xs[static_cast<std::size_t>(k - 1)] = std::pow(static_cast<double>(k), -1.0 / params.c);
    return xs;
}

double oscillator_extremum_value(const OscillatorParams& params, int k) {
    if (k < 1) throw std::invalid_argument("alternation index must be >= 1");
    const double xk = std::pow(static_cast<double>(k), -1.0 / params.c);
    const double amp = std::pow(xk, params.b);
    return (k % 2 == 0) ? amp : -amp;
}

double oscillator_amplitude(const OscillatorParams& params, int k) {
    return std::fabs(oscillator_extremum_value(params, k + 1) -
                     oscillator_extremum_value(params, k));
}

double cheng_initial_data(const ChengData& data, double x) {
    if (x < 0.0) return data.base_state;
    if (x > 1.0) return data.base_state - data.delta;
    return data.base_state + data.delta * oscillator(data.params, x);
}

std::vector<double> cheng_certification_grid(const OscillatorParams& params, std::size_t n) {
    if (n < 100) throw std::invalid_argument("certification grid needs at least 100 points");
    const std::size_t n_uniform = n / 2;
    const std::size_t n_alt = n / 5;
    std::vector<double> grid = uniform_points(0.0, 1.0, n_uniform);

    // alternation points and their midpoints, down to x_{n_alt}
    double prev = 1.0;
    for (std::size_t k = 2; k <= n_alt; ++k) {
        const double xk = std::pow(static_cast<double>(k), -1.0 / params.c);
        grid.push_back(xk);
        grid.push_back(0.5 * (xk + prev));
        prev = xk;
    }

    // logarithmic tail below the last alternation point
    const std::size_t n_log = n - n_uniform - 2 * (n_alt - 1);
    const double top = prev;
    const double bottom = std::min(1e-8, top);
    const double llo = std::log(bottom), lhi = std::log(top);
    for (std::size_t j = 0; j < n_log; ++j)
        grid.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(j) /
                                          static_cast<double>(n_log)));

    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

ChengData select_delta(const Flux& flux, double base_state, const OscillatorParams& params,
                       double T, double margin) {
    if (!(T >= 0.0)) throw std::invalid_argument("certification horizon must be >= 0");
    if (!(margin > 0.0)) throw std::invalid_argument("monotonicity margin must be positive");
    if (!flux.domain().contains(base_state))
        throw DomainError("base state outside the flux domain");

    const auto grid = cheng_certification_grid(params);
    std::vector<double> gvals(grid.size());
    double gmax = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        gvals[i] = oscillator(params, grid[i]);
        gmax = std::max(gmax, gvals[i]);
    }
    // the data spans [base - delta, base + delta*gmax] (the minimum -delta is
    // attained both at x = 1 and on the right tail)
    const double lo = flux.domain().lo(), hi = flux.domain().hi();
    const double gpos = std::max(gmax, 1e-3);
    const double cap_centered = std::min(base_state - lo, (hi - base_state) / gpos);
    const double delta0 =
        cap_centered > 0.0 ? cap_centered : flux.domain().width() / (1.0 + gpos);

    const int n_times = (T > 0.0) ? 32 : 1;
    for (double delta = delta0;; delta *= 0.5) {
        if (!(delta >= 1e-14))
            throw NoAdmissibleDelta("no delta above 1e-14 certifies a monotone flow");
        // shift the base inward when a boundary base state leaves no room
        const double base_eff =
            std::min(std::max(base_state, lo + delta), hi - delta * gpos);

        bool ok = true;
        double worst = std::numeric_limits<double>::infinity();
        std::vector<double> speeds(grid.size());
        for (std::size_t i = 0; i < grid.size() && ok; ++i) {
            const double u = base_eff + delta * gvals[i];
            if (!flux.domain().contains(u)) ok = false;
            else speeds[i] = flux.derivative(u, 1);
        }
        for (int j = 0; j < n_times && ok; ++j) {
            const double t = (n_times == 1) ? 0.0
                                            : T * static_cast<double>(j) /
                                                  static_cast<double>(n_times - 1);
            for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
                const double dy = grid[i + 1] - grid[i];
                const double slope = 1.0 + t * (speeds[i + 1] - speeds[i]) / dy;
                worst = std::min(worst, slope);
            }
            if (!(worst > margin)) ok = false;
        }
        if (ok) {
            ChengData data{flux, base_eff, delta, params, T, T, worst};
            return data;
        }
    }
}

WkbConfig make_wkb_config(Flux flux, double base_state, int d, EvalRule profile_u0,
                          std::vector<double> epsilons, double T) {
    if (d < 1) throw std::invalid_argument("degeneracy order d must be a positive integer");
    if (!profile_u0) throw std::invalid_argument("profile rule is empty");
    if (epsilons.empty()) throw std::invalid_argument("need at least one epsilon");
    if (!flux.domain().contains(base_state))
        throw DomainError("base state outside the flux domain");
    for (double e : epsilons)
        if (!std::isfinite(e) || !(e > 0.0) || !(e <= 1.0))
            throw std::invalid_argument("every epsilon must lie in (0,1]");
    if (!(T >= 0.0)) throw std::invalid_argument("horizon must be >= 0");

    const double lambda = flux.derivative(base_state, 1);
    double factorial = 1.0;
    for (int i = 2; i <= 1 + d; ++i) factorial *= static_cast<double>(i);
    const double b_coeff = flux.derivative(base_state, 1 + d) / factorial;
    if (!std::isfinite(b_coeff) || b_coeff == 0.0)
        throw std::invalid_argument(
            "the flux needs a finite nonzero derivative of order 1+d at the base state");

    // sampled profile range over one period
    const int m = 4096;
    double u_min = std::numeric_limits<double>::infinity();
    double u_max = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= m; ++j) {
        const double v = profile_u0(static_cast<double>(j) / m);
        if (!std::isfinite(v)) throw std::invalid_argument("profile rule produced a non-finite value");
        u_min = std::min(u_min, v);
        u_max = std::max(u_max, v);
    }
    for (double e : epsilons) {
        if (!flux.domain().contains(base_state + e * u_min) ||
            !flux.domain().contains(base_state + e * u_max))
            throw std::invalid_argument("epsilon " + std::to_string(e) +
                                        " drives the data outside the flux domain");
    }

    const double span = u_max - u_min;
    const double pad = std::max(1e-6, 1e-3 * span);
    std::vector<double> coeffs(static_cast<std::size_t>(d) + 2, 0.0);
    coeffs.back() = b_coeff;
    Flux profile_flux = Flux::polynomial(coeffs, Interval(u_min - pad, u_max + pad));

    const auto reduced = [&profile_u0](double y) { return profile_u0(reduce_period(y)); };
    const double shock = shock_time(profile_flux, reduced, uniform_points(0.0, 1.0, 8193));
    if (!(T < shock))
        throw std::invalid_argument("horizon must precede the profile shock time");

    return WkbConfig{std::move(flux), base_state,        d, lambda, b_coeff,
                     std::move(profile_u0), std::move(epsilons), T, std::move(profile_flux),
                     shock};
}

namespace {

void require_listed(const WkbConfig& config, double eps) {
    for (double e : config.epsilons)
        if (e == eps) return;
    throw std::invalid_argument("epsilon " + std::to_string(eps) +
                                " is not one of the configured values");
}

}  // namespace

double wkb_initial(const WkbConfig& config, double eps, double x) {
    require_listed(config, eps);
    const double phase = x / ipow(eps, config.d);
    const double v = config.base_state + eps * config.profile_u0(reduce_period(phase));
    if (!config.flux.domain().contains(v))
        throw DomainError("oscillating data leaves the flux domain");
    return v;
}

SampledFunction profile_evolve(const WkbConfig& config, double t,
                               const std::vector<double>& theta_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
    if (theta_grid.size() < 2)
        throw std::invalid_argument("theta_grid needs at least 2 points");
    if (!(t < config.profile_shock_time))
        throw ShockReached("profile evolution requested at or past its shock time");

    const auto reduced = [&config](double y) { return config.profile_u0(reduce_period(y)); };
    std::vector<double> values(theta_grid.size());
    if (t == 0.0) {
        for (std::size_t i = 0; i < theta_grid.size(); ++i)
            values[i] = reduced(theta_grid[i]);
        return SampledFunction(theta_grid, std::move(values));
    }

    // flow over enough periods that [0,1) sits strictly inside its image
    double speed = 0.0;
    const int m = 4096;
    for (int j = 0; j <= m; ++j) {
        const double u = config.profile_u0(static_cast<double>(j) / m);
        speed = std::max(speed, std::fabs(config.profile_flux.derivative(u, 1)));
    }
    const double margin = t * speed + 0.06;
    const std::size_t n =
        static_cast<std::size_t>(std::ceil(8192.0 * (1.0 + 2.0 * margin))) + 1;
    const auto y_grid = uniform_points(-margin, 1.0 + margin, n);
    const auto flow = characteristic_flow(config.profile_flux, reduced, t, y_grid);
    if (!flow.monotone)
        throw ShockReached("profile characteristics cross before the requested time");

    for (std::size_t i = 0; i < theta_grid.size(); ++i)
        values[i] = reduced(invert_flow(flow, reduce_period(theta_grid[i])));
    return SampledFunction(theta_grid, std::move(values));
}

SampledFunction wkb_reconstruct(const WkbConfig& config, double eps, double t,
                                const std::vector<double>& x_grid) {
    require_listed(config, eps);
    if (x_grid.size() < 2) throw std::invalid_argument("x_grid needs at least 2 points");
    std::vector<double> values(x_grid.size());
    if (t == 0.0) {
        for (std::size_t i = 0; i < x_grid.size(); ++i)
            values[i] = wkb_initial(config, eps, x_grid[i]);
        return SampledFunction(x_grid, std::move(values));
    }
    const double scale = ipow(eps, config.d);
    std::vector<double> phases(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i)
        phases[i] = (x_grid[i] - config.lambda * t) / scale;
    const auto profile = profile_evolve(config, t, phases);
    for (std::size_t i = 0; i < x_grid.size(); ++i)
        values[i] = config.base_state + eps * profile.values[i];
    return SampledFunction(x_grid, std::move(values));
}

WkbResidual wkb_residual(const WkbConfig& config, double eps, double t,
                         const GodunovConfig& godunov) {
    require_listed(config, eps);
    if (!(t >= 0.0) || !(t <= config.T))
        throw std::invalid_argument("residual time must lie in [0, T]");
    const double window = ipow(eps, config.d);

    GodunovConfig cfg = godunov;
    cfg.domain = Interval(0.0, window);
    cfg.boundary = Boundary::Periodic;

    const auto cells = static_cast<std::size_t>(
        std::max<long long>(2, std::llround(window / cfg.dx)));
    const std::size_t m = std::max<std::size_t>(4 * cells, 4096) + 1;
    const auto xs = uniform_points(0.0, window, m);
    std::vector<double> init(m);
    for (std::size_t i = 0; i < m; ++i) init[i] = wkb_initial(config, eps, xs[i]);

    const auto solution = godunov_solve(config.flux, SampledFunction(xs, std::move(init)), t, cfg);
    const auto recon = wkb_reconstruct(config, eps, t, solution.abscissae);
    const double l1 = l1_distance(solution, recon);
    const double linf = linf_distance(solution, recon);
    return WkbResidual{l1, linf, l1 / (eps * window)};
}

SampledFunction powerlaw_oscillation(double p, double eps, const EvalRule& profile_u0, double t,
                                     const std::vector<double>& x_grid,
                                     const GodunovConfig& godunov) {
    if (!(p >= 1.0)) throw std::invalid_argument("oscillation exponent p must be >= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
    if (!profile_u0) throw std::invalid_argument("profile rule is empty");
    if (x_grid.size() < 2) throw std::invalid_argument("x_grid needs at least 2 points");

    const double scale = std::pow(eps, p);
    std::vector<double> values(x_grid.size());
    if (t == 0.0) {
        for (std::size_t i = 0; i < x_grid.size(); ++i)
            values[i] = eps * profile_u0(reduce_period(x_grid[i] / scale));
        return SampledFunction(x_grid, std::move(values));
    }

    const int m = 4096;
    double u_min = std::numeric_limits<double>::infinity();
    double u_max = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= m; ++j) {
        const double v = profile_u0(static_cast<double>(j) / m);
        if (!std::isfinite(v)) throw std::invalid_argument("profile rule produced a non-finite value");
        u_min = std::min(u_min, v);
        u_max = std::max(u_max, v);
    }
    const double pad = std::max(1e-6, 1e-3 * (u_max - u_min));
    const Flux profile_flux = Flux::power_law(1.0 + p, Interval(u_min - pad, u_max + pad));

    GodunovConfig cfg = godunov;
    cfg.domain = Interval(0.0, 1.0);
    cfg.boundary = Boundary::Periodic;
    const auto cells = static_cast<std::size_t>(
        std::max<long long>(2, std::llround(1.0 / cfg.dx)));
    const std::size_t msamp = std::max<std::size_t>(4 * cells, 4096) + 1;
    const auto xs = uniform_points(0.0, 1.0, msamp);
    std::vector<double> init(msamp);
    for (std::size_t i = 0; i < msamp; ++i) init[i] = profile_u0(reduce_period(xs[i]));

    const auto profile = godunov_solve(profile_flux, SampledFunction(xs, std::move(init)), t, cfg);
    const std::size_t n = profile.size();
    const double dx = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const double phase = reduce_period(x_grid[i] / scale);
        // periodic linear interpolation between cell centers
        const double pos = phase / dx - 0.5;
        const double fl = std::floor(pos);
        const double frac = pos - fl;
        const long long j = static_cast<long long>(fl);
        const std::size_t j0 =
            static_cast<std::size_t>(((j % static_cast<long long>(n)) + static_cast<long long>(n)) %
                                     static_cast<long long>(n));
        const std::size_t j1 = (j0 + 1) % n;
        values[i] = eps * ((1.0 - frac) * profile.values[j0] + frac * profile.values[j1]);
    }
    return SampledFunction(x_grid, std::move(values));
}

ScalingReport sobolev_scaling_sweep(const WkbConfig& config, const std::vector<double>& s_primes,
                                    double t, int points_per_period) {
    if (s_primes.empty()) throw std::invalid_argument("need at least one s'");
    for (double sp : s_primes)
        if (!(sp > 0.0) || !(sp < 1.0))
            throw std::invalid_argument("every s' must lie in (0,1)");
    if (!(t >= 0.0) || !(t <= config.T))
        throw std::invalid_argument("sweep time must lie in [0, T]");
    if (points_per_period < 4)
        throw std::invalid_argument("need at least 4 points per period");

    std::vector<double> eps_sorted = config.epsilons;
    std::sort(eps_sorted.begin(), eps_sorted.end());
    std::vector<double> sp_sorted = s_primes;
    std::sort(sp_sorted.begin(), sp_sorted.end());

    ScalingReport report;
    for (double eps : eps_sorted) {
        const double periods = 1.0 / ipow(eps, config.d);
        const std::size_t n = std::max<std::size_t>(
            static_cast<std::size_t>(std::llround(points_per_period * periods)) + 1, 1025);
        const auto x_grid = uniform_points(0.0, 1.0, n);
        const auto u = wkb_reconstruct(config, eps, t, x_grid);
        for (double sp : sp_sorted) {
            const double gag = gagliardo_seminorm(u, sp, 1.0);
            const double tvv = tv_s(u, sp).value;
            report.rows.push_back(ScalingRow{eps, sp, gag, tvv});
        }
    }

    for (double sp : sp_sorted) {
        std::vector<double> le_g, lv_g, le_t, lv_t;
        for (const auto& row : report.rows) {
            if (row.s_prime != sp) continue;
            if (std::isfinite(row.gagliardo) && row.gagliardo > 0.0) {
                le_g.push_back(std::log(row.epsilon));
                lv_g.push_back(std::log(row.gagliardo));
            }
            if (std::isfinite(row.tvs) && row.tvs > 0.0) {
                le_t.push_back(std::log(row.epsilon));
                lv_t.push_back(std::log(row.tvs));
            }
        }
        if (le_g.size() < 2 || le_t.size() < 2) continue;
        const auto fg = linear_fit(le_g, lv_g);
        const auto ft = linear_fit(le_t, lv_t);
        report.slopes.push_back(ScalingSlope{sp, fg.slope, fg.r2, ft.slope, ft.r2});
    }
    return report;
}

}  // namespace conslaw
