#include "conslaw/transport_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conslaw/numerics.hpp"

namespace conslaw {

namespace {

void validate_grid(const std::vector<double>& g, const char* what) {
    if (g.size() < 2) throw std::invalid_argument(std::string(what) + " needs at least 2 points");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i]))
            throw std::invalid_argument(std::string(what) + " must be finite");
        if (i > 0 && !(g[i] > g[i - 1]))
            throw std::invalid_argument(std::string(what) + " must be strictly increasing");
    }
}

constexpr double kMonotoneMargin = 1e-10;

}  // namespace

CharacteristicFlow characteristic_flow(const Flux& flux, const EvalRule& u0, double t,
                                       const std::vector<double>& y_grid) {
    if (!u0) throw std::invalid_argument("initial data rule is empty");
    if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
    validate_grid(y_grid, "y_grid");

    CharacteristicFlow flow;
    flow.y_grid = y_grid;
    flow.time = t;
    flow.theta.resize(y_grid.size());
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
        const double u = u0(y_grid[i]);
        if (!flux.domain().contains(u))
            throw DomainError("initial data leaves the flux domain at y=" + std::to_string(y_grid[i]));
        flow.theta[i] = y_grid[i] + t * flux.derivative(u, 1);
    }
    double min_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < y_grid.size(); ++i) {
        const double q = (flow.theta[i + 1] - flow.theta[i]) / (y_grid[i + 1] - y_grid[i]);
        min_slope = std::min(min_slope, q);
    }
    flow.min_slope = min_slope;
    flow.monotone = min_slope > kMonotoneMargin;
    return flow;
}

double shock_time(const Flux& flux, const EvalRule& u0, const std::vector<double>& y_grid) {
    if (!u0) throw std::invalid_argument("initial data rule is empty");
    validate_grid(y_grid, "y_grid");
    double steepest = 0.0;  // sup of -d[f'(u0)]/dy
    double prev = flux.derivative(u0(y_grid[0]), 1);
    for (std::size_t i = 1; i < y_grid.size(); ++i) {
        const double cur = flux.derivative(u0(y_grid[i]), 1);
        const double q = (cur - prev) / (y_grid[i] - y_grid[i - 1]);
        steepest = std::max(steepest, -q);
        prev = cur;
    }
    if (steepest == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / steepest;
}

double invert_flow(const CharacteristicFlow& flow, double x, double tol) {
    if (!flow.monotone) throw NonMonotone("flow is not certified monotone");
    const auto& th = flow.theta;
    const auto& y = flow.y_grid;
    if (x < th.front() || x > th.back())
        throw OutOfRange("x outside the image of the flow");
    const auto it = std::lower_bound(th.begin(), th.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - th.begin());
    if (k < th.size() && th[k] == x) return y[k];
    // x strictly inside cell (k-1, k)
    const double t0 = th[k - 1], t1 = th[k];
    const double yy = y[k - 1] + (x - t0) * (y[k] - y[k - 1]) / (t1 - t0);
    const double residual = std::fabs(t0 + (yy - y[k - 1]) * (t1 - t0) / (y[k] - y[k - 1]) - x);
    if (residual > tol) throw Error("flow inversion residual exceeded tolerance");
    return yy;
}

EvolutionResult evolve_with_flow(const TransportProblem& prob, const CharacteristicFlow& flow,
                                 const std::vector<double>& u0_values,
                                 const std::vector<double>& x_grid, double tol) {
    validate_grid(x_grid, "x_grid");
    if (u0_values.size() != flow.y_grid.size())
        throw std::invalid_argument("u0_values must match the flow grid");

    std::vector<double> out(x_grid.size());
    double max_residual = 0.0;
    if (flow.time == 0.0) {
        for (std::size_t i = 0; i < x_grid.size(); ++i) out[i] = prob.eval(x_grid[i]);
        return EvolutionResult{SampledFunction(x_grid, std::move(out)), 0.0, tol, 0.0};
    }
    if (!flow.monotone) throw ShockReached("characteristic flow is no longer monotone");

    const auto& th = flow.theta;
    const auto& y = flow.y_grid;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const double x = x_grid[i];
        if (x < th.front()) {
            out[i] = prob.left_state;
            continue;
        }
        if (x > th.back()) {
            out[i] = prob.right_state;
            continue;
        }
        const auto it = std::lower_bound(th.begin(), th.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - th.begin());
        if (k < th.size() && th[k] == x) {
            out[i] = u0_values[k];  // exact grid hit transports the sample bitwise
            continue;
        }
        const double t0 = th[k - 1], t1 = th[k];
        const double yy = y[k - 1] + (x - t0) * (y[k] - y[k - 1]) / (t1 - t0);
        const double residual =
            std::fabs(t0 + (yy - y[k - 1]) * (t1 - t0) / (y[k] - y[k - 1]) - x);
        max_residual = std::max(max_residual, residual);
        out[i] = prob.eval(yy);
    }
    if (max_residual > tol) throw Error("flow inversion residual exceeded tolerance");
    return EvolutionResult{SampledFunction(x_grid, std::move(out)), flow.time, tol, max_residual};
}

EvolutionResult evolve_continuous(const Flux& flux, const TransportProblem& prob, double t,
                                  const std::vector<double>& x_grid,
                                  const std::vector<double>& y_grid, double tol) {
    auto rule = [&prob](double yv) { return prob.eval(yv); };
    const auto flow = characteristic_flow(flux, rule, t, y_grid);
    std::vector<double> u0v(y_grid.size());
    for (std::size_t i = 0; i < y_grid.size(); ++i) u0v[i] = prob.eval(y_grid[i]);
    return evolve_with_flow(prob, flow, u0v, x_grid, tol);
}

double sample_linear(const SampledFunction& f, double x) {
    const auto& xs = f.abscissae;
    if (x <= xs.front()) return f.values.front();
    if (x >= xs.back()) return f.values.back();
    const auto it = std::lower_bound(xs.begin(), xs.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs.begin());
    if (xs[k] == x) return f.values[k];
    const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return f.values[k - 1] + w * (f.values[k] - f.values[k - 1]);
}

namespace {

struct GodunovFlux {
    const Flux& flux;
    std::vector<double> interior_extrema;  // sign-change roots of f'

    explicit GodunovFlux(const Flux& f) : flux(f) {
        interior_extrema = derivative_sign_roots(f, 1, 2000);
    }

    double operator()(double ul, double ur) const {
        if (ul == ur) return flux.eval(ul);
        if (ul < ur) {
            double m = std::min(flux.eval(ul), flux.eval(ur));
            for (double r : interior_extrema)
                if (r > ul && r < ur) m = std::min(m, flux.eval(r));
            return m;
        }
        double m = std::max(flux.eval(ur), flux.eval(ul));
        for (double r : interior_extrema)
            if (r > ur && r < ul) m = std::max(m, flux.eval(r));
        return m;
    }
};

}  // namespace

SampledFunction godunov_solve(const Flux& flux, const SampledFunction& u0, double t_end,
                              const GodunovConfig& config, GodunovDiagnostics* diagnostics) {
    if (!(config.dx > 0.0)) throw std::invalid_argument("dx must be positive");
    if (!(config.cfl > 0.0) || !(config.cfl < 1.0))
        throw std::invalid_argument("cfl must lie in (0,1)");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");

    const double lo = config.domain.lo();
    const double width = config.domain.width();
    const std::size_t n =
        static_cast<std::size_t>(std::max<long long>(2, std::llround(width / config.dx)));
    const double dx = width / static_cast<double>(n);

    std::vector<double> centers(n), u(n);
    for (std::size_t i = 0; i < n; ++i) {
        centers[i] = lo + (static_cast<double>(i) + 0.5) * dx;
        u[i] = sample_linear(u0, centers[i]);
        if (!flux.domain().contains(u[i]))
            throw DomainError("initial data leaves the flux domain");
    }

    const GodunovFlux F(flux);
    const double dom_lo = flux.domain().lo(), dom_hi = flux.domain().hi();
    auto record = [&](double t) {
        if (!diagnostics) return;
        double mn = u[0], mx = u[0];
        KahanSum mass;
        for (double v : u) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            mass.add(v);
        }
        diagnostics->times.push_back(t);
        diagnostics->minima.push_back(mn);
        diagnostics->maxima.push_back(mx);
        diagnostics->masses.push_back(mass.value() * dx);
    };

    auto max_speed = [&]() {
        double a = 0.0;
        for (double v : u) a = std::max(a, std::fabs(flux.derivative(v, 1)));
        return a;
    };

    // fail fast when the CFL step count cannot fit the ceiling
    {
        const double a0 = max_speed();
        if (a0 > 0.0) {
            const double est = t_end * a0 / (config.cfl * dx);
            if (est > 1.5 * static_cast<double>(config.max_steps))
                throw StepTooSmall("estimated step count " + std::to_string(est) +
                                   " exceeds the ceiling");
        }
    }

    record(0.0);
    double t = 0.0;
    double dt_min = std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    std::vector<double> fluxes(n + 1);
    while (t < t_end) {
        if (++steps > config.max_steps)
            throw StepTooSmall("step ceiling reached at t=" + std::to_string(t));
        const double a = max_speed();
        double dt = (a > 0.0) ? config.cfl * dx / a : t_end - t;
        bool final_step = false;
        if (t + dt >= t_end) {
            dt = t_end - t;
            final_step = true;
        }
        if (!(dt > 0.0)) break;

        const double ul_ghost = (config.boundary == Boundary::Periodic) ? u[n - 1] : u[0];
        const double ur_ghost = (config.boundary == Boundary::Periodic) ? u[0] : u[n - 1];
        fluxes[0] = F(ul_ghost, u[0]);
        for (std::size_t i = 1; i < n; ++i) fluxes[i] = F(u[i - 1], u[i]);
        fluxes[n] = F(u[n - 1], ur_ghost);

        const double c = dt / dx;
        for (std::size_t i = 0; i < n; ++i) {
            double v = u[i] - c * (fluxes[i + 1] - fluxes[i]);
            // monotone scheme keeps values in range analytically; the clamp
            // only absorbs last-ulp overshoot past the flux domain
            if (v < dom_lo) v = dom_lo;
            if (v > dom_hi) v = dom_hi;
            u[i] = v;
        }
        t = final_step ? t_end : t + dt;
        dt_min = std::min(dt_min, dt);
        if (diagnostics && steps % config.frame_stride == 0 && t < t_end) record(t);
    }
    if (diagnostics) {
        diagnostics->steps = steps;
        diagnostics->dt_min = (steps > 0) ? dt_min : 0.0;
    }
    if (steps > 0) record(t_end);
    return SampledFunction(std::move(centers), std::move(u));
}

namespace {

struct Overlap {
    std::vector<double> xs;
    std::vector<double> df;  // f - g at xs
};

Overlap overlap_difference(const SampledFunction& f, const SampledFunction& g) {
    const double lo = std::max(f.abscissae.front(), g.abscissae.front());
    const double hi = std::min(f.abscissae.back(), g.abscissae.back());
    if (!(hi > lo)) throw EmptyOverlap("sample domains do not overlap");

    std::vector<double> xs;
    xs.reserve(f.size() + g.size() + 2);
    xs.push_back(lo);
    for (double x : f.abscissae)
        if (x > lo && x < hi) xs.push_back(x);
    for (double x : g.abscissae)
        if (x > lo && x < hi) xs.push_back(x);
    xs.push_back(hi);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> d(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        d[i] = sample_linear(f, xs[i]) - sample_linear(g, xs[i]);

    // refine with the sign changes so |d| is piecewise linear on the grid
    std::vector<double> rx, rd;
    rx.reserve(xs.size() * 2);
    rd.reserve(xs.size() * 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0 && d[i - 1] * d[i] < 0.0) {
            const double xc =
                xs[i - 1] + d[i - 1] * (xs[i] - xs[i - 1]) / (d[i - 1] - d[i]);
            if (xc > rx.back() && xc < xs[i]) {
                rx.push_back(xc);
                rd.push_back(0.0);
            }
        }
        rx.push_back(xs[i]);
        rd.push_back(d[i]);
    }
    return Overlap{std::move(rx), std::move(rd)};
}

}  // namespace

double l1_distance(const SampledFunction& f, const SampledFunction& g) {
    const Overlap o = overlap_difference(f, g);
    KahanSum total;
    for (std::size_t i = 0; i + 1 < o.xs.size(); ++i)
        total.add(0.5 * (std::fabs(o.df[i]) + std::fabs(o.df[i + 1])) * (o.xs[i + 1] - o.xs[i]));
    return total.value();
}

double linf_distance(const SampledFunction& f, const SampledFunction& g) {
    const Overlap o = overlap_difference(f, g);
    double m = 0.0;
    for (double d : o.df) m = std::max(m, std::fabs(d));
    return m;
}

}  // namespace conslaw
