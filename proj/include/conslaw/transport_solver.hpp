#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "conslaw/errors.hpp"
#include "conslaw/flux_analysis.hpp"
#include "conslaw/fractional_variation.hpp"

namespace conslaw {

using EvalRule = std::function<double(double)>;

// Sampled characteristic map theta(y) = y + t * f'(u0(y)).
struct CharacteristicFlow {
    std::vector<double> y_grid;
    std::vector<double> theta;
    double time = 0.0;
    // declared monotone only when min_slope clears a 1e-10 floating-point
    // grazing margin
    bool monotone = false;
    // minimum forward difference quotient of theta over y_grid
    double min_slope = 0.0;
};

struct EvolutionResult {
    SampledFunction solution;
    double time;
    double inversion_tol;
    double max_inversion_residual;  // always <= inversion_tol
};

// Continuous initial data: left_state for y <= y_lo, right_state for
// y >= y_hi, the rule on the transition interval. The rule must meet the
// constant states continuously at both ends.
struct TransportProblem {
    EvalRule u0;
    double y_lo = 0.0;
    double y_hi = 1.0;
    double left_state = 0.0;
    double right_state = 0.0;

    double eval(double y) const {
        if (y <= y_lo) return left_state;
        if (y >= y_hi) return right_state;
        return u0(y);
    }
};

enum class Boundary { Outflow, Periodic };

struct GodunovConfig {
    double dx = 1e-3;
    double cfl = 0.45;
    Interval domain{0.0, 1.0};
    Boundary boundary = Boundary::Outflow;
    std::size_t max_steps = 10'000'000;  // StepTooSmall ceiling
    // record (t, min, max, mass) every `frame_stride` steps when diagnostics
    // are requested; first and last steps are always recorded
    std::size_t frame_stride = 100;
};

struct GodunovDiagnostics {
    std::vector<double> times;
    std::vector<double> minima;
    std::vector<double> maxima;
    std::vector<double> masses;  // Kahan-summed cell total * dx
    std::size_t steps = 0;
    double dt_min = 0.0;
};

// theta_i = y_i + t * f'(u0(y_i)); throws DomainError if u0 leaves the flux
// domain on the grid.
CharacteristicFlow characteristic_flow(const Flux& flux, const EvalRule& u0, double t,
                                       const std::vector<double>& y_grid);

// 1 / sup of -d[f'(u0)]/dy over forward differences; +infinity when f'(u0)
// is nondecreasing on the grid.
double shock_time(const Flux& flux, const EvalRule& u0, const std::vector<double>& y_grid);

// Piecewise-linear inverse of a monotone sampled flow: exact on grid hits,
// linear interpolation inside cells. Throws NonMonotone / OutOfRange.
double invert_flow(const CharacteristicFlow& flow, double x, double tol = 1e-10);

// u(t, x) = u0(theta_t^-1(x)) on the image of the flow, the problem's
// constant states outside. t == 0 short-circuits to direct evaluation.
// y_grid controls the flow sampling (and so the inversion accuracy).
EvolutionResult evolve_continuous(const Flux& flux, const TransportProblem& prob, double t,
                                  const std::vector<double>& x_grid,
                                  const std::vector<double>& y_grid, double tol = 1e-10);

// Same evolution reusing a precomputed flow and the initial values sampled
// on flow.y_grid (bitwise-identical transport of the value sequence).
EvolutionResult evolve_with_flow(const TransportProblem& prob, const CharacteristicFlow& flow,
                                 const std::vector<double>& u0_values,
                                 const std::vector<double>& x_grid, double tol = 1e-10);

// First-order finite-volume entropy solution with the min/max interface flux
// (handles nonconvex fluxes). Initial cell values interpolate u0 linearly at
// cell centers with constant extension. dx is adjusted to divide the domain
// evenly; throws StepTooSmall past config.max_steps.
SampledFunction godunov_solve(const Flux& flux, const SampledFunction& u0, double t_end,
                              const GodunovConfig& config,
                              GodunovDiagnostics* diagnostics = nullptr);

// Linear interpolation with constant extension outside the sample range.
double sample_linear(const SampledFunction& f, double x);

// Metrics on the overlap interval, after merging both grids (plus the sign
// changes of the difference, so the trapezoidal L1 is exact for
// piecewise-linear inputs). Throw EmptyOverlap when domains are disjoint.
double l1_distance(const SampledFunction& f, const SampledFunction& g);
double linf_distance(const SampledFunction& f, const SampledFunction& g);

}  // namespace conslaw
