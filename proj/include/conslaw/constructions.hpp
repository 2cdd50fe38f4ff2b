#pragma once

#include <cstddef>
#include <vector>

#include "conslaw/errors.hpp"
#include "conslaw/flux_analysis.hpp"
#include "conslaw/fractional_variation.hpp"
#include "conslaw/transport_solver.hpp"

namespace conslaw {

// Exponent pair for the oscillator x^b cos(pi / x^c): b = s + s^2/eta and
// c = s/eta, so that b = s(1 + c) and, when d = 1/s is an integer,
// b*d = 1 + c. The oscillation amplitudes decay like k^{-b/c} = k^{-(s+eta)}.
struct OscillatorParams {
    double s;
    double eta;
    double b;
    double c;

    // Validates s in (0,1) and eta in (0, 1-s).
    static OscillatorParams from_exponents(double s, double eta);
};

// g(x) = x^b cos(pi / x^c) on [0,1] with g(0) = 0. Below the scale where
// pi/x^c overflows, the amplitude x^b is itself far below one ulp of any
// representable result, so the value is reported as 0. DomainError outside
// [0,1].
double oscillator(const OscillatorParams& params, double x);

// The alternation points x_k = k^{-1/c}, k = 1..n, in decreasing order.
std::vector<double> oscillator_extrema(const OscillatorParams& params, int n);

// Closed-form value g(x_k) = (-1)^k x_k^b.
double oscillator_extremum_value(const OscillatorParams& params, int k);

// |g(x_{k+1}) - g(x_k)| from the closed form; ~ 2 k^{-b/c} for large k.
double oscillator_amplitude(const OscillatorParams& params, int k);

// Continuous initial data: base_state for x < 0, base_state + delta*g(x) on
// [0,1], base_state - delta for x > 1 (continuous because g(0) = 0 and
// g(1) = -1), together with its monotone-flow certificate.
struct ChengData {
    Flux flux;
    double base_state;
    double delta;
    OscillatorParams params;
    double target_T;
    double certified_T_delta;    // >= target_T
    double monotonicity_margin;  // worst certified min_slope, > 0
};

double cheng_initial_data(const ChengData& data, double x);

// Certification grid on [0,1]: a uniform half, the alternation points x_k
// with their midpoints, and a logarithmic tail toward 0 (the x_k accumulate
// at 0 with spacing ~ k^{-1/c-1}).
std::vector<double> cheng_certification_grid(const OscillatorParams& params,
                                             std::size_t n = 20000);

// Starting from the largest delta that keeps all data values inside the
// flux domain, halves delta until the characteristic flow of the data has
// min_slope > margin on a 32-point time grid of [0, T] crossed with the
// certification grid. When the base state sits too close to the domain
// boundary for a two-sided oscillation, the stored base_state is shifted
// inward by the minimal amount (one-sided variant). Throws NoAdmissibleDelta
// when delta falls below 1e-14 without certifying.
ChengData select_delta(const Flux& flux, double base_state, const OscillatorParams& params,
                       double T, double margin = 1e-6);

// Slowly modulated oscillation u^eps(t,x) = ubar + eps*U(t, (x - lambda t)/eps^d)
// where U solves the profile equation dU/dt + b_coeff * d(U^{1+d})/dtheta = 0
// with 1-periodic initial profile U0.
struct WkbConfig {
    Flux flux;
    double base_state;
    int d;
    double lambda;   // f'(base_state)
    double b_coeff;  // f^{(1+d)}(base_state) / (1+d)!
    EvalRule profile_u0;
    std::vector<double> epsilons;
    double T;  // experiment horizon, < profile_shock_time
    Flux profile_flux;
    double profile_shock_time;
};

// Computes lambda, b_coeff, the profile flux (domain padded around the
// sampled range of U0), and the profile shock time. Rejects b_coeff == 0,
// epsilons outside (0,1], amplitudes that leave the flux domain, and
// T >= profile shock time.
WkbConfig make_wkb_config(Flux flux, double base_state, int d, EvalRule profile_u0,
                          std::vector<double> epsilons, double T);

// ubar + eps * U0(x / eps^d), phase reduced mod 1. eps must be one of the
// configured values; DomainError if the value leaves the flux domain.
double wkb_initial(const WkbConfig& config, double eps, double x);

// Profile solution U(t, theta) by characteristics, 1-periodic in theta;
// evaluation reduces theta mod 1. t = 0 resamples U0 directly. Throws
// ShockReached at or past the profile shock time.
SampledFunction profile_evolve(const WkbConfig& config, double t,
                               const std::vector<double>& theta_grid);

// ubar + eps * U(t, (x - lambda t)/eps^d); at t = 0 this reproduces
// wkb_initial exactly.
SampledFunction wkb_reconstruct(const WkbConfig& config, double eps, double t,
                                const std::vector<double>& x_grid);

struct WkbResidual {
    double l1;
    double linf;
    double relative;  // l1 / (eps * window length)
};

// Distance between the finite-volume solution of the full equation started
// from wkb_initial and wkb_reconstruct, over one spatial period [0, eps^d]
// with periodic boundaries (the supplied config's domain and boundary are
// overridden; its dx, cfl and ceilings are used as given).
WkbResidual wkb_residual(const WkbConfig& config, double eps, double t,
                         const GodunovConfig& godunov);

// eps * U(t, x / eps^p) where U is the finite-volume entropy solution of
// the profile equation dU/dt + d(|U|^{1+p})/dtheta = 0 with 1-periodic
// initial profile. Valid past profile shocks. The supplied config's domain
// and boundary are overridden by one periodic profile period [0,1].
SampledFunction powerlaw_oscillation(double p, double eps, const EvalRule& profile_u0, double t,
                                     const std::vector<double>& x_grid,
                                     const GodunovConfig& godunov);

struct ScalingRow {
    double epsilon;
    double s_prime;
    double gagliardo;
    double tvs;
};

struct ScalingSlope {
    double s_prime;
    double gagliardo_slope;
    double gagliardo_r2;
    double tvs_slope;
    double tvs_r2;
};

// Rows sorted by epsilon then s_prime; slopes cover the s_prime values
// whose seminorms admit a log-log fit (at least two positive values).
struct ScalingReport {
    std::vector<ScalingRow> rows;
    std::vector<ScalingSlope> slopes;
};

// For each configured eps and each s' in (0,1): reconstruct u^eps(t, .) on
// the fixed window [0,1] sampled at points_per_period points per spatial
// period eps^d, then record its Gagliardo seminorm (s', p = 1) and tv_{s'}.
// Slopes are fits of log(value) against log(eps).
ScalingReport sobolev_scaling_sweep(const WkbConfig& config, const std::vector<double>& s_primes,
                                    double t, int points_per_period = 32);

}  // namespace conslaw
