#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conslaw/errors.hpp"

namespace conslaw {

// Closed state interval [lo, hi]; degenerate widths are rejected.
class Interval {
public:
    Interval(double lo, double hi);
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }
    bool contains(double u) const { return u >= lo_ && u <= hi_; }

private:
    double lo_;
    double hi_;
};

// Flux function on a state interval with exact derivative rules.
//
// Families:
//   power_law(q):  f(u) = |u|^q, derivatives one-sided at the kink,
//   polynomial(c): f(u) = sum c_j u^j,
//   user_rule(r):  r[k] is the k-th derivative, orders 0..r.size()-1.
//
// Construction cross-checks each supplied derivative rule against a central
// finite difference of the rule one order below (power law checked away
// from 0, where the rules are one-sided limits).
class Flux {
public:
    static Flux power_law(double exponent, Interval domain);
    static Flux polynomial(std::vector<double> coeffs, Interval domain);
    static Flux user_rule(std::vector<std::function<double(double)>> rules, Interval domain);

    double eval(double u) const;             // DomainError outside domain
    double derivative(double u, int k) const;  // k >= 1; OrderUnsupported past rules
    int max_derivative_order() const;          // INT_MAX for closed-form families

    const Interval& domain() const { return domain_; }

    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }
    std::string describe() const;

private:
    enum class Family { PowerLaw, Polynomial, UserRule };

    Flux(Family f, Interval domain);
    double eval_unchecked(double u, int k) const;
    void check_derivative_rules() const;

    Family family_;
    Interval domain_;
    double exponent_ = 0.0;
    std::vector<double> coeffs_;
    std::vector<std::function<double(double)>> rules_;
    std::string label_;
};

// Direction-and-threshold probe for level-set measure estimates.
// (tau, xi) is normalized to the unit circle at construction.
struct LptProbe {
    LptProbe(double tau, double xi, double delta);
    double tau;
    double xi;
    double delta;
};

struct SmoothDegeneracy {
    std::optional<int> d;  // empty means no derivative up to 1+kmax separates from zero
    double base_state = 0.0;
};

struct AlphaFit {
    double alpha = 0.0;
    double c = 0.0;  // multiplicative constant exp(intercept) of the fit
};

struct DegeneracyReport {
    std::optional<int> d;
    double base_state = 0.0;
    double alpha_fit = 0.0;
    double alpha_intercept = 0.0;
    double p_holder = std::numeric_limits<double>::infinity();
    bool alpha_d_consistent = false;  // |alpha_fit * d - 1| <= 0.1 when both finite
};

// Largest over the grid of the least k >= 1 with f^(1+k)(u) away from zero,
// with roots of f'' appended to the candidate grid before taking the max.
// zero_tol is relative to the max of |f^(1+k)| over the state interval.
SmoothDegeneracy smooth_degeneracy(const Flux& flux, int kmax = 8, int grid_size = 257,
                                   double zero_tol = 1e-10);

// Lebesgue measure of {v in K : |tau + xi f'(v)| < delta}, computed by
// splitting K at sign changes of f'' and bracketing level-set endpoints
// by bisection on each monotone piece.
double lpt_measure(const Flux& flux, const LptProbe& probe, int resolution = 2000);

// Log-log fit of the worst-direction measure against delta.
// Directions: `directions` equispaced unit vectors plus the two axes.
AlphaFit lpt_alpha(const Flux& flux, const std::vector<double>& deltas, int directions = 64,
                   int resolution = 2000);

// Smallest p in [1, 16] whose pairwise quotient min |a(u)-a(v)| / |u-v|^p
// over the evaluation grid stays above 1e-8; +infinity when none does.
// The grid is uniform plus geometric clusters around roots of f''.
double holder_degeneracy(const Flux& flux, int grid_size = 201, double p_tol = 1e-3);

// Interior points where f^(k) changes sign (bisected) plus isolated exact
// grid zeros, sampled on `resolution` cells. Used to split the domain into
// monotone pieces of f^(k-1).
std::vector<double> derivative_sign_roots(const Flux& flux, int k, int resolution = 2000);

// Bundles the three estimates and records their consistency.
// Defaults: derivative scan to order min(9, supported); 64 directions at
// resolution 2000 over deltas {1e-2, 10^-2.5, 1e-3, 10^-3.5, 1e-4} (kept
// below the angular-grid transition so the slope fit stays unbiased);
// inverse-modulus grid 201 with p_tol 1e-3.
DegeneracyReport degeneracy_report(const Flux& flux);

}  // namespace conslaw
