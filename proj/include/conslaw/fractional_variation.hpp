#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "conslaw/errors.hpp"

namespace conslaw {

// Discrete carrier of a 1-D profile: strictly increasing sample points and
// one value per point.
struct SampledFunction {
    std::vector<double> abscissae;
    std::vector<double> values;

    SampledFunction(std::vector<double> abscissae_in, std::vector<double> values_in);
    std::size_t size() const { return values.size(); }
};

// Two-column CSV (x,u), one sample per row; an optional "x,u" header row is
// accepted on read and always written.
SampledFunction read_sampled_csv(std::istream& in);
SampledFunction read_sampled_csv_file(const std::string& path);
void write_sampled_csv(std::ostream& out, const SampledFunction& f);
void write_sampled_csv_file(const std::string& path, const SampledFunction& f);

struct VariationResult {
    double s = 1.0;
    double p = 1.0;  // 1/s
    double value = 0.0;
    // Attaining sample indices, strictly increasing. Re-summing
    // |values[k+1]-values[k]|^p over consecutive partition entries, left to
    // right, reproduces `value` bit for bit.
    std::vector<std::size_t> partition;
};

struct SeriesProbe {
    std::function<double(std::size_t)> amplitude;  // k >= 1 -> a_k > 0
    double q = 1.0;                                // exponent, >= 1
    std::size_t truncation = 2;                    // N >= 2
};

enum class Verdict { Convergent, Divergent };

struct GrowthClass {
    Verdict verdict = Verdict::Convergent;
    // convergent: extrapolated limit; divergent: the rate coefficient
    // (slope against ln n for the log model, growth exponent for the power
    // model).
    double limit_or_rate = 0.0;
    double fit_quality = 0.0;  // R^2 of the winning model, clamped to [0,1]
    // "bounded", "log", or "power"
    std::string model;
    // bounded model: fitted remainder exponent gamma in S_n ~ L - c n^-gamma
    // (the underlying terms then decay like n^-(1+gamma)); 0 otherwise.
    double tail_gamma = 0.0;
    // Relative increase of the partial sums across the settled tail (the
    // last three quarters of the index range, matching the bounded-model fit
    // window).  The convergent verdict requires this to stay below 2%.
    double tail_increase = 0.0;
};

// Indices of the strict direction changes plus both endpoints; a plateau
// contributes its first index only.
std::vector<std::size_t> local_extrema(const SampledFunction& f);

// Exact maximum of sum |u(x_k) - u(x_{k-1})|^{1/s} over index subsequences,
// by O(n^2) dynamic programming over all sample indices (matching the
// exhaustive oracle bit for bit; the optimum lands on local extrema up to
// rounding). Ties resolve to the shortest partition, then the
// lexicographically smallest index sequence.
VariationResult tv_s(const SampledFunction& f, double s);

// Exhaustive oracle over all index subsequences; length must be <= 14.
double tv_s_bruteforce(const SampledFunction& f, double s);

// Running partial sums of a_k^q for k = 1..N.
std::vector<double> partial_variation_series(const SeriesProbe& probe);

// Fits a bounded tail model (L - c n^-gamma on the final three quarters)
// against divergent models (c ln n + d, c n^gamma + d on the full range) and
// picks the better R^2. A convergent verdict additionally requires the
// last-decade relative increase to be below 2%; otherwise the best divergent
// model wins. Throws InconclusiveFit when no model reaches R^2 0.95.
GrowthClass classify_growth(const std::vector<double>& partial_sums);

// Trapezoidal double quadrature of |u(x)-u(y)|^p / |x-y|^(1+sp) with the
// diagonal band |x-y| < max grid spacing excluded, raised to 1/p. Uniform
// grids take a precomputed-kernel fast path (one pow per gap, not per pair).
double gagliardo_seminorm(const SampledFunction& f, double s, double p);

}  // namespace conslaw
