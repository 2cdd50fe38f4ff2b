#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace conslaw {

// Base for all library errors so callers can catch the whole family at once.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation outside a flux or function domain.
struct DomainError : Error {
    using Error::Error;
};

// Derivative order beyond what a flux can supply.
struct OrderUnsupported : Error {
    using Error::Error;
};

// A log-log fit has no usable points (all measures zero or saturated).
struct FitDegenerate : Error {
    using Error::Error;
};

// Brute-force enumeration refused: input too long.
struct TooLarge : Error {
    using Error::Error;
};

// Partial sums left the representable range.
struct OverflowError : Error {
    using Error::Error;
};

// Neither growth model reached the required fit quality.
struct InconclusiveFit : Error {
    using Error::Error;
};

// Characteristic flow is not invertible.
struct NonMonotone : Error {
    using Error::Error;
};

// Query point outside the image of the flow.
struct OutOfRange : Error {
    using Error::Error;
};

// Requested evolution time is at or past characteristic crossing.
struct ShockReached : Error {
    using Error::Error;
};

// CFL-limited step count exceeded the configured ceiling.
struct StepTooSmall : Error {
    using Error::Error;
};

// Two sampled functions share no abscissa range.
struct EmptyOverlap : Error {
    using Error::Error;
};

// Perturbation size search exhausted without certification.
struct NoAdmissibleDelta : Error {
    using Error::Error;
};

// Config text that does not parse; carries the 1-based line number.
struct ParseError : Error {
    ParseError(const std::string& msg, int line_number)
        : Error(msg + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
    int line;
};

// Config that parses but fails validation; lists every issue found.
struct ValidationError : Error {
    explicit ValidationError(std::vector<std::string> problems)
        : Error(join(problems)), issues(std::move(problems)) {}
    std::vector<std::string> issues;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "config validation failed:";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }
};

}  // namespace conslaw
