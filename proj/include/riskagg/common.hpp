#pragma once

#include <stdexcept>
#include <string>

namespace riskagg {

// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Requested moment does not exist for the given parameters
// (e.g. E[X^r] of a Pareto tail with r >= alpha).
class moment_error : public domain_error {
public:
    using domain_error::domain_error;
};

// A series evaluation did not meet its tolerance within the term budget.
// Carries the partial sum and the magnitude of the last term so callers
// can decide whether the partial result is still usable.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, double partial_sum, double last_term)
        : std::runtime_error(what), partial_sum_(partial_sum), last_term_(last_term) {}

    double partial_sum() const noexcept { return partial_sum_; }
    double last_term() const noexcept { return last_term_; }

private:
    double partial_sum_;
    double last_term_;
};

// Malformed input data (CSV parsing and friends).
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace riskagg
