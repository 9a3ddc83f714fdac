#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tailex {

// Tail indices differ, so no finite tail-equivalence coefficient exists
// (dominant-tail regime instead).
class TailMismatchError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// gamma_hat >= 1: the estimated tail is too heavy for a finite first moment,
// the extreme-expectile formulas do not apply.
class HeavyTailError : public std::domain_error {
public:
    explicit HeavyTailError(double gamma_hat)
        : std::domain_error("estimated gamma_hat = " +
                            std::to_string(gamma_hat) +
                            " >= 1; tail too heavy for a finite mean"),
          gamma_hat(gamma_hat) {}
    double gamma_hat;
};

// Iterative solver ran out of iterations; carries the best iterate seen.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(std::string what, std::vector<double> best,
                     double residual, int iterations)
        : std::runtime_error(std::move(what)), best_point(std::move(best)),
          residual(residual), iterations(iterations) {}
    std::vector<double> best_point;
    double residual;
    int iterations;
};

} // namespace tailex
