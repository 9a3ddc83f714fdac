#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tailex/errors.hpp"
#include "tailex/expectile.hpp"

namespace tailex {

// Row-major n x d observation matrix, one row per observation.
struct SampleMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> data;

    double at(std::size_t row, std::size_t col) const {
        return data[row * d + col];
    }
    std::vector<double> column(std::size_t col) const;
    void validate() const; // n >= 2, data size n*d
};

enum class RowNorm { l1, max };

// k-th largest value of a column (k = 1 is the maximum). Ties keep value.
double kth_upper_order_stat(std::span<const double> values, std::size_t k);

// Hill estimator over the k largest values with threshold the (k+1)-th
// largest: gamma_hat = (1/k) sum_{i=1..k} log(Z_(n-i+1) / Z_(n-k)).
// Requires 2 <= k < n and a strictly positive top k+1.
double hill_estimator(std::span<const double> values, std::size_t k);

// c_hat_i = (X_{i,(n-k+1)} / X_{1,(n-k+1)})^{1/gamma_hat}; c_hat_1 = 1.
// Thresholds (the k-th largest per column) must be strictly positive.
std::vector<double> tail_equivalence_estimates(const SampleMatrix& samples,
                                               std::size_t k,
                                               double gamma_hat);

// Weissman extrapolation: X_{(n-k+1)} * (k / ((1-alpha) n))^{gamma_hat}.
double weissman_quantile(std::span<const double> column, std::size_t k,
                         double gamma_hat, double alpha);

struct TailEstimates {
    double gamma_hat = 0.0;
    std::vector<double> c_hat; // c_hat[0] == 1
    std::size_t k = 0;
};

// gamma_hat from the row norms, c_hat from the per-column thresholds,
// all at the same k.
TailEstimates estimate_tail(const SampleMatrix& samples, std::size_t k,
                            RowNorm norm = RowNorm::l1);

// Plug-in arithmetic shared by the two extreme-expectile estimators; throws
// HeavyTailError when gamma_hat >= 1.
std::vector<double> extreme_expectile_from_estimates(double var_hat,
                                                     const TailEstimates& est,
                                                     Dependence dependence);

std::vector<double> extreme_expectile_independent(const SampleMatrix& samples,
                                                  std::size_t k, double alpha,
                                                  RowNorm norm = RowNorm::l1);
std::vector<double> extreme_expectile_comonotonic(const SampleMatrix& samples,
                                                  std::size_t k, double alpha,
                                                  RowNorm norm = RowNorm::l1);

// sqrt(k) (1 + log^2(k/(n(1-alpha))))^{-1/2}; larger means the consistency
// theorem's intermediate-sequence condition is better satisfied.
double k_growth_diagnostic(std::size_t n, std::size_t k, double alpha);

} // namespace tailex
