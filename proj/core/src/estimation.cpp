#include "tailex/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tailex {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Top m values of `values`, descending.
std::vector<double> top_values(std::span<const double> values, std::size_t m) {
    std::vector<double> v(values.begin(), values.end());
    std::partial_sort(v.begin(), v.begin() + m, v.end(),
                      std::greater<double>());
    v.resize(m);
    return v;
}

double row_norm(const SampleMatrix& s, std::size_t row, RowNorm norm) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.d; ++j) {
        const double a = std::fabs(s.at(row, j));
        acc = norm == RowNorm::l1 ? acc + a : std::max(acc, a);
    }
    return acc;
}

} // namespace

std::vector<double> SampleMatrix::column(std::size_t col) const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = at(i, col);
    return out;
}

void SampleMatrix::validate() const {
    require(n >= 2, "samples: need at least two observations");
    require(d >= 1, "samples: need at least one column");
    require(data.size() == n * d, "samples: data size != n*d");
}

double kth_upper_order_stat(std::span<const double> values, std::size_t k) {
    if (k < 1 || k > values.size())
        throw std::out_of_range("kth_upper_order_stat: k outside [1, n]");
    std::vector<double> v(values.begin(), values.end());
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end(),
                     std::greater<double>());
    return v[k - 1];
}

double hill_estimator(std::span<const double> values, std::size_t k) {
    const std::size_t n = values.size();
    if (k < 2 || k >= n)
        throw std::out_of_range("hill_estimator: need 2 <= k < n");
    const std::vector<double> top = top_values(values, k + 1);
    const double threshold = top[k]; // (k+1)-th largest
    if (!(threshold > 0.0))
        throw std::domain_error(
            "hill_estimator: top k+1 values must be strictly positive");
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += std::log(top[i] / threshold);
    return acc / static_cast<double>(k);
}

std::vector<double> tail_equivalence_estimates(const SampleMatrix& samples,
                                               std::size_t k,
                                               double gamma_hat) {
    samples.validate();
    require(k >= 1 && k < samples.n,
            "tail_equivalence_estimates: need 1 <= k < n");
    require(gamma_hat > 0.0,
            "tail_equivalence_estimates: gamma_hat must be > 0");
    std::vector<double> thresholds(samples.d);
    for (std::size_t j = 0; j < samples.d; ++j) {
        thresholds[j] = kth_upper_order_stat(samples.column(j), k);
        if (!(thresholds[j] > 0.0))
            throw std::domain_error(
                "tail_equivalence_estimates: nonpositive threshold in column " +
                std::to_string(j + 1) + " at this k");
    }
    std::vector<double> c_hat(samples.d);
    c_hat[0] = 1.0;
    for (std::size_t j = 1; j < samples.d; ++j)
        c_hat[j] = std::pow(thresholds[j] / thresholds[0], 1.0 / gamma_hat);
    return c_hat;
}

double weissman_quantile(std::span<const double> column, std::size_t k,
                         double gamma_hat, double alpha) {
    const std::size_t n = column.size();
    require(k >= 1 && k < n, "weissman_quantile: need 1 <= k < n");
    require(alpha > 0.0 && alpha < 1.0,
            "weissman_quantile: alpha outside (0,1)");
    const double threshold = kth_upper_order_stat(column, k);
    const double factor = static_cast<double>(k) /
                          ((1.0 - alpha) * static_cast<double>(n));
    return threshold * std::pow(factor, gamma_hat);
}

TailEstimates estimate_tail(const SampleMatrix& samples, std::size_t k,
                            RowNorm norm) {
    samples.validate();
    std::vector<double> norms(samples.n);
    for (std::size_t i = 0; i < samples.n; ++i)
        norms[i] = row_norm(samples, i, norm);
    TailEstimates est;
    est.gamma_hat = hill_estimator(norms, k);
    est.c_hat = tail_equivalence_estimates(samples, k, est.gamma_hat);
    est.k = k;
    return est;
}

std::vector<double> extreme_expectile_from_estimates(double var_hat,
                                                     const TailEstimates& est,
                                                     Dependence dependence) {
    const double g = est.gamma_hat;
    if (!(g < 1.0)) throw HeavyTailError(g);
    require(g > 0.0, "extreme expectile: gamma_hat must be > 0");
    const double base = var_hat * std::pow(g / (1.0 - g), g);
    const std::size_t d = est.c_hat.size();
    std::vector<double> out(d);
    if (dependence == Dependence::independent) {
        double denom = 1.0;
        for (std::size_t j = 1; j < d; ++j)
            denom += std::pow(est.c_hat[j], g / (1.0 - g));
        const double shared = base * std::pow(denom, -g);
        out[0] = shared;
        for (std::size_t j = 1; j < d; ++j)
            out[j] = shared * std::pow(est.c_hat[j], g / (1.0 - g));
    } else {
        out[0] = base;
        for (std::size_t j = 1; j < d; ++j)
            out[j] = base * std::pow(est.c_hat[j], g);
    }
    return out;
}

namespace {

std::vector<double> extreme_expectile(const SampleMatrix& samples,
                                      std::size_t k, double alpha,
                                      RowNorm norm, Dependence dependence) {
    const TailEstimates est = estimate_tail(samples, k, norm);
    const double var_hat =
        weissman_quantile(samples.column(0), k, est.gamma_hat, alpha);
    return extreme_expectile_from_estimates(var_hat, est, dependence);
}

} // namespace

std::vector<double> extreme_expectile_independent(const SampleMatrix& samples,
                                                  std::size_t k, double alpha,
                                                  RowNorm norm) {
    return extreme_expectile(samples, k, alpha, norm,
                             Dependence::independent);
}

std::vector<double> extreme_expectile_comonotonic(const SampleMatrix& samples,
                                                  std::size_t k, double alpha,
                                                  RowNorm norm) {
    return extreme_expectile(samples, k, alpha, norm,
                             Dependence::comonotonic);
}

double k_growth_diagnostic(std::size_t n, std::size_t k, double alpha) {
    require(n >= 1 && k >= 1 && k < n, "k_growth_diagnostic: need 1 <= k < n");
    require(alpha > 0.0 && alpha < 1.0,
            "k_growth_diagnostic: alpha outside (0,1)");
    const double lg = std::log(static_cast<double>(k) /
                               (static_cast<double>(n) * (1.0 - alpha)));
    return std::sqrt(static_cast<double>(k)) / std::sqrt(1.0 + lg * lg);
}

} // namespace tailex
