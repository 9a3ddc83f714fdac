#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tailex/errors.hpp"
#include "tailex/margins.hpp"

namespace tailex {

enum class Dependence { independent, comonotonic };

// Symmetric d x d matrix of nonnegative weights with strictly positive
// diagonal. The all-ones matrix encodes the L1-expectile.
class WeightMatrix {
public:
    static WeightMatrix all_ones(std::size_t d);
    static WeightMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t dim() const { return d_; }
    double operator()(std::size_t i, std::size_t j) const {
        return entries_[i * d_ + j];
    }
    bool is_all_ones() const;

private:
    WeightMatrix(std::size_t d, std::vector<double> entries);
    std::size_t d_ = 0;
    std::vector<double> entries_;
};

struct ExpectileProblem {
    std::vector<Margin> margins;
    WeightMatrix weights;
    Dependence dependence = Dependence::independent;
    double alpha = 0.5;

    std::size_t dim() const { return margins.size(); }
    void validate() const; // throws std::invalid_argument
};

struct ExpectileSolution {
    std::vector<double> point;
    double residual_norm = 0.0;
    int iterations = 0;
};

// l^alpha_{X_i,X_i}(x,x) = alpha E[(X-x)+] - (1-alpha) E[(x-X)+].
double self_term(double alpha, const Margin& m, double x);

// Independent pair term:
//   alpha sf_j(x_j) E[(X_i-x_i)+] - (1-alpha) F_j(x_j) E[(x_i-X_i)+].
double pair_term_independent(double alpha, const Margin& mi, const Margin& mj,
                             double xi, double xj);

// mu_ij with F_i(mu_ij) = F_j(x_j): closed form for same-family pairs with a
// common shape, numeric quantile matching otherwise.
double pseudo_inverse_match(const Margin& mi, const Margin& mj, double xj);

// Comonotonic pair term:
//   alpha ( sf_j(x_j)(mu-x_i)+ + E[(X_i-max(x_i,mu))+] )
// - (1-alpha) ( F_j(x_j)(x_i-mu)+ + E[(min(x_i,mu)-X_i)+] ).
double pair_term_comonotonic(double alpha, const Margin& mi, const Margin& mj,
                             double xi, double xj);

// k-th entry: pi_kk l_k(x_k) + sum_{i != k} pi_ki l_{i,k}(x_i, x_k) using the
// dependence-appropriate pair term; all entries vanish at the expectile.
std::vector<double> system_residual(const ExpectileProblem& problem,
                                    std::span<const double> x);

// Root of self_term in x; strictly increasing in alpha; exact mean at 1/2.
double univariate_expectile(const Margin& m, double alpha,
                            double tol = 1e-12);

// Damped Newton on the scaled residual (each component divided by
// 1 + |x_k| sf_k(x_k)) with a Gauss-Seidel bisection sweep as fallback;
// initial point is the vector of univariate expectiles. Deterministic.
// Throws ConvergenceError with the best iterate after max_iter.
ExpectileSolution solve_multivariate_expectile(const ExpectileProblem& problem,
                                               double tol = 1e-9,
                                               int max_iter = 200);

} // namespace tailex
