#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tailex/expectile.hpp"
#include "tailex/margins.hpp"

namespace tailex {

// Limit of ((1-alpha)/sf_1(e^1), e^2/e^1, ..., e^d/e^1) as alpha -> 1.
struct LimitVector {
    double eta = 0.0;
    std::vector<double> beta; // beta[0] == 1

    std::size_t dim() const { return beta.size(); }
};

// Bivariate upper tail dependence function lambda(u,v):
//   independent   0
//   comonotonic   min(u,v)
//   archimedean   (u^{-1/t} + v^{-1/t})^{-t},  t = theta_psi > 0
//   tabulated     caller-supplied; must be 1-homogeneous with
//                 0 <= lambda <= min (validated on construction).
class TailDependenceModel {
public:
    enum class Kind { independent, comonotonic, archimedean, tabulated };

    static TailDependenceModel independent();
    static TailDependenceModel comonotonic();
    static TailDependenceModel archimedean(double theta_psi);
    static TailDependenceModel tabulated(
        std::function<double(double, double)> fn);

    double lambda(double u, double v) const;
    Kind kind() const { return kind_; }
    double theta_psi() const { return theta_psi_; }

private:
    TailDependenceModel(Kind k, double tp,
                        std::function<double(double, double)> fn)
        : kind_(k), theta_psi_(tp), fn_(std::move(fn)) {}
    Kind kind_;
    double theta_psi_ = 0.0;
    std::function<double(double, double)> fn_;
};

// integral_{beta_i/beta_k}^{inf} lambda((c_i/c_k) t^{-theta}, 1) dt.
// Adaptive Simpson split at the kink t* = (c_i/c_k)^{1/theta}, with the tail
// piece mapped through w = t^{-(theta-1)} so the integrand stays bounded for
// every theta > 1. Throws std::domain_error for theta <= 1 (divergent).
double integral_lambda_tail(const TailDependenceModel& model, double theta,
                            double c_i, double c_k, double beta_i,
                            double beta_k, double rel_tol = 1e-11);

// Closed forms. c must have c[0] == 1.
LimitVector limit_comonotonic(double theta, std::span<const double> c);
LimitVector limit_independent(double theta, std::span<const double> c);
LimitVector limit_dominant(double theta, std::size_t d);

// Per-component limits eta_k of (1-alpha)/sf_k(e^k) for a general weight
// matrix under asymptotic independence; beta is unchanged from
// limit_independent.
std::vector<double> limit_independent_weighted(double theta,
                                               std::span<const double> c,
                                               const WeightMatrix& weights);

// Residual of the limit system at a candidate limit vector; all entries are
// zero exactly at a solution.
std::vector<double> limit_system_residual(double theta,
                                          std::span<const double> c,
                                          const TailDependenceModel& model,
                                          const LimitVector& candidate);

// Damped Newton on (eta, beta_2..beta_d) in log coordinates for the system
//   1/(theta-1) - eta beta_k^theta / c_k
//     = -sum_{i != k} ( I_ik - eta beta_k^{theta-1} beta_i / c_k ),
// I_ik = integral_lambda_tail(i,k). After convergence the solution is
// cross-checked against the equivalent change-of-variable form of the system
// (both sides written as integrals against lambda); failure of either throws
// ConvergenceError with the best iterate.
LimitVector solve_limit_system(double theta, std::span<const double> c,
                               const TailDependenceModel& model,
                               const LimitVector& init, double tol = 1e-10,
                               int max_iter = 100);

// e_alpha ~ VaR_alpha(X_1) * eta^{1/theta} * (1, beta_2, ..., beta_d).
std::vector<double> asymptotic_expectile_approx(std::span<const Margin> margins,
                                                const LimitVector& limit,
                                                double alpha);

} // namespace tailex
