#include "tailex/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tailex/quadrature.hpp"

namespace tailex {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// (u^{-1/t} + v^{-1/t})^{-t} evaluated in log space so extreme u,v stay
// exact. Real is double or long double.
template <class Real>
Real archimedean_lambda_t(Real u, Real v, Real t) {
    if (u <= 0 || v <= 0) return Real(0);
    const Real a = -std::log(u) / t;
    const Real b = -std::log(v) / t;
    const Real m = std::max(a, b);
    const Real lse = m + std::log1p(std::exp(-std::fabs(a - b)));
    return std::exp(-t * lse);
}

template <class Real>
Real lambda_t(const TailDependenceModel& model, Real u, Real v) {
    switch (model.kind()) {
    case TailDependenceModel::Kind::independent: return Real(0);
    case TailDependenceModel::Kind::comonotonic: return std::min(u, v);
    case TailDependenceModel::Kind::archimedean:
        return archimedean_lambda_t<Real>(u, v, Real(model.theta_psi()));
    case TailDependenceModel::Kind::tabulated:
        return Real(
            model.lambda(static_cast<double>(u), static_cast<double>(v)));
    }
    return Real(0);
}

// integral_{lower}^{inf} lambda(r t^{-theta}, 1) dt with lower = b_i/b_k and
// r = c_i/c_k. Split at the kink t* = r^{1/theta}; the tail piece uses
// w = t^{-(theta-1)} which keeps the integrand bounded for every theta > 1.
template <class Real>
Real integral_lambda_tail_t(const TailDependenceModel& model, Real theta,
                            Real c_i, Real c_k, Real beta_i, Real beta_k,
                            Real rel_tol) {
    if (!(theta > 1))
        throw std::domain_error(
            "integral_lambda_tail: divergent for theta <= 1");
    require(c_i > 0 && c_k > 0, "integral_lambda_tail: c must be > 0");
    require(beta_i >= 0 && beta_k > 0, "integral_lambda_tail: invalid beta");
    if (model.kind() == TailDependenceModel::Kind::independent) return Real(0);

    const Real r = c_i / c_k;
    const Real lower = beta_i / beta_k;
    const Real t_kink = std::pow(r, Real(1) / theta);

    auto lam_of_t = [&](Real t) {
        if (t <= 0) return lambda_t<Real>(model, Real(1e300), Real(1));
        return lambda_t<Real>(model, r * std::pow(t, -theta), Real(1));
    };

    Real total = 0;
    if (lower < t_kink) {
        total +=
            adaptive_simpson_any<Real>(lam_of_t, lower, t_kink, rel_tol);
    }

    const Real T = std::max(lower, t_kink);
    const Real p = theta / (theta - 1);
    const Real w_hi = std::pow(T, -(theta - 1));
    Real kappa0 = 1; // lim lambda(x,1)/x as x -> 0 (=1 for min/archimedean)
    if (model.kind() == TailDependenceModel::Kind::tabulated) {
        kappa0 = Real(model.lambda(1e-12, 1.0) / 1e-12);
    }
    auto g = [&](Real w) {
        if (w <= 0) return r * kappa0;
        const Real x = r * std::pow(w, p);
        return lambda_t<Real>(model, x, Real(1)) * std::pow(w, -p);
    };
    total += adaptive_simpson_any<Real>(g, Real(0), w_hi, rel_tol) /
             (theta - 1);
    return total;
}

// Residual of the limit system at (eta, beta), extended precision so the
// comonotonic boundary (a double root of the system) stays resolvable.
template <class Real>
std::vector<Real> limit_residual_t(Real theta, std::span<const double> c,
                                   const TailDependenceModel& model, Real eta,
                                   const std::vector<Real>& beta,
                                   Real quad_tol) {
    const std::size_t d = c.size();
    std::vector<Real> res(d);
    for (std::size_t k = 0; k < d; ++k) {
        const Real ck = Real(c[k]);
        Real r = Real(1) / (theta - 1) -
                 eta * std::pow(beta[k], theta) / ck;
        for (std::size_t i = 0; i < d; ++i) {
            if (i == k) continue;
            r += integral_lambda_tail_t<Real>(model, theta, Real(c[i]), ck,
                                              beta[i], beta[k], quad_tol);
            r -= eta * std::pow(beta[k], theta - 1) * beta[i] / ck;
        }
        res[k] = r;
    }
    return res;
}

} // namespace

TailDependenceModel TailDependenceModel::independent() {
    return TailDependenceModel(Kind::independent, 0.0, nullptr);
}

TailDependenceModel TailDependenceModel::comonotonic() {
    return TailDependenceModel(Kind::comonotonic, 0.0, nullptr);
}

TailDependenceModel TailDependenceModel::archimedean(double theta_psi) {
    require(theta_psi > 0.0, "archimedean model: theta_psi must be > 0");
    return TailDependenceModel(Kind::archimedean, theta_psi, nullptr);
}

TailDependenceModel TailDependenceModel::tabulated(
    std::function<double(double, double)> fn) {
    require(static_cast<bool>(fn), "tabulated model: empty function");
    // Admission check: 0 <= lambda <= min and 1-homogeneity on a fixed grid.
    const double us[] = {0.05, 0.3, 0.7, 1.0, 2.5};
    const double ts[] = {0.25, 0.5, 2.0, 7.5};
    for (double u : us) {
        for (double v : us) {
            const double l = fn(u, v);
            if (!(l >= -1e-12 && l <= std::min(u, v) + 1e-12))
                throw std::invalid_argument(
                    "tabulated model: violates 0 <= lambda <= min(u,v)");
            for (double t : ts) {
                if (std::fabs(fn(t * u, t * v) - t * l) >
                    1e-9 * (1.0 + t * std::fabs(l)))
                    throw std::invalid_argument(
                        "tabulated model: violates 1-homogeneity");
            }
        }
    }
    return TailDependenceModel(Kind::tabulated, 0.0, std::move(fn));
}

double TailDependenceModel::lambda(double u, double v) const {
    switch (kind_) {
    case Kind::independent: return 0.0;
    case Kind::comonotonic: return std::min(u, v);
    case Kind::archimedean: return archimedean_lambda_t<double>(u, v, theta_psi_);
    case Kind::tabulated: return fn_(u, v);
    }
    return 0.0;
}

double integral_lambda_tail(const TailDependenceModel& model, double theta,
                            double c_i, double c_k, double beta_i,
                            double beta_k, double rel_tol) {
    return integral_lambda_tail_t<double>(model, theta, c_i, c_k, beta_i,
                                          beta_k, rel_tol);
}

namespace {

void check_c(double theta, std::span<const double> c) {
    require(theta > 1.0, "limit: theta must be > 1");
    require(!c.empty() && c[0] == 1.0,
            "limit: c must be nonempty with c[0] == 1");
    for (double v : c) require(v > 0.0, "limit: c entries must be > 0");
}

} // namespace

LimitVector limit_comonotonic(double theta, std::span<const double> c) {
    check_c(theta, c);
    LimitVector out;
    out.eta = 1.0 / (theta - 1.0);
    out.beta.reserve(c.size());
    for (double ck : c) out.beta.push_back(std::pow(ck, 1.0 / theta));
    return out;
}

LimitVector limit_independent(double theta, std::span<const double> c) {
    check_c(theta, c);
    LimitVector out;
    out.beta.reserve(c.size());
    double sum = 0.0;
    for (double ck : c) {
        out.beta.push_back(std::pow(ck, 1.0 / (theta - 1.0)));
        sum += out.beta.back();
    }
    out.eta = 1.0 / ((theta - 1.0) * sum);
    return out;
}

LimitVector limit_dominant(double theta, std::size_t d) {
    require(theta > 1.0, "limit: theta must be > 1");
    require(d >= 1, "limit: dimension must be >= 1");
    LimitVector out;
    out.eta = 1.0 / (theta - 1.0);
    out.beta.assign(d, 0.0);
    out.beta[0] = 1.0;
    return out;
}

std::vector<double> limit_independent_weighted(double theta,
                                               std::span<const double> c,
                                               const WeightMatrix& weights) {
    check_c(theta, c);
    require(weights.dim() == c.size(), "limit: weights dimension mismatch");
    const std::size_t d = c.size();
    std::vector<double> eta(d);
    for (std::size_t k = 0; k < d; ++k) {
        double denom = 1.0;
        for (std::size_t j = 1; j < d; ++j) {
            denom += weights(j, k) / weights(k, k) *
                     std::pow(c[j], 1.0 / (theta - 1.0));
        }
        eta[k] = std::pow(c[k], 1.0 / (theta - 1.0)) /
                 ((theta - 1.0) * denom);
    }
    return eta;
}

namespace {

using Real = long double;

Real max_abs(const std::vector<Real>& v) {
    Real m = 0;
    for (Real t : v) m = std::max(m, std::fabs(t));
    return m;
}

// Change-of-variable form of the system: substituting s = t beta_k in every
// integral and folding the Karamata term through lambda^{kk} = min turns
// equation k into
//   sum_i integral_{beta_i}^{inf}
//         lambda^{ik}(c_i t^-theta, c_k beta_k^-theta) dt = eta sum_i beta_i,
// the same right-hand side for every k. Verified here at the solution.
void cross_check_equivalent_form(double theta, std::span<const double> c,
                                 const TailDependenceModel& model,
                                 const LimitVector& lv, double atol) {
    const std::size_t d = c.size();
    double target = 0.0;
    for (double b : lv.beta) target += b;
    target *= lv.eta;
    const TailDependenceModel diagonal = TailDependenceModel::comonotonic();
    for (std::size_t k = 0; k < d; ++k) {
        const double v = c[k] * std::pow(lv.beta[k], -theta);
        double lhs = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            // lambda(c_i t^-theta, v) = v lambda((c_i/v) t^-theta, 1); the
            // diagonal tail dependence function is min for any model.
            const TailDependenceModel& mdl = (i == k) ? diagonal : model;
            lhs += v * integral_lambda_tail(mdl, theta, c[i], v, lv.beta[i],
                                            1.0);
        }
        if (std::fabs(lhs - target) > atol * (1.0 + std::fabs(target))) {
            throw ConvergenceError(
                "limit system solution fails the equivalent-form cross-check",
                lv.beta, std::fabs(lhs - target), 0);
        }
    }
}

struct LimitState {
    std::vector<Real> u; // u[0] = log eta, u[k] = log beta_k
    std::vector<Real> res;
    Real norm = 0;
};

} // namespace

std::vector<double> limit_system_residual(double theta,
                                          std::span<const double> c,
                                          const TailDependenceModel& model,
                                          const LimitVector& candidate) {
    check_c(theta, c);
    require(candidate.beta.size() == c.size(),
            "limit_system_residual: dimension mismatch");
    std::vector<Real> beta(candidate.beta.begin(), candidate.beta.end());
    const auto res = limit_residual_t<Real>(Real(theta), c, model,
                                            Real(candidate.eta), beta,
                                            Real(1e-12L));
    return {res.begin(), res.end()};
}

LimitVector solve_limit_system(double theta, std::span<const double> c,
                               const TailDependenceModel& model,
                               const LimitVector& init, double tol,
                               int max_iter) {
    check_c(theta, c);
    const std::size_t d = c.size();
    require(init.beta.size() == d && init.beta[0] == 1.0,
            "solve_limit_system: init.beta must match c with beta[0]=1");
    require(init.eta > 0.0, "solve_limit_system: init.eta must be > 0");
    for (double b : init.beta)
        require(b > 0.0, "solve_limit_system: init.beta must be > 0");
    require(tol > 0.0, "solve_limit_system: tol must be > 0");

    const Real quad_tol = Real(1e-13L);
    const Real th = Real(theta);

    auto eval = [&](const std::vector<Real>& u) {
        std::vector<Real> beta(d);
        beta[0] = 1;
        for (std::size_t k = 1; k < d; ++k) beta[k] = std::exp(u[k]);
        return limit_residual_t<Real>(th, c, model, std::exp(u[0]), beta,
                                      quad_tol);
    };

    LimitState st;
    st.u.assign(d, 0);
    st.u[0] = std::log(Real(init.eta));
    for (std::size_t k = 1; k < d; ++k) st.u[k] = std::log(Real(init.beta[k]));
    st.res = eval(st.u);
    st.norm = max_abs(st.res);

    LimitState best = st;
    Real prev_step = -1;
    bool geometric = false;
    int failures = 0;
    int iters = 0;

    std::vector<double> J(d * d), du(d);
    std::vector<Real> ut(d);
    for (; iters < max_iter; ++iters) {
        const Real unorm = [&] {
            Real s = 0;
            for (Real v : st.u) s += v * v;
            return std::sqrt(s);
        }();
        if (st.norm <= Real(tol) && prev_step >= 0 &&
            prev_step <= Real(1e-11) * (1 + unorm))
            break;

        // Central-difference Jacobian (double precision is plenty for the
        // step direction).
        for (std::size_t j = 0; j < d; ++j) {
            const Real h = Real(1e-7L);
            ut = st.u;
            ut[j] = st.u[j] + h;
            const auto rp = eval(ut);
            ut[j] = st.u[j] - h;
            const auto rm = eval(ut);
            for (std::size_t k = 0; k < d; ++k)
                J[k * d + j] =
                    static_cast<double>((rp[k] - rm[k]) / (2 * h));
        }
        // Solve J du = -res by Gaussian elimination with partial pivoting;
        // on a (near-)singular pivot fall back to gradient descent on the
        // squared residual.
        {
            std::vector<double> A = J;
            std::vector<double> b(d);
            for (std::size_t k = 0; k < d; ++k)
                b[k] = -static_cast<double>(st.res[k]);
            std::vector<std::size_t> piv(d);
            for (std::size_t i = 0; i < d; ++i) piv[i] = i;
            bool singular = false;
            for (std::size_t col = 0; col < d; ++col) {
                std::size_t sel = col;
                for (std::size_t row = col + 1; row < d; ++row)
                    if (std::fabs(A[piv[row] * d + col]) >
                        std::fabs(A[piv[sel] * d + col]))
                        sel = row;
                if (std::fabs(A[piv[sel] * d + col]) < 1e-300) {
                    singular = true;
                    break;
                }
                std::swap(piv[col], piv[sel]);
                for (std::size_t row = col + 1; row < d; ++row) {
                    const double f =
                        A[piv[row] * d + col] / A[piv[col] * d + col];
                    for (std::size_t j2 = col; j2 < d; ++j2)
                        A[piv[row] * d + j2] -= f * A[piv[col] * d + j2];
                    b[piv[row]] -= f * b[piv[col]];
                }
            }
            if (!singular) {
                for (std::size_t col = d; col-- > 0;) {
                    double s = b[piv[col]];
                    for (std::size_t j2 = col + 1; j2 < d; ++j2)
                        s -= A[piv[col] * d + j2] * du[j2];
                    du[col] = s / A[piv[col] * d + col];
                }
            } else {
                for (std::size_t j = 0; j < d; ++j) {
                    double g = 0.0;
                    for (std::size_t k = 0; k < d; ++k)
                        g += J[k * d + j] * static_cast<double>(st.res[k]);
                    du[j] = -g;
                }
            }
        }
        // Trust clamp on the log scale.
        double ndu = 0.0;
        for (double v : du) ndu += v * v;
        ndu = std::sqrt(ndu);
        if (!(ndu > 0.0) || !std::isfinite(ndu)) break;
        if (ndu > 2.0)
            for (double& v : du) v *= 2.0 / ndu;

        // Backtracking scan; a leading factor 2 restores fast convergence on
        // the comonotonic boundary where the root has multiplicity 2.
        bool accepted = false;
        const double t0 = geometric ? 2.0 : 1.0;
        for (double t = t0; t >= 1.0 / 1024.0; t *= 0.5) {
            for (std::size_t j = 0; j < d; ++j)
                ut[j] = st.u[j] + Real(t) * Real(du[j]);
            const auto rt = eval(ut);
            const Real nt = max_abs(rt);
            if (std::isfinite(static_cast<double>(nt)) && nt < st.norm) {
                Real stepn = 0;
                for (std::size_t j = 0; j < d; ++j) {
                    const Real sj = Real(t) * Real(du[j]);
                    stepn += sj * sj;
                }
                stepn = std::sqrt(stepn);
                geometric = prev_step > 0 && stepn > Real(0.35) * prev_step &&
                            stepn < Real(0.75) * prev_step;
                prev_step = stepn;
                st.u = ut;
                st.res = rt;
                st.norm = nt;
                accepted = true;
                failures = 0;
                break;
            }
        }
        if (!accepted) {
            // Parabola-vertex polish along the last Newton direction: near a
            // double root the projected residual is quadratic, and a wide
            // stencil reads its vertex far above the noise floor.
            bool polished = false;
            if (st.norm < Real(1e-5) && ndu > 0.0) {
                for (double h : {1e-4, 1e-5}) {
                    auto phi = [&](double s) {
                        for (std::size_t j = 0; j < d; ++j)
                            ut[j] = st.u[j] + Real(s * du[j] / ndu);
                        const auto r = eval(ut);
                        Real acc = 0;
                        for (std::size_t k = 0; k < d; ++k)
                            acc += Real(du[k] / ndu) * r[k];
                        return static_cast<double>(acc);
                    };
                    const double p0 = phi(0.0), pp = phi(h), pm = phi(-h);
                    const double denom = pp - 2.0 * p0 + pm;
                    if (denom == 0.0) continue;
                    const double s0 = 0.5 * h * (pm - pp) / denom;
                    if (!(std::fabs(s0) <= 50.0 * h)) continue;
                    for (std::size_t j = 0; j < d; ++j)
                        ut[j] = st.u[j] + Real(s0 * du[j] / ndu);
                    const auto rt = eval(ut);
                    const Real nt = max_abs(rt);
                    if (nt < st.norm) {
                        st.u = ut;
                        st.res = rt;
                        st.norm = nt;
                        prev_step = Real(std::fabs(s0));
                        polished = true;
                    }
                }
            }
            if (!polished && ++failures >= 2) break;
        }
        if (st.norm < best.norm) best = st;
    }
    if (st.norm < best.norm) best = st;

    if (best.norm <= Real(tol)) {
        LimitVector out;
        out.eta = static_cast<double>(std::exp(best.u[0]));
        out.beta.assign(d, 1.0);
        for (std::size_t k = 1; k < d; ++k)
            out.beta[k] = static_cast<double>(std::exp(best.u[k]));
        cross_check_equivalent_form(theta, c, model, out,
                                    std::max(1e3 * tol, 1e-8));
        return out;
    }
    std::vector<double> bb(d, 1.0);
    for (std::size_t k = 1; k < d; ++k)
        bb[k] = static_cast<double>(std::exp(best.u[k]));
    throw ConvergenceError("limit system solver did not converge", bb,
                           static_cast<double>(best.norm), iters);
}

std::vector<double> asymptotic_expectile_approx(std::span<const Margin> margins,
                                                const LimitVector& limit,
                                                double alpha) {
    require(!margins.empty(), "asymptotic approx: empty margins");
    require(limit.dim() == margins.size(),
            "asymptotic approx: limit dimension mismatch");
    require(alpha > 0.0 && alpha < 1.0, "asymptotic approx: alpha in (0,1)");
    const double theta = margins[0].tail_index();
    const double var1 = margins[0].quantile(alpha);
    const double scale = var1 * std::pow(limit.eta, 1.0 / theta);
    std::vector<double> out(margins.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = scale * limit.beta[k];
    return out;
}

} // namespace tailex
