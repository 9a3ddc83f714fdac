#include "tailex/expectile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tailex {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

WeightMatrix::WeightMatrix(std::size_t d, std::vector<double> entries)
    : d_(d), entries_(std::move(entries)) {}

WeightMatrix WeightMatrix::all_ones(std::size_t d) {
    require(d >= 1, "weights: dimension must be >= 1");
    return WeightMatrix(d, std::vector<double>(d * d, 1.0));
}

WeightMatrix WeightMatrix::from_rows(
    const std::vector<std::vector<double>>& rows) {
    const std::size_t d = rows.size();
    require(d >= 1, "weights: dimension must be >= 1");
    std::vector<double> e(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        require(rows[i].size() == d, "weights: matrix must be square");
        for (std::size_t j = 0; j < d; ++j) e[i * d + j] = rows[i][j];
    }
    for (std::size_t i = 0; i < d; ++i) {
        require(e[i * d + i] > 0.0, "weights: diagonal entries must be > 0");
        for (std::size_t j = 0; j < d; ++j) {
            require(e[i * d + j] >= 0.0, "weights: entries must be >= 0");
            require(e[i * d + j] == e[j * d + i], "weights: must be symmetric");
        }
    }
    return WeightMatrix(d, std::move(e));
}

bool WeightMatrix::is_all_ones() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](double v) { return v == 1.0; });
}

void ExpectileProblem::validate() const {
    require(!margins.empty(), "problem: needs at least one margin");
    require(weights.dim() == margins.size(),
            "problem: weights dimension does not match margins");
    require(alpha > 0.0 && alpha < 1.0, "problem: alpha outside (0,1)");
}

double self_term(double alpha, const Margin& m, double x) {
    return alpha * m.upper_partial_moment(x) -
           (1.0 - alpha) * m.lower_partial_moment(x);
}

double pair_term_independent(double alpha, const Margin& mi, const Margin& mj,
                             double xi, double xj) {
    const double sj = mj.survival(xj);
    return alpha * sj * mi.upper_partial_moment(xi) -
           (1.0 - alpha) * (1.0 - sj) * mi.lower_partial_moment(xi);
}

double pseudo_inverse_match(const Margin& mi, const Margin& mj, double xj) {
    // Same family with a common shape: the match is affine in x_j.
    const auto& fi = mi.family();
    const auto& fj = mj.family();
    const double tj = (xj - mj.location()) / mj.scale_mult();
    if (const auto* pi = std::get_if<ParetoParams>(&fi)) {
        if (const auto* pj = std::get_if<ParetoParams>(&fj);
            pj && pi->shape == pj->shape) {
            const double mu0 = pi->scale / pj->scale * tj;
            return mi.location() + mi.scale_mult() * mu0;
        }
    } else if (const auto* bi = std::get_if<BurrParams>(&fi)) {
        if (const auto* bj = std::get_if<BurrParams>(&fj);
            bj && bi->shape == bj->shape && bi->tau == bj->tau) {
            const double mu0 =
                std::pow(bi->scale / bj->scale, 1.0 / bi->tau) * tj;
            return mi.location() + mi.scale_mult() * mu0;
        }
    } else if (const auto* si = std::get_if<StudentParams>(&fi)) {
        if (const auto* sj = std::get_if<StudentParams>(&fj);
            sj && si->dof == sj->dof) {
            const double mu0 = si->scale / sj->scale * tj;
            return mi.location() + mi.scale_mult() * mu0;
        }
    }
    // General numeric match through the survival scale.
    const double q = mj.survival(xj);
    if (q >= 1.0) return mi.left_endpoint();
    return mi.quantile_from_survival(
        std::max(q, std::numeric_limits<double>::min()));
}

double pair_term_comonotonic(double alpha, const Margin& mi, const Margin& mj,
                             double xi, double xj) {
    const double mu = pseudo_inverse_match(mi, mj, xj);
    const double sj = mj.survival(xj);
    const double up = sj * std::max(mu - xi, 0.0) +
                      mi.upper_partial_moment(std::max(xi, mu));
    double down = (1.0 - sj) * std::max(xi - mu, 0.0);
    if (std::isfinite(mu)) {
        down += mi.lower_partial_moment(std::min(xi, mu));
    } // mu at -inf: no mass below min(x_i, mu)
    return alpha * up - (1.0 - alpha) * down;
}

namespace {

double pair_term(const ExpectileProblem& p, std::size_t i, std::size_t k,
                 double xi, double xk) {
    return p.dependence == Dependence::independent
               ? pair_term_independent(p.alpha, p.margins[i], p.margins[k], xi,
                                       xk)
               : pair_term_comonotonic(p.alpha, p.margins[i], p.margins[k], xi,
                                       xk);
}

double raw_residual_k(const ExpectileProblem& p, std::span<const double> x,
                      std::size_t k) {
    const std::size_t d = p.dim();
    double r = p.weights(k, k) * self_term(p.alpha, p.margins[k], x[k]);
    for (std::size_t i = 0; i < d; ++i) {
        if (i == k) continue;
        const double w = p.weights(k, i);
        if (w != 0.0) r += w * pair_term(p, i, k, x[i], x[k]);
    }
    return r;
}

// Residual scaled by 1 + |x_k| sf_k(x_k): keeps extreme-alpha systems
// comparable across components (raw residuals vanish like 1-alpha).
double residual_scale(const ExpectileProblem& p, double xk, std::size_t k) {
    return 1.0 + std::fabs(xk) * p.margins[k].survival(xk);
}

std::vector<double> scaled_residual(const ExpectileProblem& p,
                                    std::span<const double> x) {
    std::vector<double> r(p.dim());
    for (std::size_t k = 0; k < p.dim(); ++k) {
        r[k] = raw_residual_k(p, x, k) / residual_scale(p, x[k], k);
    }
    return r;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double t : v) m = std::max(m, std::fabs(t));
    return m;
}

// Solve J dx = -r in place; returns false if J is numerically singular.
bool solve_linear(std::vector<double>& J, std::vector<double> r,
                  std::vector<double>& dx, std::size_t d) {
    std::vector<std::size_t> piv(d);
    for (std::size_t i = 0; i < d; ++i) piv[i] = i;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t best = col;
        double mag = std::fabs(J[piv[col] * d + col]);
        for (std::size_t row = col + 1; row < d; ++row) {
            const double m = std::fabs(J[piv[row] * d + col]);
            if (m > mag) { mag = m; best = row; }
        }
        if (mag < 1e-14) return false;
        std::swap(piv[col], piv[best]);
        const double pivval = J[piv[col] * d + col];
        for (std::size_t row = col + 1; row < d; ++row) {
            const double f = J[piv[row] * d + col] / pivval;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < d; ++j)
                J[piv[row] * d + j] -= f * J[piv[col] * d + j];
            r[piv[row]] -= f * r[piv[col]];
        }
    }
    dx.assign(d, 0.0);
    for (std::size_t col = d; col-- > 0;) {
        double s = -r[piv[col]];
        for (std::size_t j = col + 1; j < d; ++j)
            s -= J[piv[col] * d + j] * dx[j];
        dx[col] = s / J[piv[col] * d + col];
    }
    return true;
}

// Coordinate-k root of the residual (strictly decreasing in x_k).
double coordinate_root(const ExpectileProblem& p, std::vector<double> x,
                       std::size_t k) {
    auto phi = [&](double t) {
        x[k] = t;
        return raw_residual_k(p, x, k);
    };
    const double left = p.margins[k].left_endpoint();
    double lo = x[k], hi = x[k];
    double v = phi(x[k]);
    if (v > 0.0) {
        double step = std::max(1.0, 0.5 * std::fabs(x[k]));
        hi = x[k] + step;
        int guard = 0;
        while (phi(hi) > 0.0 && ++guard < 200) {
            lo = hi;
            step *= 2.0;
            hi += step;
        }
    } else if (v < 0.0) {
        if (std::isfinite(left)) {
            lo = left + 0.5 * (x[k] - left);
            int guard = 0;
            while (phi(lo) < 0.0 && ++guard < 200)
                lo = left + 0.5 * (lo - left);
        } else {
            double step = std::max(1.0, 0.5 * std::fabs(x[k]));
            lo = x[k] - step;
            int guard = 0;
            while (phi(lo) < 0.0 && ++guard < 200) {
                hi = lo;
                step *= 2.0;
                lo -= step;
            }
        }
    } else {
        return x[k];
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = phi(mid);
        if (fm > 0.0) lo = mid; else hi = mid;
        if (hi - lo < 1e-15 * (1.0 + std::fabs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<double> system_residual(const ExpectileProblem& problem,
                                    std::span<const double> x) {
    problem.validate();
    require(x.size() == problem.dim(),
            "system_residual: point dimension mismatch");
    std::vector<double> r(problem.dim());
    for (std::size_t k = 0; k < problem.dim(); ++k)
        r[k] = raw_residual_k(problem, x, k);
    return r;
}

double univariate_expectile(const Margin& m, double alpha, double tol) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("univariate_expectile: alpha outside (0,1)");
    auto g = [&](double x) { return self_term(alpha, m, x); };
    auto dg = [&](double x) {
        const double s = m.survival(x);
        return -alpha * s - (1.0 - alpha) * (1.0 - s);
    };
    double x = m.mean();
    double v = g(x);
    if (v == 0.0) return x;
    // Bracket the root; g is strictly decreasing with g -> -inf on the right
    // and g > 0 at the left end of the support.
    double lo, hi;
    const double left = m.left_endpoint();
    int guard = 0;
    if (v > 0.0) {
        lo = x;
        double step = std::max(1.0, std::fabs(x));
        hi = x + step;
        while (g(hi) > 0.0 && ++guard < 300) {
            lo = hi;
            step *= 2.0;
            hi += step;
        }
    } else {
        hi = x;
        if (std::isfinite(left)) {
            lo = left + 0.5 * (x - left);
            while (g(lo) < 0.0 && ++guard < 300) lo = left + 0.5 * (lo - left);
        } else {
            double step = std::max(1.0, std::fabs(x));
            lo = x - step;
            while (g(lo) < 0.0 && ++guard < 300) {
                hi = lo;
                step *= 2.0;
                lo -= step;
            }
        }
    }
    for (int it = 0; it < 200; ++it) {
        double xn = x - v / dg(x);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        const double vn = g(xn);
        if (vn > 0.0) lo = xn; else hi = xn;
        const double dx = std::fabs(xn - x);
        x = xn;
        v = vn;
        if (v == 0.0 || dx <= tol * (1.0 + std::fabs(x))) break;
    }
    return x;
}

ExpectileSolution solve_multivariate_expectile(const ExpectileProblem& problem,
                                               double tol, int max_iter) {
    problem.validate();
    require(tol > 0.0, "solve: tol must be > 0");
    const std::size_t d = problem.dim();

    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i)
        x[i] = univariate_expectile(problem.margins[i], problem.alpha);

    std::vector<double> r = scaled_residual(problem, x);
    double norm = max_abs(r);
    std::vector<double> best_x = x;
    double best_norm = norm;

    std::vector<double> J(d * d), dx(d), xt(d);
    for (int iter = 1; iter <= max_iter; ++iter) {
        if (norm <= tol) return {x, norm, iter - 1};

        // Central-difference Jacobian of the scaled residual.
        for (std::size_t j = 0; j < d; ++j) {
            const double h = 1e-6 * (1.0 + std::fabs(x[j]));
            xt = x;
            xt[j] = x[j] + h;
            const std::vector<double> rp = scaled_residual(problem, xt);
            xt[j] = x[j] - h;
            const std::vector<double> rm = scaled_residual(problem, xt);
            for (std::size_t k = 0; k < d; ++k)
                J[k * d + j] = (rp[k] - rm[k]) / (2.0 * h);
        }

        bool accepted = false;
        std::vector<double> Jcopy = J;
        if (solve_linear(Jcopy, r, dx, d)) {
            double damp = 1.0;
            for (int ls = 0; ls < 8; ++ls) {
                for (std::size_t i = 0; i < d; ++i) xt[i] = x[i] + damp * dx[i];
                const std::vector<double> rt = scaled_residual(problem, xt);
                const double nt = max_abs(rt);
                if (nt < norm) {
                    x = xt;
                    r = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
                damp *= 0.5;
            }
        }
        if (!accepted) {
            // Newton stalled: one Gauss-Seidel sweep of coordinate roots.
            for (std::size_t k = 0; k < d; ++k)
                x[k] = coordinate_root(problem, x, k);
            r = scaled_residual(problem, x);
            norm = max_abs(r);
        }
        if (norm < best_norm) {
            best_norm = norm;
            best_x = x;
        }
    }
    if (best_norm <= tol) return {best_x, best_norm, max_iter};
    throw ConvergenceError("expectile solver did not reach tolerance " +
                               std::to_string(tol) + " in " +
                               std::to_string(max_iter) + " iterations",
                           best_x, best_norm, max_iter);
}

} // namespace tailex
