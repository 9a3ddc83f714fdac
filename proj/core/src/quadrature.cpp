#include "tailex/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace tailex {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, double abs_floor,
                        int max_depth) {
    if (!(a <= b)) throw std::invalid_argument("adaptive_simpson: a > b");
    return adaptive_simpson_any<double>(f, a, b, rel_tol, abs_floor,
                                        max_depth);
}

double integrate_survival_tail(const std::function<double(double)>& survival,
                               double x, double cut, double theta,
                               double rel_tol) {
    if (!(theta > 1.0))
        throw std::domain_error("integrate_survival_tail: theta must be > 1");
    double body = 0.0;
    if (x < cut) {
        // Split long ranges geometrically so the adaptive rule does not have
        // to discover the decay scale by itself.
        double lo = x;
        while (lo < cut) {
            double hi = std::min(cut, std::max(lo * 4.0, lo + 1.0));
            body += adaptive_simpson(survival, lo, hi, rel_tol);
            lo = hi;
        }
    }
    const double edge = std::max(x, cut);
    return body + edge * survival(edge) / (theta - 1.0);
}

} // namespace tailex
