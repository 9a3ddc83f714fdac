#include "tailex/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tailex::special {

double lbeta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// Continued fraction for I_x(a,b), modified Lentz. Converges fast for
// x < (a+1)/(a+b+2).
double ibeta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 400; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double ibeta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("ibeta: a,b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * ibeta_cf(a, b, x) / a;
    }
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - lbeta(a, b)) *
                     ibeta_cf(b, a, 1.0 - x) / b;
}

double student_pdf(double t, double z) {
    const double lognorm = std::lgamma(0.5 * (z + 1.0)) - std::lgamma(0.5 * z) -
                           0.5 * std::log(z * M_PI);
    return std::exp(lognorm - 0.5 * (z + 1.0) * std::log1p(t * t / z));
}

double student_survival(double t, double z) {
    const double x = z / (z + t * t);
    const double half_tail = 0.5 * ibeta(0.5 * z, 0.5, x);
    return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

double student_cdf(double t, double z) { return student_survival(-t, z); }

double student_upper_partial_moment(double x, double z) {
    if (!(z > 1.0)) throw std::domain_error("student UPM needs z > 1");
    return (z + x * x) / (z - 1.0) * student_pdf(x, z) -
           x * student_survival(x, z);
}

double student_tail_constant(double z) {
    return std::exp(std::lgamma(0.5 * (z + 1.0)) - std::lgamma(0.5 * z) +
                    (0.5 * z - 1.0) * std::log(z) - 0.5 * std::log(M_PI));
}

double student_quantile_from_survival(double q, double z) {
    if (!(q > 0.0 && q < 1.0))
        throw std::domain_error("student quantile: q outside (0,1)");
    if (q == 0.5) return 0.0;
    if (z == 2.0) {
        // sf(t) = 1/2 - t / (2 sqrt(2 + t^2)) inverts in closed form.
        return (1.0 - 2.0 * q) * std::sqrt(0.5 / (q * (1.0 - q)));
    }
    // Work in the upper tail and mirror.
    const bool flip = q > 0.5;
    const double qq = flip ? 1.0 - q : q;
    // Bracket [lo, hi] with survival(hi) < qq <= survival(lo).
    double lo = 0.0;
    double hi = std::max(2.0, std::pow(student_tail_constant(z) / qq, 1.0 / z));
    while (student_survival(hi, z) > qq) hi *= 2.0;
    // Bisect, then polish with Newton (derivative is -pdf).
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_survival(mid, z) > qq) lo = mid; else hi = mid;
        if (hi - lo < 1e-12 * (1.0 + hi)) break;
    }
    double t = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double f = student_survival(t, z) - qq;
        const double df = -student_pdf(t, z);
        if (df == 0.0) break;
        const double step = f / df;
        const double tn = t - step;
        if (tn <= lo || tn >= hi) break;
        t = tn;
        if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(t))) break;
    }
    return flip ? -t : t;
}

} // namespace tailex::special
