#pragma once

#include <span>
#include <variant>
#include <vector>

#include "tailex/errors.hpp"

namespace tailex {

// Parametric heavy-tailed families. All three have survival functions with
// an exact power-law asymptote K * x^{-theta}:
//   Pareto(a,b):        sf(x) = (b/(b+x))^a,        x >= 0, theta = a
//   Burr(a,b,tau):      sf(x) = (b/(b+x^tau))^a,    x >= 0, theta = a*tau
//   ScaledStudent(s,z): sf(x) = T_z-survival(x/s),  theta = z
struct ParetoParams {
    double shape; // a > 1
    double scale; // b > 0
};
struct BurrParams {
    double shape; // a > 0
    double scale; // b > 0
    double tau;   // tau > 0, a*tau > 1
};
struct StudentParams {
    double scale; // s > 0
    double dof;   // z > 1
};

// A margin is one of the three families plus an optional affine wrapper
// x -> location + scale_mult * x. The wrapper exists so translation and
// homogeneity equivariance of the expectile solver can be exercised.
class Margin {
public:
    static Margin pareto(double shape, double scale);
    static Margin burr(double shape, double scale, double tau);
    static Margin scaled_student(double scale, double dof);

    Margin with_location(double location) const;
    Margin with_scale(double scale_mult) const;

    double survival(double x) const;
    double cdf(double x) const;
    double quantile(double p) const;               // p in (0,1)
    double quantile_from_survival(double q) const; // q in (0,1)
    double mean() const;
    double upper_partial_moment(double x) const; // E[(X-x)+]
    double lower_partial_moment(double x) const; // E[(x-X)+]
    double tail_index() const;
    double tail_constant() const; // K with sf(x) ~ K x^{-theta}
    double left_endpoint() const; // -inf for Student margins

    // Inverse-transform sampling; equals quantile(u) by construction.
    double sample(double u) const { return quantile(u); }

    const std::variant<ParetoParams, BurrParams, StudentParams>& family() const {
        return family_;
    }
    double location() const { return location_; }
    double scale_mult() const { return scale_mult_; }

private:
    Margin(std::variant<ParetoParams, BurrParams, StudentParams> fam,
           double location, double scale_mult);

    std::variant<ParetoParams, BurrParams, StudentParams> family_;
    double location_ = 0.0;
    double scale_mult_ = 1.0;
};

// Tail-equivalence coefficient c = lim sf_m(x)/sf_ref(x). Defined only when
// the tail indices agree exactly; throws TailMismatchError otherwise.
double tail_equivalence(const Margin& m, const Margin& ref);

struct TailProfile {
    double theta;
    double c; // relative to the reference margin (c = 1 for the reference)
};

// Profiles of a vector of margins relative to margins[0]. Throws if any tail
// index differs from the first.
std::vector<TailProfile> tail_profiles(std::span<const Margin> margins);

} // namespace tailex
