#include "tailex/margins.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tailex/special.hpp"

namespace tailex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// ---- base-family pieces (location 0, scale_mult 1) ----

double base_survival(const ParetoParams& p, double x) {
    if (x <= 0.0) return 1.0;
    return std::pow(p.scale / (p.scale + x), p.shape);
}
double base_survival(const BurrParams& p, double x) {
    if (x <= 0.0) return 1.0;
    return std::pow(p.scale / (p.scale + std::pow(x, p.tau)), p.shape);
}
double base_survival(const StudentParams& p, double x) {
    return special::student_survival(x / p.scale, p.dof);
}

double base_quantile_from_survival(const ParetoParams& p, double q) {
    return p.scale * std::expm1(-std::log(q) / p.shape);
}
double base_quantile_from_survival(const BurrParams& p, double q) {
    return std::pow(p.scale * std::expm1(-std::log(q) / p.shape), 1.0 / p.tau);
}
double base_quantile_from_survival(const StudentParams& p, double q) {
    return p.scale * special::student_quantile_from_survival(q, p.dof);
}

// quantile(p) with the log1p form so p near 0 and near 1 both stay accurate
double base_quantile(const ParetoParams& pp, double p) {
    return pp.scale * std::expm1(-std::log1p(-p) / pp.shape);
}
double base_quantile(const BurrParams& pp, double p) {
    return std::pow(pp.scale * std::expm1(-std::log1p(-p) / pp.shape),
                    1.0 / pp.tau);
}
double base_quantile(const StudentParams& pp, double p) {
    return pp.scale * special::student_quantile_from_survival(1.0 - p, pp.dof);
}

double base_mean(const ParetoParams& p) { return p.scale / (p.shape - 1.0); }
double base_mean(const BurrParams& p) {
    const double it = 1.0 / p.tau;
    return std::exp(it * std::log(p.scale) + std::lgamma(it) +
                    std::lgamma(p.shape - it) - std::lgamma(p.shape)) /
           p.tau;
}
double base_mean(const StudentParams&) { return 0.0; }

double base_upm(const ParetoParams& p, double x) {
    if (x < 0.0) return base_mean(p) - x;
    return base_survival(p, x) * (p.scale + x) / (p.shape - 1.0);
}
double base_upm(const BurrParams& p, double x) {
    if (x <= 0.0) return base_mean(p) - x;
    const double it = 1.0 / p.tau;
    const double w = p.scale / (p.scale + std::pow(x, p.tau));
    return std::pow(p.scale, it) / p.tau *
           std::exp(special::lbeta(it, p.shape - it)) *
           special::ibeta(p.shape - it, it, w);
}
double base_upm(const StudentParams& p, double x) {
    return p.scale *
           special::student_upper_partial_moment(x / p.scale, p.dof);
}

double base_tail_index(const ParetoParams& p) { return p.shape; }
double base_tail_index(const BurrParams& p) { return p.shape * p.tau; }
double base_tail_index(const StudentParams& p) { return p.dof; }

double base_tail_constant(const ParetoParams& p) {
    return std::pow(p.scale, p.shape);
}
double base_tail_constant(const BurrParams& p) {
    return std::pow(p.scale, p.shape);
}
double base_tail_constant(const StudentParams& p) {
    return special::student_tail_constant(p.dof) * std::pow(p.scale, p.dof);
}

double base_left_endpoint(const ParetoParams&) { return 0.0; }
double base_left_endpoint(const BurrParams&) { return 0.0; }
double base_left_endpoint(const StudentParams&) { return -kInf; }

} // namespace

Margin::Margin(std::variant<ParetoParams, BurrParams, StudentParams> fam,
               double location, double scale_mult)
    : family_(fam), location_(location), scale_mult_(scale_mult) {
    require(scale_mult_ > 0.0, "margin: scale_mult must be > 0");
    require(std::isfinite(location_), "margin: location must be finite");
}

Margin Margin::pareto(double shape, double scale) {
    require(shape > 1.0, "pareto: shape must be > 1 (finite mean)");
    require(scale > 0.0, "pareto: scale must be > 0");
    return Margin(ParetoParams{shape, scale}, 0.0, 1.0);
}

Margin Margin::burr(double shape, double scale, double tau) {
    require(shape > 0.0 && tau > 0.0, "burr: shape and tau must be > 0");
    require(shape * tau > 1.0, "burr: shape*tau must be > 1 (finite mean)");
    require(scale > 0.0, "burr: scale must be > 0");
    return Margin(BurrParams{shape, scale, tau}, 0.0, 1.0);
}

Margin Margin::scaled_student(double scale, double dof) {
    require(scale > 0.0, "student: scale must be > 0");
    require(dof > 1.0, "student: dof must be > 1 (finite mean)");
    return Margin(StudentParams{scale, dof}, 0.0, 1.0);
}

Margin Margin::with_location(double location) const {
    return Margin(family_, location_ + location, scale_mult_);
}

Margin Margin::with_scale(double scale_mult) const {
    require(scale_mult > 0.0, "margin: scale_mult must be > 0");
    return Margin(family_, location_ * scale_mult, scale_mult_ * scale_mult);
}

double Margin::survival(double x) const {
    const double t = (x - location_) / scale_mult_;
    return std::visit([&](const auto& f) { return base_survival(f, t); },
                      family_);
}

double Margin::cdf(double x) const { return 1.0 - survival(x); }

double Margin::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("quantile: p outside (0,1)");
    const double t =
        std::visit([&](const auto& f) { return base_quantile(f, p); }, family_);
    return location_ + scale_mult_ * t;
}

double Margin::quantile_from_survival(double q) const {
    if (!(q > 0.0 && q < 1.0))
        throw std::domain_error("quantile_from_survival: q outside (0,1)");
    const double t = std::visit(
        [&](const auto& f) { return base_quantile_from_survival(f, q); },
        family_);
    return location_ + scale_mult_ * t;
}

double Margin::mean() const {
    const double t = std::visit([](const auto& f) { return base_mean(f); },
                                family_);
    return location_ + scale_mult_ * t;
}

double Margin::upper_partial_moment(double x) const {
    const double t = (x - location_) / scale_mult_;
    return scale_mult_ *
           std::visit([&](const auto& f) { return base_upm(f, t); }, family_);
}

double Margin::lower_partial_moment(double x) const {
    // E[(x-X)+] = x - E[X] + E[(X-x)+]; exact for every family, clamp the
    // last few ulps so the left endpoint returns exactly 0.
    return std::max(0.0, x - mean() + upper_partial_moment(x));
}

double Margin::tail_index() const {
    return std::visit([](const auto& f) { return base_tail_index(f); },
                      family_);
}

double Margin::tail_constant() const {
    const double k = std::visit(
        [](const auto& f) { return base_tail_constant(f); }, family_);
    return k * std::pow(scale_mult_, tail_index());
}

double Margin::left_endpoint() const {
    const double t = std::visit(
        [](const auto& f) { return base_left_endpoint(f); }, family_);
    return location_ + scale_mult_ * t;
}

double tail_equivalence(const Margin& m, const Margin& ref) {
    if (m.tail_index() != ref.tail_index()) {
        throw TailMismatchError(
            "tail_equivalence: tail indices differ (" +
            std::to_string(m.tail_index()) + " vs " +
            std::to_string(ref.tail_index()) +
            "); tails are not equivalent");
    }
    return m.tail_constant() / ref.tail_constant();
}

std::vector<TailProfile> tail_profiles(std::span<const Margin> margins) {
    if (margins.empty()) throw std::invalid_argument("tail_profiles: empty");
    std::vector<TailProfile> out;
    out.reserve(margins.size());
    const double theta = margins[0].tail_index();
    for (const Margin& m : margins) {
        out.push_back({theta, tail_equivalence(m, margins[0])});
    }
    return out;
}

} // namespace tailex
