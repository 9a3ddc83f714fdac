#include "doctest.h"

#include <cmath>
#include <vector>

#include "tailex/margins.hpp"
#include "tailex/quadrature.hpp"
#include "tailex/rng.hpp"
#include "testutil.hpp"

using tailex::Margin;
using tailex::tail_equivalence;

namespace {

std::vector<Margin> paper_margins() {
    return {Margin::pareto(2.0, 10.0), Margin::burr(4.0, 10.0, 0.75),
            Margin::scaled_student(1.0, 2.0),
            Margin::pareto(3.0, 4.0).with_location(2.0).with_scale(1.5),
            Margin::scaled_student(2.0, 3.0).with_location(-1.0)};
}

} // namespace

TEST_SUITE("margins") {

TEST_CASE("survival closed forms") {
    const Margin pa = Margin::pareto(2.0, 10.0);
    CHECK(pa.survival(10.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(pa.survival(-3.0) == 1.0);
    CHECK(Margin::burr(4.0, 10.0, 0.75).survival(0.0) == 1.0);
    // monotone decreasing toward 0
    double prev = 1.0;
    for (double x : {0.0, 1.0, 10.0, 1e3, 1e6, 1e9}) {
        const double s = pa.survival(x);
        CHECK(s <= prev);
        prev = s;
    }
    CHECK(prev < 1e-15);
}

TEST_CASE("quantile closed forms and inverse consistency") {
    CHECK(Margin::pareto(2.0, 10.0).quantile(0.75) ==
          doctest::Approx(10.0).epsilon(1e-14));
    CHECK(Margin::burr(4.0, 10.0, 0.75).quantile(1.0 - 1.0 / 16.0) ==
          doctest::Approx(std::pow(10.0, 4.0 / 3.0)).epsilon(1e-14));
    for (const Margin& m : paper_margins()) {
        for (double p = 0.001; p < 0.9995; p += 0.0249) {
            const double x = m.quantile(p);
            CHECK(std::fabs(m.survival(x) - (1.0 - p)) < 1e-8);
        }
        CHECK(m.survival(m.quantile(0.5)) == doctest::Approx(0.5).epsilon(1e-10));
    }
    CHECK_THROWS_AS(Margin::pareto(2.0, 10.0).quantile(0.0),
                    std::domain_error);
    CHECK_THROWS_AS(Margin::pareto(2.0, 10.0).quantile(1.0),
                    std::domain_error);
}

TEST_CASE("means") {
    CHECK(Margin::pareto(2.0, 10.0).mean() == doctest::Approx(10.0));
    CHECK(Margin::pareto(2.0, 10.0).with_location(5.0).mean() ==
          doctest::Approx(15.0));
    CHECK(Margin::scaled_student(1.0, 2.0).mean() == 0.0);
    // Burr mean reference value (40-digit arithmetic).
    CHECK(Margin::burr(4.0, 10.0, 0.75).mean() ==
          doctest::Approx(6.43244818282135785).epsilon(1e-13));
}

TEST_CASE("partial moments: closed values") {
    const Margin pa = Margin::pareto(2.0, 10.0);
    CHECK(pa.upper_partial_moment(10.0) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(pa.upper_partial_moment(0.0) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(pa.lower_partial_moment(10.0) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(pa.lower_partial_moment(0.0) == 0.0);
    CHECK(pa.lower_partial_moment(-5.0) == 0.0);
    const Margin bu = Margin::burr(4.0, 10.0, 0.75);
    CHECK(bu.upper_partial_moment(1.0) ==
          doctest::Approx(5.62640278921699855).epsilon(1e-13));
    CHECK(bu.upper_partial_moment(10.0) ==
          doctest::Approx(2.64299126509386583).epsilon(1e-13));
    const Margin st = Margin::scaled_student(1.0, 2.0);
    CHECK(st.lower_partial_moment(0.0) ==
          doctest::Approx(st.upper_partial_moment(0.0)).epsilon(1e-14));
}

TEST_CASE("partial moment identity over a grid") {
    for (const Margin& m : paper_margins()) {
        const double lo = std::isfinite(m.left_endpoint())
                              ? m.left_endpoint()
                              : m.quantile(0.001);
        const double hi = m.quantile(0.999);
        for (int i = 0; i < 50; ++i) {
            const double x = lo + (hi - lo) * i / 49.0;
            const double lhs =
                m.upper_partial_moment(x) - m.lower_partial_moment(x);
            const double rhs = m.mean() - x;
            CHECK(std::fabs(lhs - rhs) <=
                  1e-8 * std::max(1.0, std::fabs(rhs)));
        }
    }
}

TEST_CASE("partial moments match an independent quadrature oracle") {
    for (const Margin& m : paper_margins()) {
        const double far = m.quantile(1.0 - 1e-12);
        auto sf = [&](double t) { return m.survival(t); };
        for (double p : {0.05, 0.5, 0.9, 0.995}) {
            const double x = m.quantile(p);
            const double oracle = testutil::survival_integral_oracle(
                sf, x, far, m.tail_index());
            CHECK(m.upper_partial_moment(x) ==
                  doctest::Approx(oracle).epsilon(1e-6));
        }
    }
}

TEST_CASE("karamata ratio near the tail") {
    // E[(X-x)+] / (x sf(x)) -> 1/(theta-1) as x grows. Burr with tau < 1
    // approaches its limit like x^{-tau} (3.6% off at this level), the other
    // families are within 1%.
    for (const Margin& m : paper_margins()) {
        const double x = m.quantile(1.0 - 1e-6);
        const double ratio =
            m.upper_partial_moment(x) / (x * m.survival(x));
        const bool slow = std::holds_alternative<tailex::BurrParams>(m.family());
        CHECK(ratio == doctest::Approx(1.0 / (m.tail_index() - 1.0))
                           .epsilon(slow ? 0.05 : 0.01));
    }
}

TEST_CASE("tail indices") {
    CHECK(Margin::pareto(2.0, 10.0).tail_index() == 2.0);
    CHECK(Margin::burr(4.0, 10.0, 0.75).tail_index() == 3.0);
    CHECK(Margin::scaled_student(2.0, 2.0).tail_index() == 2.0);
}

TEST_CASE("tail equivalence coefficients") {
    CHECK(tail_equivalence(Margin::pareto(2.0, 15.0),
                           Margin::pareto(2.0, 10.0)) ==
          doctest::Approx(2.25).epsilon(1e-14));
    const Margin m = Margin::burr(4.0, 15.0, 0.75);
    CHECK(tail_equivalence(m, m) == doctest::Approx(1.0));
    CHECK(tail_equivalence(m, Margin::burr(4.0, 10.0, 0.75)) ==
          doctest::Approx(std::pow(1.5, 4.0)).epsilon(1e-14));
    CHECK(tail_equivalence(Margin::scaled_student(2.0, 2.0),
                           Margin::scaled_student(1.0, 2.0)) ==
          doctest::Approx(4.0).epsilon(1e-14));
    CHECK_THROWS_AS(tail_equivalence(Margin::pareto(2.0, 10.0),
                                     Margin::pareto(3.0, 10.0)),
                    tailex::TailMismatchError);
    CHECK_THROWS_AS(tail_equivalence(Margin::burr(4.0, 10.0, 0.75),
                                     Margin::scaled_student(1.0, 2.0)),
                    tailex::TailMismatchError);
}

TEST_CASE("survival ratio approaches the coefficient in the far tail") {
    struct Pair { Margin m, ref; };
    const Pair pairs[] = {
        {Margin::pareto(2.0, 15.0), Margin::pareto(2.0, 10.0)},
        {Margin::scaled_student(2.0, 2.0), Margin::scaled_student(1.0, 2.0)},
        // cross-family with matching exact index: Pareto a=2 vs Student z=2
        {Margin::pareto(2.0, 10.0), Margin::scaled_student(1.0, 2.0)},
    };
    for (const Pair& p : pairs) {
        const double c = tail_equivalence(p.m, p.ref);
        const double x = p.ref.quantile(1.0 - 1e-8);
        CHECK(p.m.survival(x) / p.ref.survival(x) ==
              doctest::Approx(c).epsilon(0.01));
    }
    // Burr with tau = 0.75 converges like x^{-tau}: the deviation at the
    // 1-1e-8 quantile is ((b1+x^tau)/(b2+x^tau))^a ~ 2%, shrinking to ~0.2%
    // at 1-1e-12.
    const Margin bm = Margin::burr(4.0, 15.0, 0.75);
    const Margin br = Margin::burr(4.0, 10.0, 0.75);
    const double c = tail_equivalence(bm, br);
    const double x8 = br.quantile(1.0 - 1e-8);
    CHECK(bm.survival(x8) / br.survival(x8) ==
          doctest::Approx(c).epsilon(0.025));
    const double x12 = br.quantile(1.0 - 1e-12);
    CHECK(bm.survival(x12) / br.survival(x12) ==
          doctest::Approx(c).epsilon(0.01));
}

TEST_CASE("location-scale wrapper transforms affinely") {
    const Margin base = Margin::burr(4.0, 10.0, 0.75);
    const Margin moved = base.with_scale(2.5).with_location(-3.0);
    for (double p : {0.1, 0.5, 0.9, 0.999}) {
        CHECK(moved.quantile(p) ==
              doctest::Approx(-3.0 + 2.5 * base.quantile(p)).epsilon(1e-12));
    }
    CHECK(moved.mean() == doctest::Approx(-3.0 + 2.5 * base.mean()));
    const double x = 4.0;
    CHECK(moved.upper_partial_moment(-3.0 + 2.5 * x) ==
          doctest::Approx(2.5 * base.upper_partial_moment(x)).epsilon(1e-12));
    CHECK(moved.lower_partial_moment(-3.0 + 2.5 * x) ==
          doctest::Approx(2.5 * base.lower_partial_moment(x)).epsilon(1e-12));
    CHECK(moved.left_endpoint() == doctest::Approx(-3.0));
    // scale composition applied to an already shifted margin
    const Margin shifted_then_scaled = base.with_location(2.0).with_scale(3.0);
    CHECK(shifted_then_scaled.quantile(0.7) ==
          doctest::Approx(3.0 * (base.quantile(0.7) + 2.0)).epsilon(1e-12));
}

TEST_CASE("inverse transform sampling") {
    const Margin m = Margin::pareto(2.0, 10.0);
    CHECK(m.sample(0.75) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(m.sample(0.3) < m.sample(0.300001)); // nondecreasing
    // KS distance of 1e5 transformed uniforms below 0.01.
    tailex::SplitMix64 rng(20240817u);
    const std::size_t n = 100000;
    std::vector<double> xs(n);
    for (double& x : xs) x = m.sample(rng.next_unit());
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = 1.0 - m.survival(xs[i]);
        ks = std::max(ks, std::fabs(F - (i + 1.0) / n));
        ks = std::max(ks, std::fabs(F - static_cast<double>(i) / n));
    }
    CHECK(ks < 0.01);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(Margin::pareto(1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(Margin::pareto(2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Margin::burr(2.0, 10.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(Margin::scaled_student(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Margin::scaled_student(0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(Margin::pareto(2.0, 10.0).with_scale(-1.0),
                    std::invalid_argument);
}

} // TEST_SUITE
