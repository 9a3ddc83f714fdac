#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

#include "tailex/rng.hpp"
#include "tailex/serialize.hpp"
#include "tailex/simulation.hpp"
#include "testutil.hpp"

using namespace tailex;

namespace {

std::vector<std::size_t> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size()), r(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    for (std::size_t pos = 0; pos < idx.size(); ++pos) r[idx[pos]] = pos;
    return r;
}

std::string records_csv(const std::vector<ExperimentRecord>& recs) {
    std::ostringstream os;
    write_records_csv(os, recs);
    return os.str();
}

} // namespace

TEST_SUITE("simulation") {

TEST_CASE("draw_sample is deterministic and honors dependence") {
    const std::vector<Margin> ms{Margin::pareto(2.0, 10.0),
                                 Margin::burr(4.0, 15.0, 0.75)};
    const auto a = draw_sample(ms, Dependence::independent, 500, 42);
    const auto b = draw_sample(ms, Dependence::independent, 500, 42);
    CHECK(a.data == b.data);
    const auto c = draw_sample(ms, Dependence::independent, 500, 43);
    CHECK(a.data != c.data);

    const auto como = draw_sample(ms, Dependence::comonotonic, 400, 7);
    CHECK(ranks(como.column(0)) == ranks(como.column(1)));
    const auto ind = draw_sample(ms, Dependence::independent, 400, 7);
    CHECK(ranks(ind.column(0)) != ranks(ind.column(1)));
}

TEST_CASE("independent pareto sample mean settles near the true mean") {
    const std::vector<Margin> ms{Margin::pareto(2.0, 10.0)};
    std::vector<double> means;
    for (int rep = 0; rep < 15; ++rep) {
        const auto s = draw_sample(ms, Dependence::independent, 100000,
                                   derive_stream_seed(99, rep));
        const double mean =
            std::accumulate(s.data.begin(), s.data.end(), 0.0) / s.n;
        means.push_back(mean);
    }
    CHECK(testutil::median(means) == doctest::Approx(10.0).epsilon(0.03));
}

TEST_CASE("exact reference curve") {
    const std::vector<Margin> same{Margin::pareto(2.0, 10.0),
                                   Margin::pareto(2.0, 10.0)};
    const std::vector<double> alphas{0.5, 0.9, 0.99};
    const auto curve = exact_reference_curve(
        same, WeightMatrix::all_ones(2), Dependence::comonotonic, alphas);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double uni = univariate_expectile(same[0], alphas[i]);
        CHECK(curve[i].point[0] == doctest::Approx(uni).epsilon(1e-8));
        CHECK(curve[i].point[1] == doctest::Approx(uni).epsilon(1e-8));
    }
    // d=1 at alpha 0.5 is the mean
    const std::vector<Margin> one{Margin::burr(4.0, 10.0, 0.75)};
    const auto c1 = exact_reference_curve(one, WeightMatrix::all_ones(1),
                                          Dependence::independent,
                                          std::vector<double>{0.5});
    CHECK(c1[0].point[0] == doctest::Approx(one[0].mean()).epsilon(1e-8));

    // far-tail comonotonic pair tracks VaR_alpha(X_i) (theta-1)^(-1/theta)
    const std::vector<Margin> pair{Margin::pareto(2.0, 10.0),
                                   Margin::pareto(2.0, 15.0)};
    const double a6 = 1.0 - 1e-6;
    const auto far = exact_reference_curve(pair, WeightMatrix::all_ones(2),
                                           Dependence::comonotonic,
                                           std::vector<double>{a6});
    for (std::size_t i = 0; i < 2; ++i) {
        const double target = pair[i].quantile(a6); // (theta-1)^{-1/2} = 1
        CHECK(far[0].point[i] / target == doctest::Approx(1.0).epsilon(0.02));
    }

    // non-convergence propagates tagged with the offending alpha
    try {
        exact_reference_curve(pair, WeightMatrix::all_ones(2),
                              Dependence::independent,
                              std::vector<double>{0.97}, 1e-30);
        CHECK(false);
    } catch (const tailex::ConvergenceError& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
        CHECK(std::string(e.what()).find("0.97") != std::string::npos);
    }
}

TEST_CASE("k sweep: single replication matches direct estimator calls") {
    ExperimentConfig cfg;
    cfg.margins = {Margin::pareto(2.0, 10.0), Margin::pareto(2.0, 15.0)};
    cfg.dependence = Dependence::independent;
    cfg.alpha_grid = {0.99};
    cfg.k_grid = {50};
    cfg.n = 2000;
    cfg.replications = 1;
    cfg.master_seed = 555;
    const auto recs = run_k_sweep(cfg);
    REQUIRE(recs.size() == 2);
    const auto sample = draw_sample(cfg.margins, cfg.dependence, cfg.n,
                                    derive_stream_seed(cfg.master_seed, 0));
    const auto direct = extreme_expectile_independent(sample, 50, 0.99);
    const auto exact = solve_multivariate_expectile(
        ExpectileProblem{cfg.margins, WeightMatrix::all_ones(2),
                         cfg.dependence, 0.99});
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(recs[i].estimate == doctest::Approx(direct[i]).epsilon(1e-13));
        CHECK(recs[i].exact ==
              doctest::Approx(exact.point[i]).epsilon(1e-13));
        CHECK(recs[i].ratio ==
              doctest::Approx(direct[i] / exact.point[i]).epsilon(1e-13));
        CHECK(recs[i].component == i + 1);
        CHECK_FALSE(recs[i].error_flag);
    }
}

TEST_CASE("k sweep: deterministic and independent of worker count") {
    ExperimentConfig cfg;
    cfg.margins = {Margin::pareto(2.0, 10.0), Margin::pareto(2.0, 15.0)};
    cfg.dependence = Dependence::comonotonic;
    cfg.alpha_grid = {0.99, 0.9}; // deliberately unsorted
    cfg.k_grid = {50, 20};
    cfg.n = 1500;
    cfg.replications = 6;
    cfg.master_seed = 777;
    const auto r1 = run_k_sweep(cfg, 1);
    const auto r2 = run_k_sweep(cfg, 2);
    const auto r4 = run_k_sweep(cfg, 4);
    CHECK(records_csv(r1) == records_csv(r2));
    CHECK(records_csv(r1) == records_csv(r4));
    // the streaming writer produces the same bytes
    std::ostringstream streamed;
    run_k_sweep_csv(cfg, streamed, 2);
    CHECK(streamed.str() == records_csv(r1));
    // canonical ordering: sorted by (alpha, k, rep, component)
    for (std::size_t i = 1; i < r1.size(); ++i) {
        const auto& p = r1[i - 1];
        const auto& q = r1[i];
        const auto key = [](const ExperimentRecord& r) {
            return std::make_tuple(r.alpha, r.k, r.rep, r.component);
        };
        CHECK(key(p) < key(q));
    }
    // different seed changes the records
    cfg.master_seed = 778;
    CHECK(records_csv(run_k_sweep(cfg, 1)) != records_csv(r1));
}

TEST_CASE("k sweep flags replications with too-heavy estimated tails") {
    ExperimentConfig cfg;
    cfg.margins = {Margin::pareto(1.05, 1.0)};
    cfg.dependence = Dependence::independent;
    cfg.alpha_grid = {0.999};
    cfg.k_grid = {10};
    cfg.n = 400;
    cfg.replications = 30;
    cfg.master_seed = 2024;
    const auto recs = run_k_sweep(cfg);
    std::size_t flagged = 0;
    for (const auto& r : recs) {
        if (r.error_flag) {
            ++flagged;
            CHECK(std::isnan(r.estimate));
            CHECK(std::isnan(r.ratio));
        } else {
            CHECK(std::isfinite(r.estimate));
        }
    }
    CHECK(flagged > 0);
    CHECK(flagged < recs.size());
}

TEST_CASE("csv records format") {
    ExperimentRecord r;
    r.alpha = 0.99;
    r.k = 50;
    r.n = 1500;
    r.rep = 3;
    r.component = 2;
    r.exact = 31.25;
    r.estimate = 30.0;
    r.ratio = 0.96;
    r.error_flag = false;
    std::ostringstream os;
    write_records_csv(os, std::vector<ExperimentRecord>{r});
    CHECK(os.str() ==
          "alpha,k,n,rep,component,exact,estimate,ratio,error_flag\n"
          "0.99,50,1500,3,2,31.25,30,0.96,0\n");
}

TEST_CASE("boxplot study") {
    // degenerate: comonotonic identical margins means identical columns
    const std::vector<Margin> same{Margin::pareto(2.0, 10.0),
                                   Margin::pareto(2.0, 10.0)};
    const std::vector<std::size_t> ns{400};
    std::map<std::size_t, std::size_t> rule{{400, 40}};
    const auto recs =
        run_boxplot_study(same, Dependence::comonotonic, ns, rule, 10, 5);
    REQUIRE(recs.size() == 10);
    for (const auto& r : recs) {
        CHECK(r.estimate == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.exact == doctest::Approx(1.0));
        CHECK(r.alpha == 0.0);
        CHECK(r.k == 40);
    }

    // spread of c2 shrinks as n grows, and the IQR brackets the truth
    const std::vector<Margin> pair{Margin::pareto(2.0, 10.0),
                                   Margin::pareto(2.0, 15.0)};
    const std::vector<std::size_t> grid{1000, 20000};
    std::map<std::size_t, std::size_t> rule2{{1000, 50}, {20000, 400}};
    const auto study = run_boxplot_study(pair, Dependence::independent, grid,
                                         rule2, 41, 99, 2);
    std::map<std::size_t, std::vector<double>> byn;
    for (const auto& r : study) byn[r.n].push_back(r.estimate);
    REQUIRE(byn.size() == 2);
    std::map<std::size_t, double> mad;
    for (auto& [n, est] : byn) {
        const double med = testutil::median(est);
        std::vector<double> dev;
        for (double v : est) dev.push_back(std::fabs(v - med));
        mad[n] = testutil::median(dev);
        std::sort(est.begin(), est.end());
        const double q1 = est[est.size() / 4];
        const double q3 = est[(est.size() * 3) / 4];
        if (n == 20000) {
            CHECK(q1 < 2.25);
            CHECK(2.25 < q3);
        }
    }
    CHECK(mad[20000] < mad[1000]);

    // every n in the grid needs a k rule
    CHECK_THROWS_AS(run_boxplot_study(pair, Dependence::independent, grid,
                                      rule, 5, 1),
                    std::invalid_argument);
}

} // TEST_SUITE
