#include "tailex/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "tailex/rng.hpp"

namespace tailex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

// Run fn(i) for i in [0, count) on up to `jobs` workers. Work items are
// independent; output slots are preallocated by index, so scheduling cannot
// change the result.
void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned nthreads = std::min<unsigned>(jobs, count);
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

SampleMatrix draw_sample(std::span<const Margin> margins, Dependence dep,
                         std::size_t n, std::uint64_t seed) {
    require(!margins.empty(), "draw_sample: empty margins");
    require(n >= 1, "draw_sample: n must be >= 1");
    const std::size_t d = margins.size();
    SampleMatrix s;
    s.n = n;
    s.d = d;
    s.data.resize(n * d);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        if (dep == Dependence::comonotonic) {
            const double u = rng.next_unit();
            for (std::size_t j = 0; j < d; ++j)
                s.data[i * d + j] = margins[j].sample(u);
        } else {
            for (std::size_t j = 0; j < d; ++j)
                s.data[i * d + j] = margins[j].sample(rng.next_unit());
        }
    }
    return s;
}

void ExperimentConfig::validate() const {
    require(!margins.empty(), "config: empty margins");
    require(!alpha_grid.empty(), "config: empty alpha_grid");
    for (double a : alpha_grid)
        require(a > 0.0 && a < 1.0, "config: alpha outside (0,1)");
    require(n >= 2, "config: n must be >= 2");
    require(replications >= 1, "config: replications must be >= 1");
    const auto ks = effective_k_grid();
    require(!ks.empty(), "config: empty k_grid");
    for (std::size_t k : ks)
        require(k >= 2 && k + 1 <= n, "config: need 2 <= k <= n-1");
}

std::vector<std::size_t> ExperimentConfig::effective_k_grid() const {
    if (!k_grid.empty()) return k_grid;
    std::vector<std::size_t> ks = {n / 200, n / 100, n / 50, n / 20};
    for (std::size_t& k : ks) k = std::max<std::size_t>(k, 2);
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

void write_records_csv(std::ostream& out,
                       std::span<const ExperimentRecord> records) {
    out << kRecordCsvHeader << '\n';
    write_records_rows(out, records);
}

void write_records_rows(std::ostream& out,
                        std::span<const ExperimentRecord> records) {
    std::string line;
    line.reserve(160);
    for (const ExperimentRecord& r : records) {
        line.clear();
        append_double(line, r.alpha);
        line += ',';
        line += std::to_string(r.k);
        line += ',';
        line += std::to_string(r.n);
        line += ',';
        line += std::to_string(r.rep);
        line += ',';
        line += std::to_string(r.component);
        line += ',';
        append_double(line, r.exact);
        line += ',';
        append_double(line, r.estimate);
        line += ',';
        append_double(line, r.ratio);
        line += ',';
        line += r.error_flag ? '1' : '0';
        line += '\n';
        out << line;
    }
}

std::vector<ExpectileSolution> exact_reference_curve(
    std::span<const Margin> margins, const WeightMatrix& weights,
    Dependence dep, std::span<const double> alpha_grid, double tol) {
    std::vector<ExpectileSolution> out;
    out.reserve(alpha_grid.size());
    for (double alpha : alpha_grid) {
        ExpectileProblem problem{{margins.begin(), margins.end()}, weights,
                                 dep, alpha};
        try {
            out.push_back(solve_multivariate_expectile(problem, tol));
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("exact curve failed at alpha = " +
                                       std::to_string(alpha) + ": " + e.what(),
                                   e.best_point, e.residual, e.iterations);
        }
    }
    return out;
}

namespace {

// Per-(replication, k) sufficient statistics for the estimator formulas.
struct RepEstimates {
    double gamma_hat = kNaN;
    double threshold1 = kNaN; // k-th largest of column 1
    std::vector<double> c_hat;
    bool valid = false; // gamma_hat in (0,1) and thresholds positive
};

} // namespace

namespace {

// Sweep driver shared by the collecting and streaming front ends: computes
// the per-replication statistics once, then hands records to `emit` one
// alpha-block at a time in canonical (alpha, k, rep, component) order.
void sweep_blocks(
    const ExperimentConfig& config, unsigned jobs,
    const std::function<void(std::vector<ExperimentRecord>&&)>& emit) {
    config.validate();
    const std::size_t d = config.margins.size();
    const std::size_t reps = config.replications;
    std::vector<std::size_t> ks = config.effective_k_grid();
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    std::vector<double> alphas(config.alpha_grid.begin(),
                               config.alpha_grid.end());
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

    // Exact reference values, one solve per alpha.
    const std::vector<ExpectileSolution> exact = exact_reference_curve(
        config.margins, WeightMatrix::all_ones(d), config.dependence, alphas);

    // Heavy part: per replication, draw once and reduce to per-k estimates.
    std::vector<std::vector<RepEstimates>> stats(
        reps, std::vector<RepEstimates>(ks.size()));
    parallel_for(reps, jobs, [&](std::size_t r) {
        const SampleMatrix sample =
            draw_sample(config.margins, config.dependence, config.n,
                        derive_stream_seed(config.master_seed, r));
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            RepEstimates& e = stats[r][ki];
            try {
                const TailEstimates est =
                    estimate_tail(sample, ks[ki], config.norm);
                e.gamma_hat = est.gamma_hat;
                e.c_hat = est.c_hat;
                e.threshold1 = kth_upper_order_stat(sample.column(0), ks[ki]);
                e.valid = est.gamma_hat > 0.0 && est.gamma_hat < 1.0;
            } catch (const std::domain_error&) {
                e.valid = false; // nonpositive thresholds at this k
            }
        }
    });

    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        std::vector<ExperimentRecord> block;
        block.reserve(ks.size() * reps * d);
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            for (std::size_t r = 0; r < reps; ++r) {
                const RepEstimates& e = stats[r][ki];
                std::vector<double> est_point;
                if (e.valid) {
                    const double var_hat =
                        e.threshold1 *
                        std::pow(static_cast<double>(ks[ki]) /
                                     ((1.0 - alphas[ai]) *
                                      static_cast<double>(config.n)),
                                 e.gamma_hat);
                    TailEstimates te{e.gamma_hat, e.c_hat, ks[ki]};
                    est_point = extreme_expectile_from_estimates(
                        var_hat, te, config.dependence);
                }
                for (std::size_t comp = 0; comp < d; ++comp) {
                    ExperimentRecord rec;
                    rec.alpha = alphas[ai];
                    rec.k = ks[ki];
                    rec.n = config.n;
                    rec.rep = r + 1;
                    rec.component = comp + 1;
                    rec.exact = exact[ai].point[comp];
                    rec.estimate = e.valid ? est_point[comp] : kNaN;
                    rec.ratio = e.valid ? rec.estimate / rec.exact : kNaN;
                    rec.error_flag = !e.valid;
                    block.push_back(rec);
                }
            }
        }
        emit(std::move(block));
    }
}

} // namespace

std::vector<ExperimentRecord> run_k_sweep(const ExperimentConfig& config,
                                          unsigned jobs) {
    std::vector<ExperimentRecord> records;
    sweep_blocks(config, jobs, [&](std::vector<ExperimentRecord>&& block) {
        records.insert(records.end(), block.begin(), block.end());
    });
    return records;
}

void run_k_sweep_csv(const ExperimentConfig& config, std::ostream& out,
                     unsigned jobs) {
    out << kRecordCsvHeader << '\n';
    sweep_blocks(config, jobs, [&](std::vector<ExperimentRecord>&& block) {
        write_records_rows(out, block);
    });
}

std::vector<ExperimentRecord> run_boxplot_study(
    std::span<const Margin> margins, Dependence dep,
    std::span<const std::size_t> n_grid,
    const std::map<std::size_t, std::size_t>& k_rule,
    std::size_t replications, std::uint64_t master_seed, unsigned jobs,
    RowNorm norm) {
    require(!margins.empty(), "boxplot: empty margins");
    require(!n_grid.empty(), "boxplot: empty n_grid");
    require(replications >= 1, "boxplot: replications must be >= 1");
    const std::size_t d = margins.size();
    std::vector<std::size_t> ns(n_grid.begin(), n_grid.end());
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (std::size_t n : ns) {
        require(k_rule.count(n) == 1, "boxplot: k_rule missing an n");
        const std::size_t k = k_rule.at(n);
        require(k >= 2 && k + 1 <= n, "boxplot: need 2 <= k <= n-1");
    }
    // True coefficients relative to margin 1 (throws on mismatched tails).
    const std::vector<TailProfile> profiles = tail_profiles(margins);

    std::vector<ExperimentRecord> records(ns.size() * replications *
                                          (d > 1 ? d - 1 : 0));
    parallel_for(ns.size() * replications, jobs, [&](std::size_t idx) {
        const std::size_t ni = idx / replications;
        const std::size_t r = idx % replications;
        const std::size_t n = ns[ni];
        const std::size_t k = k_rule.at(n);
        const SampleMatrix sample = draw_sample(
            margins, dep, n, derive_stream_seed(master_seed, idx));
        bool valid = true;
        std::vector<double> c_hat;
        try {
            const TailEstimates est = estimate_tail(sample, k, norm);
            valid = est.gamma_hat > 0.0;
            c_hat = est.c_hat;
        } catch (const std::domain_error&) {
            valid = false;
        }
        for (std::size_t comp = 1; comp < d; ++comp) {
            ExperimentRecord rec;
            rec.alpha = 0.0;
            rec.k = k;
            rec.n = n;
            rec.rep = r + 1;
            rec.component = comp + 1;
            rec.exact = profiles[comp].c;
            rec.estimate = valid ? c_hat[comp] : kNaN;
            rec.ratio = valid ? rec.estimate / rec.exact : kNaN;
            rec.error_flag = !valid;
            records[idx * (d - 1) + (comp - 1)] = rec;
        }
    });
    return records;
}

} // namespace tailex
