#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "tailex/estimation.hpp"
#include "tailex/expectile.hpp"

namespace tailex {

// Inverse-transform sampling. Independent rows use d uniforms per row in
// column order; comonotonic rows transform one shared uniform per row, so
// the sorting permutation of every column is identical. Deterministic for a
// fixed seed (SplitMix64 stream).
SampleMatrix draw_sample(std::span<const Margin> margins, Dependence dep,
                         std::size_t n, std::uint64_t seed);

struct ExperimentConfig {
    std::vector<Margin> margins;
    Dependence dependence = Dependence::independent;
    std::vector<double> alpha_grid;
    std::vector<std::size_t> k_grid; // empty -> {n/200, n/100, n/50, n/20}
    std::size_t n = 0;
    std::size_t replications = 100;
    std::uint64_t master_seed = 0;
    RowNorm norm = RowNorm::l1;

    void validate() const;
    std::vector<std::size_t> effective_k_grid() const;
};

struct ExperimentRecord {
    double alpha = 0.0;
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t rep = 0;       // 1-based in output
    std::size_t component = 0; // 1-based in output
    double exact = 0.0;
    double estimate = 0.0;
    double ratio = 0.0;
    bool error_flag = false;   // replication's gamma_hat outside (0,1)
};

inline constexpr const char* kRecordCsvHeader =
    "alpha,k,n,rep,component,exact,estimate,ratio,error_flag";

void write_records_csv(std::ostream& out,
                       std::span<const ExperimentRecord> records);
// Rows only, no header line.
void write_records_rows(std::ostream& out,
                        std::span<const ExperimentRecord> records);

// Exact solver output per alpha; rethrows solver failures tagged with the
// offending alpha.
std::vector<ExpectileSolution> exact_reference_curve(
    std::span<const Margin> margins, const WeightMatrix& weights,
    Dependence dep, std::span<const double> alpha_grid, double tol = 1e-9);

// One record per (alpha, k, replication, component) comparing the
// dependence-matched extreme-expectile estimator against the exact solver.
// Replication r draws from stream derive_stream_seed(master_seed, r); the
// same sample serves every (alpha, k). Rows come out sorted by
// (alpha, k, rep, component) regardless of `jobs`.
std::vector<ExperimentRecord> run_k_sweep(const ExperimentConfig& config,
                                          unsigned jobs = 1);

// Same sweep, but rows stream to `out` one alpha-block at a time instead of
// accumulating the full record set (the per-replication sufficient
// statistics are the only thing held across blocks).
void run_k_sweep_csv(const ExperimentConfig& config, std::ostream& out,
                     unsigned jobs = 1);

// Distribution of c_hat_i over replications for each n in the grid; k is
// k_rule.at(n). alpha is not involved and is recorded as 0. Components 2..d.
std::vector<ExperimentRecord> run_boxplot_study(
    std::span<const Margin> margins, Dependence dep,
    std::span<const std::size_t> n_grid,
    const std::map<std::size_t, std::size_t>& k_rule,
    std::size_t replications, std::uint64_t master_seed, unsigned jobs = 1,
    RowNorm norm = RowNorm::l1);

} // namespace tailex
