#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tailex/serialize.hpp"
#include "tailex/simulation.hpp"

namespace tailex::cli {

using nlohmann::json;

namespace {

const std::map<std::string, Verb> kVerbs = {
    {"exact", Verb::exact},       {"limit", Verb::limit},
    {"estimate", Verb::estimate}, {"simulate", Verb::simulate},
    {"sweep", Verb::sweep},       {"boxplot", Verb::boxplot},
};

[[noreturn]] void usage_error(const std::string& msg) {
    throw UsageError(msg +
                     "\nusage: tailex "
                     "{exact|limit|estimate|simulate|sweep|boxplot} "
                     "--config FILE [--output FILE] [--set key=value]... [--model M] "
                     "[--seed N] [--jobs N]");
}

std::string take_value(int argc, const char* const* argv, int& i,
                       const std::string& flag) {
    if (i + 1 >= argc) usage_error("missing value for " + flag);
    return argv[++i];
}

// Apply --set key=value to a scalar leaf addressed by a dot path.
void apply_override(json& config, const std::string& key,
                    const std::string& value) {
    json* node = &config;
    std::string leaf = key;
    for (;;) {
        const std::size_t dot = leaf.find('.');
        if (dot == std::string::npos) break;
        const std::string part = leaf.substr(0, dot);
        if (!node->is_object() || !node->contains(part))
            throw std::invalid_argument("--set: no object at \"" + part +
                                        "\" in config");
        node = &(*node)[part];
        leaf = leaf.substr(dot + 1);
    }
    if (!node->is_object())
        throw std::invalid_argument("--set: \"" + key +
                                    "\" does not address an object member");
    if (node->contains(leaf) &&
        ((*node)[leaf].is_object() || (*node)[leaf].is_array()))
        throw std::invalid_argument("--set: \"" + key +
                                    "\" is not a scalar leaf");
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded() || parsed.is_object() || parsed.is_array())
        parsed = value; // plain string
    (*node)[leaf] = parsed;
}

int write_output(const Command& cmd, const std::string& text) {
    if (cmd.output_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return 0;
    }
    std::ofstream out(cmd.output_path, std::ios::binary);
    if (!out) {
        std::cerr << "tailex: cannot open output file " << cmd.output_path
                  << "\n";
        return kExitIo;
    }
    out << text;
    out.flush();
    if (!out) {
        std::cerr << "tailex: failed writing " << cmd.output_path << "\n";
        return kExitIo;
    }
    return 0;
}

Dependence parse_dependence(const json& j) {
    const std::string s = j.get<std::string>();
    if (s == "independent") return Dependence::independent;
    if (s == "comonotonic") return Dependence::comonotonic;
    throw std::invalid_argument("dependence must be independent|comonotonic");
}

RowNorm parse_norm(const json& cfg) {
    if (!cfg.contains("norm")) return RowNorm::l1;
    const std::string s = cfg.at("norm").get<std::string>();
    if (s == "l1") return RowNorm::l1;
    if (s == "max") return RowNorm::max;
    throw std::invalid_argument("norm must be l1|max");
}

int run_exact(const Command& cmd, const json& cfg) {
    ExpectileProblem problem = problem_from_json(cfg.dump());
    const double tol = cfg.value("tol", 1e-9);
    const int max_iter = cfg.value("max_iter", 200);
    const ExpectileSolution sol =
        solve_multivariate_expectile(problem, tol, max_iter);
    return write_output(cmd, to_json(sol));
}

int run_limit(const Command& cmd, const json& cfg) {
    if (!cfg.contains("model") || !cfg.contains("theta") ||
        !cfg.contains("c"))
        throw std::invalid_argument(
            "limit config needs {\"model\",\"theta\",\"c\"}");
    const std::string model = cfg.at("model").get<std::string>();
    const double theta = cfg.at("theta").get<double>();
    const std::vector<double> c = cfg.at("c").get<std::vector<double>>();
    LimitVector lv;
    if (model == "como") {
        lv = limit_comonotonic(theta, c);
    } else if (model == "indep") {
        lv = limit_independent(theta, c);
    } else if (model == "archimedean") {
        if (!cfg.contains("theta_psi"))
            throw std::invalid_argument(
                "archimedean limit needs \"theta_psi\"");
        const double tol = cfg.value("tol", 1e-10);
        lv = solve_limit_system(
            theta, c,
            TailDependenceModel::archimedean(
                cfg.at("theta_psi").get<double>()),
            limit_independent(theta, c), tol);
    } else {
        throw std::invalid_argument("model must be indep|como|archimedean");
    }
    return write_output(cmd, to_json(lv));
}

int run_estimate(const Command& cmd, const json& cfg) {
    if (!cfg.contains("csv") || !cfg.contains("k") || !cfg.contains("alpha") ||
        !cfg.contains("dependence"))
        throw std::invalid_argument(
            "estimate config needs {\"csv\",\"k\",\"alpha\",\"dependence\"}");
    const std::string csv_path = cfg.at("csv").get<std::string>();
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        std::cerr << "tailex: cannot open samples file " << csv_path << "\n";
        return kExitIo;
    }
    const SampleMatrix samples = samples_from_csv(in);
    const std::size_t k = cfg.at("k").get<std::size_t>();
    const double alpha = cfg.at("alpha").get<double>();
    const Dependence dep = parse_dependence(cfg.at("dependence"));
    const RowNorm norm = parse_norm(cfg);
    const TailEstimates est = estimate_tail(samples, k, norm);
    const double var_hat =
        weissman_quantile(samples.column(0), k, est.gamma_hat, alpha);
    const std::vector<double> expectile =
        extreme_expectile_from_estimates(var_hat, est, dep);
    return write_output(cmd, estimates_to_json(est, expectile));
}

int run_simulate(const Command& cmd, const json& cfg) {
    if (!cfg.contains("margins") || !cfg.contains("dependence") ||
        !cfg.contains("n"))
        throw std::invalid_argument(
            "simulate config needs {\"margins\",\"dependence\",\"n\"}");
    const json margins_json{{"margins", cfg.at("margins")},
                            {"dependence", cfg.at("dependence")},
                            {"alpha", 0.5}};
    const ExpectileProblem tmp = problem_from_json(margins_json.dump());
    const std::size_t n = cfg.at("n").get<std::size_t>();
    const std::uint64_t seed = cfg.value("master_seed", std::uint64_t{0});
    const SampleMatrix s = draw_sample(tmp.margins, tmp.dependence, n, seed);
    std::ostringstream os;
    samples_to_csv(os, s);
    return write_output(cmd, os.str());
}

int run_sweep(const Command& cmd, const json& cfg) {
    const ExperimentConfig config = experiment_config_from_json(cfg.dump());
    for (double alpha : config.alpha_grid)
        std::cerr << "sweep: n=" << config.n << " alpha=" << alpha
                  << " replications=" << config.replications << "\n";
    if (cmd.output_path.empty()) {
        run_k_sweep_csv(config, std::cout, cmd.jobs);
        return 0;
    }
    std::ofstream out(cmd.output_path, std::ios::binary);
    if (!out) {
        std::cerr << "tailex: cannot open output file " << cmd.output_path
                  << "\n";
        return kExitIo;
    }
    run_k_sweep_csv(config, out, cmd.jobs);
    out.flush();
    if (!out) {
        std::cerr << "tailex: failed writing " << cmd.output_path << "\n";
        return kExitIo;
    }
    return 0;
}

int run_boxplot(const Command& cmd, const json& cfg) {
    if (!cfg.contains("margins") || !cfg.contains("dependence") ||
        !cfg.contains("n_grid") || !cfg.contains("k_rule") ||
        !cfg.contains("replications"))
        throw std::invalid_argument(
            "boxplot config needs {\"margins\",\"dependence\",\"n_grid\","
            "\"k_rule\",\"replications\"}");
    const json margins_json{{"margins", cfg.at("margins")},
                            {"dependence", cfg.at("dependence")},
                            {"alpha", 0.5}};
    const ExpectileProblem tmp = problem_from_json(margins_json.dump());
    const auto n_grid = cfg.at("n_grid").get<std::vector<std::size_t>>();
    if (!cfg.at("k_rule").is_object())
        throw std::invalid_argument("k_rule must map n -> k");
    std::map<std::size_t, std::size_t> k_rule;
    for (const auto& [key, value] : cfg.at("k_rule").items())
        k_rule[std::stoull(key)] = value.get<std::size_t>();
    const std::size_t reps = cfg.at("replications").get<std::size_t>();
    const std::uint64_t seed = cfg.value("master_seed", std::uint64_t{0});
    for (std::size_t n : n_grid)
        std::cerr << "boxplot: n=" << n << " replications=" << reps << "\n";
    const auto records =
        run_boxplot_study(tmp.margins, tmp.dependence, n_grid, k_rule, reps,
                          seed, cmd.jobs, parse_norm(cfg));
    std::ostringstream os;
    write_records_csv(os, records);
    return write_output(cmd, os.str());
}

} // namespace

Command parse_command(int argc, const char* const* argv) {
    if (argc < 2) usage_error("missing verb");
    Command cmd;
    const std::string verb = argv[1];
    const auto it = kVerbs.find(verb);
    if (it == kVerbs.end()) usage_error("unknown verb \"" + verb + "\"");
    cmd.verb = it->second;
    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config") {
            cmd.config_path = take_value(argc, argv, i, arg);
        } else if (arg == "--output") {
            cmd.output_path = take_value(argc, argv, i, arg);
        } else if (arg == "--set") {
            const std::string kv = take_value(argc, argv, i, arg);
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                usage_error("--set expects key=value, got \"" + kv + "\"");
            cmd.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        } else if (arg == "--model") {
            // shorthand for --set model=..., mainly for the limit verb
            cmd.overrides.emplace_back("model",
                                       take_value(argc, argv, i, arg));
        } else if (arg == "--seed") {
            try {
                cmd.seed = std::stoull(take_value(argc, argv, i, arg));
            } catch (const std::exception&) {
                usage_error("--seed expects an unsigned integer");
            }
        } else if (arg == "--jobs") {
            try {
                const long v = std::stol(take_value(argc, argv, i, arg));
                if (v < 1) throw std::out_of_range("jobs");
                cmd.jobs = static_cast<unsigned>(v);
            } catch (const std::exception&) {
                usage_error("--jobs expects a positive integer");
            }
        } else {
            usage_error("unknown flag \"" + arg + "\"");
        }
    }
    if (cmd.config_path.empty()) usage_error("--config is required");
    return cmd;
}

int run_command(const Command& cmd) {
    std::ifstream in(cmd.config_path, std::ios::binary);
    if (!in) {
        std::cerr << "tailex: cannot open config file " << cmd.config_path
                  << "\n";
        return kExitMissingConfig;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    json cfg = json::parse(buffer.str(), nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object()) {
        std::cerr << "tailex: config is not a JSON object\n";
        return kExitSchema;
    }
    try {
        for (const auto& [key, value] : cmd.overrides)
            apply_override(cfg, key, value);
        if (cmd.seed) cfg["master_seed"] = *cmd.seed;
        switch (cmd.verb) {
        case Verb::exact: return run_exact(cmd, cfg);
        case Verb::limit: return run_limit(cmd, cfg);
        case Verb::estimate: return run_estimate(cmd, cfg);
        case Verb::simulate: return run_simulate(cmd, cfg);
        case Verb::sweep: return run_sweep(cmd, cfg);
        case Verb::boxplot: return run_boxplot(cmd, cfg);
        }
        return kExitUsage;
    } catch (const ConvergenceError& e) {
        std::cerr << "tailex: solver did not converge: " << e.what() << "\n";
        const json diag{{"error", "non_convergence"},
                        {"message", e.what()},
                        {"best_point", e.best_point},
                        {"residual", e.residual},
                        {"iterations", e.iterations}};
        write_output(cmd, diag.dump());
        return kExitSolver;
    } catch (const std::invalid_argument& e) {
        std::cerr << "tailex: invalid config: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::domain_error& e) {
        std::cerr << "tailex: invalid config: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::out_of_range& e) {
        std::cerr << "tailex: invalid config: " << e.what() << "\n";
        return kExitSchema;
    } catch (const json::exception& e) {
        std::cerr << "tailex: invalid config: " << e.what() << "\n";
        return kExitSchema;
    }
}

} // namespace tailex::cli
