#include "tailex/serialize.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace tailex {

using nlohmann::json;

namespace {

json parse(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw std::invalid_argument("invalid JSON");
    return j;
}

double get_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument(std::string("missing numeric field \"") +
                                    key + "\"");
    return j.at(key).get<double>();
}

json margin_to_jobj(const Margin& m) {
    json params;
    const char* family = nullptr;
    if (const auto* p = std::get_if<ParetoParams>(&m.family())) {
        family = "pareto";
        params = {{"a", p->shape}, {"b", p->scale}};
    } else if (const auto* b = std::get_if<BurrParams>(&m.family())) {
        family = "burr";
        params = {{"a", b->shape}, {"b", b->scale}, {"tau", b->tau}};
    } else {
        const auto& s = std::get<StudentParams>(m.family());
        family = "student";
        params = {{"scale", s.scale}, {"z", s.dof}};
    }
    return json{{"family", family},
                {"params", params},
                {"location", m.location()},
                {"scale", m.scale_mult()}};
}

Margin margin_from_jobj(const json& j) {
    if (!j.is_object() || !j.contains("family") || !j.contains("params"))
        throw std::invalid_argument(
            "margin: expected {\"family\",\"params\",...}");
    const std::string family = j.at("family").get<std::string>();
    const json& params = j.at("params");
    Margin m = [&] {
        if (family == "pareto")
            return Margin::pareto(get_number(params, "a"),
                                  get_number(params, "b"));
        if (family == "burr")
            return Margin::burr(get_number(params, "a"),
                                get_number(params, "b"),
                                get_number(params, "tau"));
        if (family == "student")
            return Margin::scaled_student(get_number(params, "scale"),
                                          get_number(params, "z"));
        throw std::invalid_argument("margin: unknown family \"" + family +
                                    "\"");
    }();
    if (j.contains("scale")) m = m.with_scale(get_number(j, "scale"));
    if (j.contains("location")) m = m.with_location(get_number(j, "location"));
    return m;
}

std::vector<Margin> margins_from_jobj(const json& j) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument("margins: expected a nonempty array");
    std::vector<Margin> out;
    out.reserve(j.size());
    for (const json& mj : j) out.push_back(margin_from_jobj(mj));
    return out;
}

Dependence dependence_from_string(const std::string& s) {
    if (s == "independent") return Dependence::independent;
    if (s == "comonotonic") return Dependence::comonotonic;
    throw std::invalid_argument(
        "dependence: expected \"independent\" or \"comonotonic\"");
}

RowNorm norm_from_string(const std::string& s) {
    if (s == "l1") return RowNorm::l1;
    if (s == "max") return RowNorm::max;
    throw std::invalid_argument("norm: expected \"l1\" or \"max\"");
}

} // namespace

std::string to_json(const Margin& m) { return margin_to_jobj(m).dump(); }

Margin margin_from_json(std::string_view text) {
    return margin_from_jobj(parse(text));
}

std::string to_json(const ExpectileProblem& p) {
    json margins = json::array();
    for (const Margin& m : p.margins) margins.push_back(margin_to_jobj(m));
    json weights = json::array();
    for (std::size_t i = 0; i < p.weights.dim(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < p.weights.dim(); ++j)
            row.push_back(p.weights(i, j));
        weights.push_back(row);
    }
    return json{{"margins", margins},
                {"weights", weights},
                {"dependence", p.dependence == Dependence::independent
                                   ? "independent"
                                   : "comonotonic"},
                {"alpha", p.alpha}}
        .dump();
}

ExpectileProblem problem_from_json(std::string_view text) {
    const json j = parse(text);
    if (!j.is_object() || !j.contains("margins") || !j.contains("alpha") ||
        !j.contains("dependence"))
        throw std::invalid_argument(
            "problem: expected {\"margins\",\"dependence\",\"alpha\"}");
    std::vector<Margin> margins = margins_from_jobj(j.at("margins"));
    WeightMatrix weights = WeightMatrix::all_ones(margins.size());
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        if (!w.is_array())
            throw std::invalid_argument("problem: weights must be an array");
        std::vector<std::vector<double>> rows;
        for (const json& r : w) rows.push_back(r.get<std::vector<double>>());
        weights = WeightMatrix::from_rows(rows);
    }
    ExpectileProblem p{std::move(margins), weights,
                       dependence_from_string(
                           j.at("dependence").get<std::string>()),
                       get_number(j, "alpha")};
    p.validate();
    return p;
}

std::string to_json(const LimitVector& lv) {
    return json{{"eta", lv.eta}, {"beta", lv.beta}}.dump();
}

LimitVector limit_vector_from_json(std::string_view text) {
    const json j = parse(text);
    if (!j.is_object() || !j.contains("eta") || !j.contains("beta"))
        throw std::invalid_argument("limit: expected {\"eta\",\"beta\"}");
    LimitVector lv;
    lv.eta = get_number(j, "eta");
    lv.beta = j.at("beta").get<std::vector<double>>();
    if (lv.beta.empty() || lv.beta[0] != 1.0)
        throw std::invalid_argument("limit: beta must start with 1");
    return lv;
}

std::string to_json(const ExpectileSolution& s) {
    return json{{"point", s.point},
                {"residual_norm", s.residual_norm},
                {"iterations", s.iterations}}
        .dump();
}

std::string estimates_to_json(const TailEstimates& est,
                              std::span<const double> expectile) {
    return json{{"gamma_hat", est.gamma_hat},
                {"c_hat", est.c_hat},
                {"k", est.k},
                {"expectile",
                 std::vector<double>(expectile.begin(), expectile.end())}}
        .dump();
}

ExperimentConfig experiment_config_from_json(std::string_view text) {
    const json j = parse(text);
    if (!j.is_object() || !j.contains("margins") || !j.contains("n") ||
        !j.contains("dependence") || !j.contains("alpha_grid"))
        throw std::invalid_argument(
            "config: expected {\"margins\",\"dependence\",\"alpha_grid\","
            "\"n\",...}");
    ExperimentConfig cfg;
    cfg.margins = margins_from_jobj(j.at("margins"));
    cfg.dependence =
        dependence_from_string(j.at("dependence").get<std::string>());
    cfg.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    if (j.contains("k_grid"))
        cfg.k_grid = j.at("k_grid").get<std::vector<std::size_t>>();
    cfg.n = j.at("n").get<std::size_t>();
    if (j.contains("replications"))
        cfg.replications = j.at("replications").get<std::size_t>();
    if (j.contains("master_seed"))
        cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("norm"))
        cfg.norm = norm_from_string(j.at("norm").get<std::string>());
    cfg.validate();
    return cfg;
}

SampleMatrix samples_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("samples csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Header x1,...,xd fixes the width.
    std::size_t d = 0;
    {
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = line.find(',', pos);
            const std::string cell =
                line.substr(pos, comma == std::string::npos ? std::string::npos
                                                            : comma - pos);
            ++d;
            const std::string want = "x" + std::to_string(d);
            if (cell != want)
                throw std::invalid_argument(
                    "samples csv: expected header column \"" + want +
                    "\", got \"" + cell + "\"");
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    SampleMatrix s;
    s.d = d;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t pos = 0;
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t comma = line.find(',', pos);
            const char* first = line.data() + pos;
            const char* last =
                comma == std::string::npos ? line.data() + line.size()
                                           : line.data() + comma;
            double v = 0.0;
            const auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc{} || res.ptr != last)
                throw std::invalid_argument("samples csv: bad number in row " +
                                            std::to_string(s.n + 1));
            s.data.push_back(v);
            if (j + 1 < d) {
                if (comma == std::string::npos)
                    throw std::invalid_argument(
                        "samples csv: short row " + std::to_string(s.n + 1));
                pos = comma + 1;
            } else if (comma != std::string::npos) {
                throw std::invalid_argument("samples csv: long row " +
                                            std::to_string(s.n + 1));
            }
        }
        ++s.n;
    }
    s.validate();
    return s;
}

void samples_to_csv(std::ostream& out, const SampleMatrix& samples) {
    samples.validate();
    std::string line;
    for (std::size_t j = 0; j < samples.d; ++j) {
        if (j) line += ',';
        line += 'x';
        line += std::to_string(j + 1);
    }
    line += '\n';
    out << line;
    char buf[32];
    for (std::size_t i = 0; i < samples.n; ++i) {
        line.clear();
        for (std::size_t j = 0; j < samples.d; ++j) {
            if (j) line += ',';
            const auto res =
                std::to_chars(buf, buf + sizeof(buf), samples.at(i, j));
            line.append(buf, res.ptr);
        }
        line += '\n';
        out << line;
    }
}

} // namespace tailex
