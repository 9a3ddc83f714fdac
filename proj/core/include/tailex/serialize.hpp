#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "tailex/asymptotics.hpp"
#include "tailex/estimation.hpp"
#include "tailex/expectile.hpp"
#include "tailex/margins.hpp"
#include "tailex/simulation.hpp"

// JSON wire formats (all parsing errors throw std::invalid_argument):
//   margin   {"family":"pareto"|"burr"|"student","params":{...},
//             "location":0,"scale":1}
//            params: pareto {"a","b"}; burr {"a","b","tau"};
//            student {"scale","z"}
//   problem  {"margins":[...],"weights":[[...]],
//             "dependence":"independent"|"comonotonic","alpha":0.99}
//            weights optional (defaults to all ones)
//   limit    {"eta":...,"beta":[1,...]}
//   solution {"point":[...],"residual_norm":...,"iterations":...}
//   estimates {"gamma_hat":...,"c_hat":[...],"k":...,"expectile":[...]}
//   sweep config: see experiment_config_from_json
// Samples CSV: header "x1,...,xd", one observation per line.

namespace tailex {

std::string to_json(const Margin& m);
Margin margin_from_json(std::string_view text);

std::string to_json(const ExpectileProblem& p);
ExpectileProblem problem_from_json(std::string_view text);

std::string to_json(const LimitVector& lv);
LimitVector limit_vector_from_json(std::string_view text);

std::string to_json(const ExpectileSolution& s);

std::string estimates_to_json(const TailEstimates& est,
                              std::span<const double> expectile);

ExperimentConfig experiment_config_from_json(std::string_view text);

SampleMatrix samples_from_csv(std::istream& in);
void samples_to_csv(std::ostream& out, const SampleMatrix& samples);

} // namespace tailex
