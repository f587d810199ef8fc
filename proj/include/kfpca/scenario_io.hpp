#ifndef KFPCA_SCENARIO_IO_HPP
#define KFPCA_SCENARIO_IO_HPP

#include <json.hpp>

#include <string>

#include "kfpca/model_io.hpp"
#include "kfpca/simgen.hpp"

namespace kfpca {

inline nlohmann::json scenario_to_json(const SimulationScenario& s) {
  return {{"case", s.case_id},        {"distribution", std::string(to_string(s.distribution))},
          {"N", s.n},                 {"d", s.d},
          {"sigma2", s.sigma2},       {"lambdas", {s.lambdas[0], s.lambdas[1]}},
          {"runs", s.runs},           {"seed", s.seed}};
}

/// Missing fields keep their defaults; present fields are type-checked.
inline SimulationScenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("/", "expected an object");
  SimulationScenario s;
  const auto count = [&](const char* key, auto& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_unsigned()) throw ParseError(std::string("/") + key, "expected a nonnegative integer");
    dst = j[key].get<std::decay_t<decltype(dst)>>();
  };
  if (j.contains("case")) {
    if (!j["case"].is_number_integer()) throw ParseError("/case", "expected 1 or 2");
    s.case_id = j["case"].get<int>();
  }
  if (j.contains("distribution")) {
    const auto& v = j["distribution"];
    auto dist = v.is_string() ? parse_distribution(v.get<std::string>()) : std::nullopt;
    if (!dist) throw ParseError("/distribution", std::string("expected one of ") + kDistributionNames);
    s.distribution = *dist;
  }
  count("N", s.n);
  count("d", s.d);
  count("runs", s.runs);
  count("seed", s.seed);
  if (j.contains("sigma2")) s.sigma2 = detail::number_at(j["sigma2"], "/sigma2");
  if (j.contains("lambdas")) {
    const Vector l = detail::sized_vector_at(j["lambdas"], "/lambdas", 2);
    s.lambdas = {l[0], l[1]};
  }
  try {
    s.validate();
  } catch (const ConfigurationError& e) {
    throw ParseError("/", e.what());
  }
  return s;
}

}  // namespace kfpca

#endif  // KFPCA_SCENARIO_IO_HPP
