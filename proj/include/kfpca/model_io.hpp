#ifndef KFPCA_MODEL_IO_HPP
#define KFPCA_MODEL_IO_HPP

#include <json.hpp>

#include <string>
#include <vector>

#include "kfpca/model.hpp"

namespace kfpca {

inline constexpr const char* kModelSchemaVersion = "1";

namespace detail {

using json = nlohmann::json;

inline json to_json_array(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline json to_json_rows(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json_array(m.row(i).transpose()));
  return rows;
}

inline json bandwidth_to_json(const Bandwidth& b) { return b.is_auto() ? json("auto") : json(b.value()); }

inline const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path.empty() ? "/" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "/" + key, "missing field \"" + key + "\"");
  return *it;
}

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

inline bool bool_at(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ParseError(path, "expected a boolean");
  return j.get<bool>();
}

inline Vector vector_at(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_at(j[i], path + "/" + std::to_string(i));
  return v;
}

inline Vector sized_vector_at(const json& j, const std::string& path, std::size_t expected) {
  Vector v = vector_at(j, path);
  if (static_cast<std::size_t>(v.size()) != expected)
    throw ParseError(path, "expected " + std::to_string(expected) + " values, found " + std::to_string(v.size()));
  return v;
}

inline Bandwidth bandwidth_at(const json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "auto") return Bandwidth::automatic();
  try {
    return Bandwidth::fixed(number_at(j, path));
  } catch (const ConfigurationError& e) {
    throw ParseError(path, e.what());
  }
}

inline json config_to_json(const FitConfig& c) {
  json j;
  j["method"] = std::string(to_string(c.method));
  if (c.n_components.is_fixed())
    j["n_components"] = c.n_components.count();
  else
    j["fve_threshold"] = c.n_components.threshold();
  j["presmooth"] = c.presmooth;
  j["presmooth_bandwidth"] = bandwidth_to_json(c.presmooth_bandwidth);
  j["eigen_smooth"] = c.eigen_smooth;
  j["eigen_bandwidth"] = bandwidth_to_json(c.eigen_bandwidth);
  j["degenerate_tol"] = c.degenerate_tol;
  j["seed"] = c.seed;
  return j;
}

inline Method method_at(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  auto m = parse_method(j.get<std::string>());
  if (!m) throw ParseError(path, "unknown method \"" + j.get<std::string>() + "\" (expected kfpca or cov)");
  return *m;
}

inline FitConfig config_from_json(const json& j, const std::string& path) {
  FitConfig c;
  c.method = method_at(field(j, "method", path), path + "/method");
  try {
    if (j.contains("n_components")) {
      const json& n = j["n_components"];
      if (!n.is_number_unsigned()) throw ParseError(path + "/n_components", "expected a positive integer");
      c.n_components = ComponentSelection::fixed(n.get<std::size_t>());
    } else {
      c.n_components = ComponentSelection::fve(number_at(field(j, "fve_threshold", path), path + "/fve_threshold"));
    }
  } catch (const ConfigurationError& e) {
    throw ParseError(path + "/n_components", e.what());
  }
  c.presmooth = bool_at(field(j, "presmooth", path), path + "/presmooth");
  c.presmooth_bandwidth = bandwidth_at(field(j, "presmooth_bandwidth", path), path + "/presmooth_bandwidth");
  c.eigen_smooth = bool_at(field(j, "eigen_smooth", path), path + "/eigen_smooth");
  c.eigen_bandwidth = bandwidth_at(field(j, "eigen_bandwidth", path), path + "/eigen_bandwidth");
  c.degenerate_tol = number_at(field(j, "degenerate_tol", path), path + "/degenerate_tol");
  const json& seed = field(j, "seed", path);
  if (!seed.is_number_unsigned()) throw ParseError(path + "/seed", "expected a nonnegative integer");
  c.seed = seed.get<std::uint64_t>();
  return c;
}

}  // namespace detail

/// Model document as a JSON value. Doubles are written in shortest
/// round-trip form, so reading the document back is exact.
inline nlohmann::json serialize_model(const FpcaModel& model) {
  using detail::json;
  json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["method"] = std::string(to_string(model.method()));
  doc["grid"] = {{"points", detail::to_json_array(model.grid->points())},
                 {"weights", detail::to_json_array(model.grid->weights())}};
  doc["mean"] = detail::to_json_array(model.mean.values());
  doc["eigenvalues_operator"] = detail::to_json_array(model.operator_eigenvalues);
  doc["component_variances"] = detail::to_json_array(model.component_variances);
  json phis = json::array();
  for (const Curve& phi : model.eigenfunctions) phis.push_back(detail::to_json_array(phi.values()));
  doc["eigenfunctions"] = std::move(phis);
  doc["scores"] = detail::to_json_rows(model.scores);
  doc["fve"] = model.fve;
  doc["config"] = detail::config_to_json(model.config);
  return doc;
}

inline FpcaModel deserialize_model(const nlohmann::json& doc) {
  using detail::field;
  const auto& version = field(doc, "schema_version", "");
  if (!version.is_string() || version.get<std::string>() != kModelSchemaVersion)
    throw ParseError("/schema_version", std::string("unsupported schema version (expected \"") +
                                            kModelSchemaVersion + "\")");
  const Method method = detail::method_at(field(doc, "method", ""), "/method");

  const auto& grid_doc = field(doc, "grid", "");
  Vector points = detail::vector_at(field(grid_doc, "points", "/grid"), "/grid/points");
  GridPtr grid;
  try {
    if (grid_doc.contains("weights")) {
      Vector weights = detail::sized_vector_at(grid_doc["weights"], "/grid/weights", static_cast<std::size_t>(points.size()));
      grid = std::make_shared<const Grid>(std::move(points), std::move(weights));
    } else {
      grid = std::make_shared<const Grid>(Grid::trapezoid(std::move(points)));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError("/grid", e.what());
  }
  const std::size_t d = grid->size();

  Curve mean(grid, detail::sized_vector_at(field(doc, "mean", ""), "/mean", d));

  const auto& phis = field(doc, "eigenfunctions", "");
  if (!phis.is_array()) throw ParseError("/eigenfunctions", "expected an array of arrays");
  std::vector<Curve> eigenfunctions;
  for (std::size_t k = 0; k < phis.size(); ++k)
    eigenfunctions.emplace_back(grid, detail::sized_vector_at(phis[k], "/eigenfunctions/" + std::to_string(k), d));
  const std::size_t kk = eigenfunctions.size();
  if (kk == 0) throw ParseError("/eigenfunctions", "a model needs at least one eigenfunction");

  Vector lambdas = detail::sized_vector_at(field(doc, "eigenvalues_operator", ""), "/eigenvalues_operator", kk);
  Vector variances = detail::sized_vector_at(field(doc, "component_variances", ""), "/component_variances", kk);

  const auto& score_rows = field(doc, "scores", "");
  if (!score_rows.is_array()) throw ParseError("/scores", "expected an array of arrays");
  Matrix scores(static_cast<Eigen::Index>(score_rows.size()), static_cast<Eigen::Index>(kk));
  for (std::size_t i = 0; i < score_rows.size(); ++i)
    scores.row(static_cast<Eigen::Index>(i)) =
        detail::sized_vector_at(score_rows[i], "/scores/" + std::to_string(i), kk).transpose();

  const double fve = doc.contains("fve") ? detail::number_at(doc["fve"], "/fve") : 0.0;
  FitConfig config = detail::config_from_json(field(doc, "config", ""), "/config");
  if (config.method != method) throw ParseError("/config/method", "disagrees with top-level method");

  return FpcaModel{grid, std::move(mean), std::move(eigenfunctions), std::move(lambdas), std::move(variances),
                   std::move(scores), fve, config};
}

}  // namespace kfpca

#endif  // KFPCA_MODEL_IO_HPP
