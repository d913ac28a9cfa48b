#include "slicegeo/config.hpp"

#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include "slicegeo/errors.hpp"

namespace slicegeo {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw_error(ErrorKind::config_error, "unknown key '" + key + "' in " + where);
  }
  for (const std::string& key : required) {
    if (!obj.contains(key))
      throw_error(ErrorKind::config_error, "missing key '" + key + "' in " + where);
  }
}

double parse_bound(const json& v, bool is_lower) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw_error(ErrorKind::config_error,
              std::string("t_domain ") + (is_lower ? "lower" : "upper") +
                  " bound must be a number or \"inf\"/\"-inf\"");
}

std::vector<double> parse_array(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty())
    throw_error(ErrorKind::config_error, what + " must be a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& item : v) {
    if (!item.is_number()) throw_error(ErrorKind::config_error, what + " must be numeric");
    out.push_back(item.get<double>());
  }
  return out;
}

json bound_to_json(double b) {
  if (b == std::numeric_limits<double>::infinity()) return "inf";
  if (b == -std::numeric_limits<double>::infinity()) return "-inf";
  return b;
}

}  // namespace

LoadedModel load_model(const nlohmann::json& config) {
  require_keys(config, {"model", "grid_n", "t_domain", "params"}, {"model", "grid_n", "t_domain"},
               "model config");
  const std::string kind = config.at("model").get<std::string>();
  const int grid_n = config.at("grid_n").get<int>();
  if (grid_n < 8) throw_error(ErrorKind::config_error, "grid_n must be at least 8");

  const json& dom = config.at("t_domain");
  if (!dom.is_array() || dom.size() != 2)
    throw_error(ErrorKind::config_error, "t_domain must be [lo, hi]");
  TDomain domain{parse_bound(dom[0], true), parse_bound(dom[1], false)};
  if (!(domain.lo < domain.hi)) throw_error(ErrorKind::config_error, "t_domain must be increasing");

  const json params = config.contains("params") ? config.at("params") : json::object();

  auto restrict_domain = [&](SpacetimeModel m) {
    // Built-ins default to the full line; an explicit finite window narrows it.
    if (!(domain.lo >= m.t_domain().lo && domain.hi <= m.t_domain().hi))
      throw_error(ErrorKind::config_error, "t_domain exceeds what the model supports");
    return SpacetimeModel::make_custom(m.kind_name(), [m](double x, double t) { return m.lapse(x, t); },
                                       [m](double x, double t) { return m.metric(x, t); }, domain,
                                       [m](double x, double t) { return m.dlapse_dt(x, t); },
                                       [m](double x, double t) { return m.dmetric_dt(x, t); });
  };

  if (kind == "static" || kind == "de_sitter") {
    require_keys(params, {}, {}, "params");
    SpacetimeModel m =
        kind == "static" ? SpacetimeModel::make_static() : SpacetimeModel::make_de_sitter();
    if (domain.is_finite()) return {restrict_domain(m), grid_n};
    if (std::isfinite(domain.lo) || std::isfinite(domain.hi))
      throw_error(ErrorKind::config_error, "t_domain must be fully finite or fully infinite");
    return {std::move(m), grid_n};
  }

  if (!domain.is_finite())
    throw_error(ErrorKind::config_error, "infinite t_domain is only valid for analytic built-ins");

  if (kind == "flrw_toy") {
    require_keys(params, {"t_knots", "scale", "lapse"}, {"t_knots", "scale", "lapse"},
                 "flrw_toy params");
    SpacetimeModel m = SpacetimeModel::make_flrw_toy(parse_array(params.at("t_knots"), "t_knots"),
                                                     parse_array(params.at("scale"), "scale"),
                                                     parse_array(params.at("lapse"), "lapse"));
    if (!(domain.lo >= m.t_domain().lo && domain.hi <= m.t_domain().hi))
      throw_error(ErrorKind::config_error, "t_domain exceeds the flrw_toy table range");
    return {restrict_domain(m), grid_n};
  }

  if (kind == "tabulated") {
    require_keys(params, {"x_n", "t_min", "t_max", "t_n", "beta", "metric"},
                 {"x_n", "t_min", "t_max", "t_n", "beta", "metric"}, "tabulated params");
    SpacetimeModel m = SpacetimeModel::make_tabulated(
        params.at("x_n").get<int>(), params.at("t_min").get<double>(),
        params.at("t_max").get<double>(), params.at("t_n").get<int>(),
        parse_array(params.at("beta"), "beta"), parse_array(params.at("metric"), "metric"));
    if (!(domain.lo >= m.t_domain().lo && domain.hi <= m.t_domain().hi))
      throw_error(ErrorKind::config_error, "t_domain exceeds the tabulated lattice range");
    // Tabulated models never support time translation, narrowed or not.
    if (domain.lo > m.t_domain().lo || domain.hi < m.t_domain().hi)
      return {restrict_domain(m).without_rebase(), grid_n};
    return {std::move(m), grid_n};
  }

  throw_error(ErrorKind::config_error, "unknown model kind '" + kind + "'");
}

LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::config_error, "cannot open model config '" + path + "'");
  json config;
  try {
    in >> config;
  } catch (const json::parse_error& e) {
    throw_error(ErrorKind::config_error, "invalid JSON in '" + path + "': " + e.what());
  }
  return load_model(config);
}

nlohmann::ordered_json to_tabulated_config(const SpacetimeModel& model, int grid_n, int x_n,
                                           int t_n, double t_lo, double t_hi) {
  nlohmann::ordered_json config;
  config["model"] = "tabulated";
  config["grid_n"] = grid_n;
  config["t_domain"] = {t_lo, t_hi};
  nlohmann::ordered_json params;
  params["x_n"] = x_n;
  params["t_min"] = t_lo;
  params["t_max"] = t_hi;
  params["t_n"] = t_n;
  std::vector<double> beta, metric;
  beta.reserve(static_cast<size_t>(x_n) * static_cast<size_t>(t_n));
  metric.reserve(beta.capacity());
  for (int i = 0; i < t_n; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / (t_n - 1);
    for (int j = 0; j < x_n; ++j) {
      const double x = 2.0 * std::numbers::pi * j / x_n;
      beta.push_back(model.lapse(x, t));
      metric.push_back(model.metric(x, t));
    }
  }
  params["beta"] = beta;
  params["metric"] = metric;
  config["params"] = std::move(params);
  return config;
}

nlohmann::ordered_json describe_model(const SpacetimeModel& model, int grid_n) {
  nlohmann::ordered_json out;
  out["kind"] = model.kind_name();
  out["grid_n"] = grid_n;
  out["t_domain"] = {bound_to_json(model.t_domain().lo), bound_to_json(model.t_domain().hi)};
  out["derivatives_fd"] = model.derivatives_fd();
  return out;
}

}  // namespace slicegeo
