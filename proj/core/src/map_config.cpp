#include "acim/map_config.hpp"

#include <algorithm>
#include <initializer_list>
#include <string>

#include "json.hpp"

#include "acim/builtins.hpp"
#include "acim/common.hpp"
#include "acim/first_return.hpp"
#include "acim/io.hpp"

namespace acim {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(errc::bad_config, "unknown key \"" + it.key() + "\" in " + where);
  }
}

double require_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(errc::bad_config, where + " needs \"" + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number()) fail(errc::bad_config, "\"" + std::string(key) + "\" in " + where + " must be a number");
  return v.get<double>();
}

PiecewiseMap from_json(const json& j, std::size_t max_return_time, double tail_tol) {
  if (!j.is_object()) fail(errc::bad_config, "map description must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string())
    fail(errc::bad_config, "map description needs a string \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();

  if (kind == "three_branch" || kind == "doubling" || kind == "shifted_linear" ||
      kind == "harmonic") {
    reject_unknown(j, {"kind"}, "a \"" + kind + "\" map");
    return builtin(kind);
  }

  if (kind == "conjugated_exp") {
    reject_unknown(j, {"kind", "k"}, "a \"conjugated_exp\" map");
    if (!j.contains("k") || !j.at("k").is_number_integer())
      fail(errc::bad_config, "\"conjugated_exp\" needs an integer \"k\"");
    const auto k = j.at("k").get<std::int64_t>();
    if (k < 2) fail(errc::bad_config, "\"k\" must be at least 2");
    return builtin(kind, static_cast<std::size_t>(k));
  }

  if (kind == "linear") {
    reject_unknown(j, {"kind", "branches"}, "a \"linear\" map");
    if (!j.contains("branches") || !j.at("branches").is_array() || j.at("branches").empty())
      fail(errc::bad_config, "\"linear\" needs a non-empty \"branches\" array");
    std::vector<Branch> branches;
    for (const json& bj : j.at("branches")) {
      if (!bj.is_object()) fail(errc::bad_config, "each branch must be a JSON object");
      reject_unknown(bj, {"a", "b", "slope", "intercept"}, "a branch");
      const double a = require_number(bj, "a", "a branch");
      const double b = require_number(bj, "b", "a branch");
      const double slope = require_number(bj, "slope", "a branch");
      if (!(slope > 0.0)) fail(errc::bad_config, "branch slope must be positive");
      if (bj.contains("intercept")) {
        branches.push_back(Branch::affine(a, b, slope, bj.at("intercept").get<double>()));
      } else {
        branches.push_back(Branch::affine_vanishing(a, b, slope));
      }
    }
    std::sort(branches.begin(), branches.end(),
              [](const Branch& x, const Branch& y) { return x.a() < y.a(); });
    try {
      return PiecewiseMap(std::move(branches), std::nullopt, false, "linear");
    } catch (const error& e) {
      fail(errc::bad_config, std::string("branch layout rejected: ") + e.what());
    }
  }

  if (kind == "first_return") {
    reject_unknown(j, {"kind", "base", "eps"}, "a \"first_return\" map");
    if (!j.contains("base") || !j.at("base").is_object())
      fail(errc::bad_config, "\"first_return\" needs a \"base\" map object");
    const double eps = require_number(j, "eps", "a \"first_return\" map");
    if (!(eps > 0.0) || !(eps < 1.0)) fail(errc::bad_config, "\"eps\" must lie in (0,1)");
    PiecewiseMap base = from_json(j.at("base"), max_return_time, tail_tol);
    FirstReturnOptions opt;
    opt.max_return_time = max_return_time;
    opt.tail_tol = tail_tol;
    return first_return_map(base, eps, opt).map;
  }

  fail(errc::bad_config, "unknown map kind \"" + kind + "\"");
}

}  // namespace

PiecewiseMap load_map_json(const std::string& text, std::size_t max_return_time,
                           double tail_tol) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(errc::bad_config, std::string("json parse error: ") + e.what());
  }
  return from_json(j, max_return_time, tail_tol);
}

PiecewiseMap load_map_file(const std::string& path, std::size_t max_return_time,
                           double tail_tol) {
  return load_map_json(read_file(path), max_return_time, tail_tol);
}

}  // namespace acim
