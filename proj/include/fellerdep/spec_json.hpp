#pragma once

#include "fellerdep/process.hpp"
#include "fellerdep/test_function.hpp"
#include "fellerdep/triplet.hpp"

#include <json.hpp>

#include <string>

namespace fellerdep
{
/// Schema violation; `key` is the dotted path of the offending entry.
class SchemaError : public SpecError
{
  public:
    SchemaError(const std::string& key, const std::string& what)
        : SpecError(key + ": " + what), key_(key)
    {
    }
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

/// Parses JSON text; syntax errors become SchemaError with "line L, column C".
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

/**
 * Process specs:
 *   "preset-name" or {"preset": name}
 *   {"kind": "jump_levy", "drift": [..], "nu": NU}
 *   {"kind": "ornstein_uhlenbeck", "mean_reversion": l, "driver": {"drift": [..], "nu": NU}}
 *   {"kind": "pseudo_poisson", "rate": l, "kernel": {"kind": "table", "states": [..], "matrix": [[..]]}
 *                                                 | {"kind": "translation", "law": LAW}}
 *   {"kind": "subordinated", "inner": {"kind": "drift", "velocity": [..]} | jump_levy object,
 *    "subordinator": {"drift": b, "alpha": a} | {"drift": b, "rate": r, "atoms": [..]}}
 * NU is {"rate": r, "atoms": [{"point": [..], "weight": w}, ..]} or
 * {"kind": "exponential_ray", "rate": r, "direction": [..], "mean": m}.
 */
ProcessSpec process_from_json(const nlohmann::json& j, const std::string& key = "process");

/// Levy measure of dimension d; also accepts {"kind": "alpha_stable", "alpha", "y_min", "direction"}.
LevyMeasure measure_from_json(const nlohmann::json& j, int d, const std::string& key);

/// {"d", "drift": [..] | {"b0": [..], "lambda": l}, "diffusion"?: [[..]], "nu": NU, "symbol_bounded"?: bool}
StateTriplet triplet_from_json(const nlohmann::json& j, const std::string& key = "triplet");

/// {"kind": "logistic" | "logistic_product" | "upper_orthant" | "lower_orthant" | "linear" |
///  "coordinate_product" | "clipped" | "gaussian" | "constant", ...}
TestFunction test_function_from_json(const nlohmann::json& j, int d, const std::string& key);

Vec vec_from_json(const nlohmann::json& j, const std::string& key, int expected_dim = -1);
nlohmann::json vec_to_json(const Vec& v);

}  // namespace fellerdep
