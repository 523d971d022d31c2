#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "deltalap/grid.hpp"
#include "deltalap/quadrature.hpp"

namespace deltalap {

inline const std::vector<std::string> experiment_tags = {"greens",     "frac",       "decompose", "embed",
                                                          "dispersive", "strichartz", "nls",       "verify-all"};

struct ExperimentConfig {
    std::string experiment = "verify-all";
    int d = 3;
    double alpha = -1.0;
    double alpha_2d = 0.0;  // coupling of the two dimensional models
    GridSpec grid;
    QuadratureScheme quadrature;
    std::optional<double> s, p, q, r, p_nl, mu, T, tau;
    std::uint64_t seed = 1;
    int family_size = 20;
    bool checkpoints = false;

    // throws ConfigError naming the violated constraint
    void validate() const;
    nlohmann::json to_json() const;
};

// JSON when the text starts with '{', TOML otherwise
nlohmann::json parse_config_text(const std::string& text);

// "a.b=v": the value is read as a JSON literal when possible, as a string otherwise
void apply_override(nlohmann::json& tree, const std::string& assignment);

ExperimentConfig config_from_json(const nlohmann::json& tree);

// defaults, then the file (if any), then the overrides; validated
ExperimentConfig load_config(const std::string& experiment, const std::string& path,
                             const std::vector<std::string>& overrides);

}  // namespace deltalap
