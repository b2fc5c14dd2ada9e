#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "projcred/datagen.hpp"

namespace projcred {

enum class Scale { full, desk };

// Monte Carlo budgets per scale: full = 3000 / 50 / 3000 (frequentist
// replicates / posterior realizations / draws per realization),
// desk = 1000 / 20 / 1000.
McBudget budget_for(Scale scale);

struct CustomExperiment {
    std::vector<double> values;
    std::vector<int> multiplicities;
    std::vector<std::string> laws;
    int first_cluster = 1;  // 1-based, inclusive
    int last_cluster = 1;

    bool operator==(const CustomExperiment&) const = default;
};

struct BoundsOptions {
    std::string delta_case = "gaussian";
    std::optional<double> radius;
    int moment_draws = 100000;

    bool operator==(const BoundsOptions&) const = default;
};

struct RunConfig {
    std::string experiment = "exp1";  // exp1 | exp2 | custom
    std::optional<CustomExperiment> custom;
    std::vector<int> n_grid = default_n_grid();
    McBudget budget = budget_for(Scale::full);
    double g_scale = 1.0;  // prior scale G = g_scale * I_p
    double b = 1.0;
    std::vector<double> levels{0.99, 0.95, 0.90, 0.85, 0.80, 0.75};
    std::uint64_t seed = 20190601;
    int workers = 1;
    std::string out_dir = ".";
    BoundsOptions bounds;

    bool operator==(const RunConfig&) const = default;

    // Throws ConfigError on any invalid field.
    void validate() const;
};

// JSON encoding. Unknown keys and wrongly typed values are ConfigErrors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

// Design for the configured experiment; seeds the spectrum tail with
// config.seed.
ExperimentDesign make_design(const RunConfig& config);

}  // namespace projcred
