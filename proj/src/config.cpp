#include "projcred/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "projcred/error.hpp"

namespace projcred {

using nlohmann::json;

McBudget budget_for(Scale scale) {
    return scale == Scale::full ? McBudget{3000, 50, 3000} : McBudget{1000, 20, 1000};
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key())) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

}  // namespace

void RunConfig::validate() const {
    if (experiment != "exp1" && experiment != "exp2" && experiment != "custom") {
        throw ConfigError("experiment must be exp1, exp2 or custom, got '" + experiment + "'");
    }
    if (experiment == "custom" && !custom) throw ConfigError("custom experiment needs a 'custom' block");
    if (n_grid.empty()) throw ConfigError("n_grid is empty");
    for (int n : n_grid) {
        if (n < 2) throw ConfigError("n_grid entries must be at least 2");
    }
    if (budget.freq_reps < 2 || budget.realizations < 2 || budget.draws < 2) {
        throw ConfigError("Monte Carlo budgets must be at least 2");
    }
    if (!(g_scale > 0.0)) throw ConfigError("prior.g_scale must be positive");
    if (!(b > 0.0)) throw ConfigError("prior.b must be positive");
    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0)) throw ConfigError("levels must lie in (0, 1)");
    }
    if (workers < 0) throw ConfigError("workers must be nonnegative");
    if (bounds.moment_draws < 1000) throw ConfigError("bounds.moment_draws must be at least 1000");
    try {
        (void)concentration_case_from_string(bounds.delta_case);
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root,
                   {"experiment", "custom", "n_grid", "budget", "prior", "levels", "seed", "workers",
                    "out", "bounds"},
                   "config");
    RunConfig c;
    if (root.contains("experiment")) c.experiment = get<std::string>(root, "experiment", "config");
    if (root.contains("custom")) {
        const json& cj = root.at("custom");
        reject_unknown(cj, {"values", "multiplicities", "laws", "selection"}, "custom");
        CustomExperiment ce;
        ce.values = get<std::vector<double>>(cj, "values", "custom");
        ce.multiplicities = get<std::vector<int>>(cj, "multiplicities", "custom");
        ce.laws = get<std::vector<std::string>>(cj, "laws", "custom");
        const auto sel = get<std::vector<int>>(cj, "selection", "custom");
        if (sel.size() != 2) throw ConfigError("custom.selection must be [first, last]");
        ce.first_cluster = sel[0];
        ce.last_cluster = sel[1];
        c.custom = ce;
    }
    if (root.contains("n_grid")) c.n_grid = get<std::vector<int>>(root, "n_grid", "config");
    if (root.contains("budget")) {
        const json& bj = root.at("budget");
        reject_unknown(bj, {"freq_reps", "realizations", "draws"}, "budget");
        if (bj.contains("freq_reps")) c.budget.freq_reps = get<int>(bj, "freq_reps", "budget");
        if (bj.contains("realizations")) c.budget.realizations = get<int>(bj, "realizations", "budget");
        if (bj.contains("draws")) c.budget.draws = get<int>(bj, "draws", "budget");
    }
    if (root.contains("prior")) {
        const json& pj = root.at("prior");
        reject_unknown(pj, {"g_scale", "b"}, "prior");
        if (pj.contains("g_scale")) c.g_scale = get<double>(pj, "g_scale", "prior");
        if (pj.contains("b")) c.b = get<double>(pj, "b", "prior");
    }
    if (root.contains("levels")) c.levels = get<std::vector<double>>(root, "levels", "config");
    if (root.contains("seed")) c.seed = get<std::uint64_t>(root, "seed", "config");
    if (root.contains("workers")) c.workers = get<int>(root, "workers", "config");
    if (root.contains("out")) c.out_dir = get<std::string>(root, "out", "config");
    if (root.contains("bounds")) {
        const json& bj = root.at("bounds");
        reject_unknown(bj, {"delta_case", "radius", "moment_draws"}, "bounds");
        if (bj.contains("delta_case")) c.bounds.delta_case = get<std::string>(bj, "delta_case", "bounds");
        if (bj.contains("radius") && !bj.at("radius").is_null()) {
            c.bounds.radius = get<double>(bj, "radius", "bounds");
        }
        if (bj.contains("moment_draws")) c.bounds.moment_draws = get<int>(bj, "moment_draws", "bounds");
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const RunConfig& c) {
    json root;
    root["experiment"] = c.experiment;
    if (c.custom) {
        root["custom"] = {{"values", c.custom->values},
                          {"multiplicities", c.custom->multiplicities},
                          {"laws", c.custom->laws},
                          {"selection", {c.custom->first_cluster, c.custom->last_cluster}}};
    }
    root["n_grid"] = c.n_grid;
    root["budget"] = {{"freq_reps", c.budget.freq_reps},
                      {"realizations", c.budget.realizations},
                      {"draws", c.budget.draws}};
    root["prior"] = {{"g_scale", c.g_scale}, {"b", c.b}};
    root["levels"] = c.levels;
    root["seed"] = c.seed;
    root["workers"] = c.workers;
    root["out"] = c.out_dir;
    root["bounds"] = {{"delta_case", c.bounds.delta_case},
                      {"radius", c.bounds.radius ? json(*c.bounds.radius) : json(nullptr)},
                      {"moment_draws", c.bounds.moment_draws}};
    return root.dump(2) + "\n";
}

ExperimentDesign make_design(const RunConfig& config) {
    config.validate();
    auto finish = [&](ExperimentDesign design) {
        design.n_grid = config.n_grid;
        design.mc = config.budget;
        design.prior = Prior{SymMatrix::identity(design.dim()) * config.g_scale, config.b};
        design.seed = config.seed;
        design.validate();
        return design;
    };
    if (config.experiment == "exp1") return finish(build_experiment1(config.seed));
    if (config.experiment == "exp2") return finish(build_experiment2(config.seed));

    const CustomExperiment& ce = *config.custom;
    try {
        SpectrumSpec spectrum(ce.values, ce.multiplicities);
        if (ce.first_cluster < 1 || ce.last_cluster < ce.first_cluster) {
            throw ConfigError("custom.selection must satisfy 1 <= first <= last");
        }
        ClusterSelection sel(spectrum, static_cast<std::size_t>(ce.first_cluster - 1),
                             static_cast<std::size_t>(ce.last_cluster - 1));
        std::vector<LawKind> laws;
        for (const auto& name : ce.laws) laws.push_back(law_kind_from_string(name));
        const Eigen::Index p = spectrum.dim();
        return finish(ExperimentDesign{"custom", spectrum, laws, sel, config.n_grid, config.budget,
                                       Prior{SymMatrix::identity(p), config.b}, config.seed});
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("custom experiment: ") + e.what());
    }
}

}  // namespace projcred
