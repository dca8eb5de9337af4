#include "bsbo/config.hpp"

#include <set>

#include "bsbo/errors.hpp"
#include "json_util.hpp"

namespace bsbo {

namespace {

using detail::json;

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text.empty() ? "{}" : text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad ") + what + " JSON: " + e.what());
    }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const std::string& scope) {
    for (const auto& [key, value] : j.items())
        if (!known.contains(key))
            throw ConfigError("unknown config key '" + (scope.empty() ? key : scope + "." + key) + "'");
}

std::vector<double> axis_values(const json& j, const std::string& scope) {
    if (j.is_array()) {
        auto values = j.get<std::vector<double>>();
        if (values.empty()) throw ConfigError(scope + " must not be empty");
        return values;
    }
    if (j.is_object()) {
        reject_unknown_keys(j, {"min", "max", "count"}, scope);
        const double lo = j.at("min").get<double>();
        const double hi = j.at("max").get<double>();
        const int count = j.at("count").get<int>();
        if (count < 1 || lo <= 0.0 || hi < lo)
            throw ConfigError(scope + " needs 0 < min <= max and count >= 1");
        std::vector<double> values;
        for (int i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            values.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
        }
        return values;
    }
    throw ConfigError(scope + " must be an array or a {min, max, count} object");
}

GpHyperparameters gp_from(const json& j) {
    GpHyperparameters gp;
    reject_unknown_keys(j, {"kernel", "signal_variance", "lengthscale", "noise_variance",
                            "prior_mean", "refit"},
                        "gp");
    gp.kernel = kernel_from_name(j.value("kernel", std::string("matern52")));
    gp.signal_variance = j.value("signal_variance", gp.signal_variance);
    gp.lengthscale = j.value("lengthscale", gp.lengthscale);
    gp.noise_variance = j.value("noise_variance", gp.noise_variance);
    if (j.contains("prior_mean") && !j.at("prior_mean").is_null()) {
        gp.prior_mean = j.at("prior_mean").get<double>();
        gp.mean_from_data = false;
    }
    return gp;
}

json gp_to(const GpHyperparameters& gp, bool refit) {
    json j;
    j["kernel"] = kernel_name(gp.kernel);
    j["signal_variance"] = gp.signal_variance;
    j["lengthscale"] = gp.lengthscale;
    j["noise_variance"] = gp.noise_variance;
    j["prior_mean"] = gp.mean_from_data ? json(nullptr) : json(gp.prior_mean);
    j["refit"] = refit;
    return j;
}

OptimizerConfig optimizer_from(const json& j) {
    OptimizerConfig opt;
    reject_unknown_keys(j, {"method", "restarts", "max_outer_iterations", "permutation",
                            "upper_bound_variant"},
                        "optimizer");
    opt.method = method_from_name(j.value("method", std::string("modmod-sa")));
    opt.restarts = j.value("restarts", opt.restarts);
    opt.max_outer_iterations = j.value("max_outer_iterations", opt.max_outer_iterations);
    const std::string perm = j.value("permutation", std::string("gain-desc"));
    if (perm == "gain-desc")
        opt.permutation = PermutationPolicy::SingletonGainDescending;
    else if (perm == "index")
        opt.permutation = PermutationPolicy::IndexOrder;
    else
        throw ConfigError("unknown permutation policy '" + perm + "'");
    const std::string variant = j.value("upper_bound_variant", std::string("grow"));
    if (variant == "grow")
        opt.upper_bound_variant = BoundVariant::Grow;
    else if (variant == "shrink")
        opt.upper_bound_variant = BoundVariant::Shrink;
    else
        throw ConfigError("unknown upper bound variant '" + variant + "'");
    if (opt.restarts < 1) throw ConfigError("optimizer.restarts must be >= 1");
    return opt;
}

json optimizer_to(const OptimizerConfig& opt) {
    json j;
    j["method"] = method_name(opt.method);
    j["restarts"] = opt.restarts;
    j["max_outer_iterations"] = opt.max_outer_iterations;
    j["permutation"] =
        opt.permutation == PermutationPolicy::SingletonGainDescending ? "gain-desc" : "index";
    j["upper_bound_variant"] = opt.upper_bound_variant == BoundVariant::Grow ? "grow" : "shrink";
    return j;
}

} // namespace

std::string kernel_name(KernelFamily kernel) {
    switch (kernel) {
        case KernelFamily::Matern12: return "matern12";
        case KernelFamily::Matern32: return "matern32";
        case KernelFamily::Matern52: return "matern52";
        case KernelFamily::SquaredExponential: return "squared-exponential";
    }
    return "matern52";
}

KernelFamily kernel_from_name(const std::string& name) {
    if (name == "matern12") return KernelFamily::Matern12;
    if (name == "matern32") return KernelFamily::Matern32;
    if (name == "matern52") return KernelFamily::Matern52;
    if (name == "squared-exponential") return KernelFamily::SquaredExponential;
    throw ConfigError("unknown kernel '" + name + "'");
}

CampaignConfig campaign_config_from_json(const std::string& json_text) {
    const json j = parse(json_text, "config");
    reject_unknown_keys(j, {"rounds", "batch_size", "k_random", "wild_type", "observation_noise",
                            "gp", "grid", "optimizer", "mc_validation", "mc", "missing_policy",
                            "seed", "threads", "log1p", "ground", "compare", "validate", "synthetic"},
                        "");
    CampaignConfig config;
    config.rounds = j.value("rounds", config.rounds);
    config.batch_size = j.value("batch_size", config.batch_size);
    config.k_random = j.value("k_random", config.k_random);
    config.wild_type = j.value("wild_type", config.wild_type);
    config.observation_noise = j.value("observation_noise", config.observation_noise);
    config.seed = j.value("seed", config.seed);
    config.threads = j.value("threads", config.threads);
    if (config.rounds < 0) throw ConfigError("rounds must be >= 0");
    if (config.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (config.k_random < 0) throw ConfigError("k_random must be >= 0");
    if (config.observation_noise < 0.0) throw ConfigError("observation_noise must be >= 0");
    if (config.threads < 1) throw ConfigError("threads must be >= 1");

    if (j.contains("gp")) {
        config.gp = gp_from(j.at("gp"));
        config.refit_hyperparameters = j.at("gp").value("refit", true);
    }
    if (j.contains("grid")) {
        const json& grid = j.at("grid");
        reject_unknown_keys(grid, {"lengthscale", "signal_rel", "noise_rel"}, "grid");
        if (grid.contains("lengthscale"))
            config.grid.lengthscales = axis_values(grid.at("lengthscale"), "grid.lengthscale");
        if (grid.contains("signal_rel"))
            config.grid.signal_relative = axis_values(grid.at("signal_rel"), "grid.signal_rel");
        if (grid.contains("noise_rel"))
            config.grid.noise_relative = axis_values(grid.at("noise_rel"), "grid.noise_rel");
    }
    if (j.contains("optimizer")) config.optimizer = optimizer_from(j.at("optimizer"));
    config.mc_validation = j.value("mc_validation", config.mc_validation);
    if (j.contains("mc")) {
        const json& mc = j.at("mc");
        reject_unknown_keys(mc, {"replicates", "size_cap", "diagonal_only", "count_duplicates"}, "mc");
        config.mc.replicates = mc.value("replicates", config.mc.replicates);
        config.mc.size_cap = mc.value("size_cap", config.mc.size_cap);
        config.mc.diagonal_only = mc.value("diagonal_only", config.mc.diagonal_only);
        config.mc.count_duplicates = mc.value("count_duplicates", config.mc.count_duplicates);
        if (config.mc.replicates < 1) throw ConfigError("mc.replicates must be >= 1");
    }
    const std::string policy = j.value("missing_policy", std::string("impute-zero"));
    if (policy == "impute-zero")
        config.missing_policy = MissingPolicy::ImputeZero;
    else if (policy == "drop-from-ground-truth-max")
        config.missing_policy = MissingPolicy::DropFromGroundTruthMax;
    else
        throw ConfigError("unknown missing_policy '" + policy + "'");
    return config;
}

std::string campaign_config_to_json(const CampaignConfig& config) {
    json j;
    j["rounds"] = config.rounds;
    j["batch_size"] = config.batch_size;
    j["k_random"] = config.k_random;
    j["wild_type"] = config.wild_type;
    j["observation_noise"] = config.observation_noise;
    j["seed"] = config.seed;
    j["threads"] = config.threads;
    j["gp"] = gp_to(config.gp, config.refit_hyperparameters);
    json grid;
    grid["lengthscale"] = config.grid.lengthscales;
    grid["signal_rel"] = config.grid.signal_relative;
    grid["noise_rel"] = config.grid.noise_relative;
    j["grid"] = std::move(grid);
    j["optimizer"] = optimizer_to(config.optimizer);
    j["mc_validation"] = config.mc_validation;
    json mc;
    mc["replicates"] = config.mc.replicates;
    mc["size_cap"] = config.mc.size_cap;
    mc["diagonal_only"] = config.mc.diagonal_only;
    mc["count_duplicates"] = config.mc.count_duplicates;
    j["mc"] = std::move(mc);
    j["missing_policy"] = config.missing_policy == MissingPolicy::ImputeZero
                              ? "impute-zero"
                              : "drop-from-ground-truth-max";
    return j.dump(2) + "\n";
}

SyntheticSpec synthetic_spec_from_json(const std::string& json_text) {
    const json j = parse(json_text, "synthetic spec");
    reject_unknown_keys(j, {"alphabet_size", "background", "seed", "blocks"}, "synthetic");
    SyntheticSpec spec = SyntheticSpec::defaults();
    spec.alphabet_size = j.value("alphabet_size", spec.alphabet_size);
    spec.background = j.value("background", spec.background);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("blocks")) {
        spec.blocks.clear();
        for (const json& b : j.at("blocks")) {
            reject_unknown_keys(b, {"row", "col", "height", "width", "level"}, "block");
            SyntheticBlock block;
            block.row = b.at("row").get<int>();
            block.col = b.at("col").get<int>();
            block.height = b.at("height").get<int>();
            block.width = b.at("width").get<int>();
            block.level = b.at("level").get<double>();
            spec.blocks.push_back(block);
        }
    }
    return spec;
}

std::string synthetic_spec_to_json(const SyntheticSpec& spec) {
    json j;
    j["alphabet_size"] = spec.alphabet_size;
    j["background"] = spec.background;
    j["seed"] = spec.seed;
    json blocks = json::array();
    for (const SyntheticBlock& b : spec.blocks) {
        json block;
        block["row"] = b.row;
        block["col"] = b.col;
        block["height"] = b.height;
        block["width"] = b.width;
        block["level"] = b.level;
        blocks.push_back(std::move(block));
    }
    j["blocks"] = std::move(blocks);
    return j.dump(2) + "\n";
}

std::optional<GroundSet> ground_from_config_json(const std::string& json_text) {
    const json j = parse(json_text, "config");
    if (!j.contains("ground")) return std::nullopt;
    const json& g = j.at("ground");
    reject_unknown_keys(g, {"alphabets", "sites"}, "ground");
    return GroundSet(g.at("alphabets").get<std::vector<std::string>>());
}

CompareOptions compare_options_from_json(const std::string& json_text) {
    const json j = parse(json_text, "config");
    CompareOptions options;
    if (!j.contains("compare")) return options;
    const json& c = j.at("compare");
    reject_unknown_keys(c, {"num_sets", "include_dsopt_solution"}, "compare");
    options.num_sets = c.value("num_sets", options.num_sets);
    options.include_dsopt_solution = c.value("include_dsopt_solution", options.include_dsopt_solution);
    if (options.num_sets < 1) throw ConfigError("compare.num_sets must be >= 1");
    return options;
}

ValidateOptions validate_options_from_json(const std::string& json_text) {
    const json j = parse(json_text, "config");
    ValidateOptions options;
    options.seed = j.value("seed", options.seed);
    if (!j.contains("validate")) return options;
    const json& v = j.at("validate");
    reject_unknown_keys(v, {"random_instances", "inject_fault"}, "validate");
    options.random_instances = v.value("random_instances", options.random_instances);
    options.inject_fault = v.value("inject_fault", options.inject_fault);
    if (options.random_instances < 1) throw ConfigError("validate.random_instances must be >= 1");
    return options;
}

} // namespace bsbo
