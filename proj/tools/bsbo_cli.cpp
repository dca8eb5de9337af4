// bsbo: constraint-design campaigns from the command line.
// Links the C API only; all heavy lifting lives in the shared library.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "bsbo/bsbo.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "bsbo_out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> method;
    std::optional<std::int64_t> batch_size;
    std::optional<int> rounds;
    std::optional<std::int64_t> mc_samples;
    bool log1p = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON configuration file");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "master seed");
    cmd->add_option("--threads", flags.threads, "worker threads for reward computation");
    cmd->add_option("--method", flags.method,
                    "optimizer: modmod-sa|modmod-dc|supsub-sa|supsub-dc|greedy|greedy-add|greedy-rem");
    cmd->add_option("--batch-size", flags.batch_size, "batch size n");
    cmd->add_option("--rounds", flags.rounds, "campaign rounds T");
    cmd->add_option("--mc-samples", flags.mc_samples, "Monte Carlo replicates");
    cmd->add_flag("--log1p", flags.log1p, "log1p-transform fitness values at load time");
}

// Flags override file values; the resolved document goes to the library.
int resolve_config(const CommonFlags& flags, std::string& out_json) {
    json config = json::object();
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) {
            std::cerr << "error: cannot open config '" << flags.config_path << "'\n";
            return BSBO_ERR_CONFIG;
        }
        try {
            in >> config;
        } catch (const json::exception& e) {
            std::cerr << "error: bad config JSON: " << e.what() << "\n";
            return BSBO_ERR_CONFIG;
        }
    }
    if (flags.seed) config["seed"] = *flags.seed;
    if (flags.threads) config["threads"] = *flags.threads;
    if (flags.method) config["optimizer"]["method"] = *flags.method;
    if (flags.batch_size) config["batch_size"] = *flags.batch_size;
    if (flags.rounds) config["rounds"] = *flags.rounds;
    if (flags.mc_samples) config["mc"]["replicates"] = *flags.mc_samples;
    if (!config.contains("threads"))
        config["threads"] = std::max(1u, std::thread::hardware_concurrency());
    out_json = config.dump();
    return BSBO_OK;
}

int fail(int status) {
    std::cerr << "error (" << bsbo_status_name(status) << "): " << bsbo_last_error() << "\n";
    return status;
}

struct TableHandle {
    bsbo_table* table = nullptr;
    ~TableHandle() { bsbo_table_free(table); }
};

int load_table(const std::string& path, bool log1p, TableHandle& handle) {
    if (int rc = bsbo_table_load(path.c_str(), &handle.table)) return fail(rc);
    if (log1p) {
        if (int rc = bsbo_table_log1p(handle.table)) return fail(rc);
    }
    return BSBO_OK;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batched stochastic Bayesian optimization for constraint design"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(bsbo_version()));

    CommonFlags flags;
    std::string dataset_path;
    std::string observations_path;
    std::string synthetic_name = "synthetic";
    bool inject_fault = false;

    CLI::App* simulate = app.add_subcommand("simulate", "run a simulated multi-round campaign");
    simulate->add_option("--data", dataset_path, "dataset CSV")->required();
    add_common_flags(simulate, flags);

    CLI::App* design = app.add_subcommand("design", "choose constraints from observations");
    design->add_option("--observations", observations_path, "observations CSV (sequence,value)")
        ->required();
    add_common_flags(design, flags);

    CLI::App* compare = app.add_subcommand("compare-objectives",
                                           "surrogate vs Monte Carlo objective on sampled sets");
    compare->add_option("--data", dataset_path, "dataset CSV")->required();
    add_common_flags(compare, flags);

    CLI::App* validate = app.add_subcommand("validate-decomposition",
                                            "brute-force decomposition property checks");
    validate->add_flag("--inject-fault", inject_fault, "perturb g to prove the checks can fail");
    add_common_flags(validate, flags);

    CLI::App* synthetic = app.add_subcommand("synthetic", "emit the synthetic dataset CSV");
    synthetic->add_option("--name", synthetic_name, "output file stem");
    add_common_flags(synthetic, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : BSBO_ERR_CONFIG;
    }

    std::string config_json;
    if (int rc = resolve_config(flags, config_json)) return rc;

    if (simulate->parsed()) {
        TableHandle handle;
        if (int rc = load_table(dataset_path, flags.log1p, handle)) return rc;
        if (int rc = bsbo_simulate(handle.table, config_json.c_str(), flags.out_dir.c_str(), nullptr))
            return fail(rc);
        std::cout << "report written to " << flags.out_dir << "\n";
        return 0;
    }

    if (design->parsed()) {
        char* result = nullptr;
        if (int rc = bsbo_design(observations_path.c_str(), config_json.c_str(),
                                 flags.out_dir.c_str(), &result))
            return fail(rc);
        std::cout << result;
        bsbo_string_free(result);
        return 0;
    }

    if (compare->parsed()) {
        TableHandle handle;
        if (int rc = load_table(dataset_path, flags.log1p, handle)) return rc;
        if (int rc = bsbo_compare_objectives(handle.table, config_json.c_str(),
                                             flags.out_dir.c_str(), nullptr))
            return fail(rc);
        std::cout << "comparison written to " << flags.out_dir << "\n";
        return 0;
    }

    if (validate->parsed()) {
        if (inject_fault) {
            json config = json::parse(config_json);
            config["validate"]["inject_fault"] = 1e-3;
            config_json = config.dump();
        }
        char* table_text = nullptr;
        const int rc = bsbo_validate_decomposition(config_json.c_str(), flags.out_dir.c_str(),
                                                   &table_text);
        if (table_text) {
            std::cout << table_text;
            bsbo_string_free(table_text);
        }
        if (rc != BSBO_OK && rc != BSBO_ERR_VALIDATION) return fail(rc);
        return rc;
    }

    if (synthetic->parsed()) {
        json config = json::parse(config_json);
        json spec = config.contains("synthetic") ? config["synthetic"] : json::object();
        if (config.contains("seed")) spec["seed"] = config["seed"];
        bsbo_table* table = nullptr;
        if (int rc = bsbo_table_synthetic(spec.dump().c_str(), &table)) return fail(rc);
        TableHandle handle{table};
        const auto csv_path =
            (std::filesystem::path(flags.out_dir) / (synthetic_name + ".csv")).string();
        std::filesystem::create_directories(flags.out_dir);
        if (int rc = bsbo_table_save(handle.table, csv_path.c_str())) return fail(rc);

        char* resolved = nullptr;
        if (int rc = bsbo_synthetic_resolve_spec(spec.dump().c_str(), &resolved)) return fail(rc);
        std::ofstream out(std::filesystem::path(flags.out_dir) / "resolved_config.json",
                          std::ios::binary);
        out << resolved;
        bsbo_string_free(resolved);
        std::cout << "dataset written to " << csv_path << "\n";
        return 0;
    }

    return BSBO_ERR_CONFIG;
}
