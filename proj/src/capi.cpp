#include "bsbo/bsbo.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "bsbo/campaign.hpp"
#include "bsbo/config.hpp"
#include "bsbo/data_io.hpp"
#include "bsbo/errors.hpp"
#include "bsbo/validate.hpp"
#include "json_util.hpp"

struct bsbo_table {
    bsbo::FitnessTable table;
};

namespace {

thread_local std::string g_last_error;

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const bsbo::ConfigError& e) {
        g_last_error = e.what();
        return BSBO_ERR_CONFIG;
    } catch (const bsbo::DataError& e) {
        g_last_error = e.what();
        return BSBO_ERR_DATA;
    } catch (const bsbo::NumericError& e) {
        g_last_error = e.what();
        return BSBO_ERR_NUMERIC;
    } catch (const bsbo::ValidationError& e) {
        g_last_error = e.what();
        return BSBO_ERR_VALIDATION;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BSBO_ERR_NUMERIC;
    }
}

int require(bool condition, const char* message) {
    if (condition) return BSBO_OK;
    g_last_error = message;
    return BSBO_ERR_CONFIG;
}

void write_resolved_config(const std::string& out_dir, const std::string& resolved) {
    bsbo::write_text_file((std::filesystem::path(out_dir) / "resolved_config.json").string(),
                          resolved);
}

} // namespace

extern "C" {

const char* bsbo_version(void) { return "0.1.0"; }

const char* bsbo_last_error(void) { return g_last_error.c_str(); }

const char* bsbo_status_name(int status) {
    switch (status) {
        case BSBO_OK: return "ok";
        case BSBO_ERR_CONFIG: return "config-error";
        case BSBO_ERR_DATA: return "data-error";
        case BSBO_ERR_NUMERIC: return "numeric-error";
        case BSBO_ERR_VALIDATION: return "validation-failure";
    }
    return "unknown";
}

void bsbo_string_free(char* text) { delete[] text; }

int bsbo_table_load(const char* csv_path, bsbo_table** out_table) {
    if (int rc = require(csv_path && out_table, "bsbo_table_load: NULL argument")) return rc;
    return guarded([&] {
        auto* handle = new bsbo_table{bsbo::FitnessTable::load_csv(csv_path)};
        *out_table = handle;
        return BSBO_OK;
    });
}

int bsbo_table_synthetic(const char* spec_json, bsbo_table** out_table) {
    if (int rc = require(out_table != nullptr, "bsbo_table_synthetic: NULL out_table")) return rc;
    return guarded([&] {
        const std::string text = spec_json ? spec_json : "";
        const bsbo::SyntheticSpec spec = bsbo::synthetic_spec_from_json(text);
        *out_table = new bsbo_table{bsbo::generate_synthetic(spec)};
        return BSBO_OK;
    });
}

int bsbo_synthetic_resolve_spec(const char* spec_json, char** out_json) {
    if (int rc = require(out_json != nullptr, "bsbo_synthetic_resolve_spec: NULL out_json"))
        return rc;
    return guarded([&] {
        const std::string text = spec_json ? spec_json : "";
        *out_json = copy_string(bsbo::synthetic_spec_to_json(bsbo::synthetic_spec_from_json(text)));
        return BSBO_OK;
    });
}

int bsbo_table_save(const bsbo_table* table, const char* csv_path) {
    if (int rc = require(table && csv_path, "bsbo_table_save: NULL argument")) return rc;
    return guarded([&] {
        table->table.save_csv(csv_path);
        return BSBO_OK;
    });
}

void bsbo_table_free(bsbo_table* table) { delete table; }

int bsbo_table_num_items(const bsbo_table* table, uint64_t* out_count) {
    if (int rc = require(table && out_count, "bsbo_table_num_items: NULL argument")) return rc;
    *out_count = table->table.size();
    return BSBO_OK;
}

int bsbo_table_num_sites(const bsbo_table* table, int* out_sites) {
    if (int rc = require(table && out_sites, "bsbo_table_num_sites: NULL argument")) return rc;
    *out_sites = table->table.ground().num_sites();
    return BSBO_OK;
}

int bsbo_table_fitness(const bsbo_table* table, uint64_t item_index, double* out_value) {
    if (int rc = require(table && out_value, "bsbo_table_fitness: NULL argument")) return rc;
    if (item_index >= table->table.size()) {
        g_last_error = "item index out of range";
        return BSBO_ERR_DATA;
    }
    *out_value = table->table.value_at(item_index);
    return BSBO_OK;
}

int bsbo_table_missing_count(const bsbo_table* table, uint64_t* out_count) {
    if (int rc = require(table && out_count, "bsbo_table_missing_count: NULL argument")) return rc;
    *out_count = table->table.missing_count();
    return BSBO_OK;
}

int bsbo_table_ground_json(const bsbo_table* table, char** out_json) {
    if (int rc = require(table && out_json, "bsbo_table_ground_json: NULL argument")) return rc;
    return guarded([&] {
        *out_json = copy_string(bsbo::ground_to_json(table->table.ground()));
        return BSBO_OK;
    });
}

int bsbo_table_log1p(bsbo_table* table) {
    if (int rc = require(table != nullptr, "bsbo_table_log1p: NULL table")) return rc;
    return guarded([&] {
        table->table.apply_log1p();
        return BSBO_OK;
    });
}

int bsbo_simulate(const bsbo_table* table, const char* config_json, const char* out_dir,
                  char** out_report_json) {
    if (int rc = require(table && out_dir, "bsbo_simulate: NULL argument")) return rc;
    return guarded([&] {
        const bsbo::CampaignConfig config =
            bsbo::campaign_config_from_json(config_json ? config_json : "");
        const std::string resolved = bsbo::campaign_config_to_json(config);
        const bsbo::CampaignReport report = bsbo::run_campaign(table->table, config, resolved);
        bsbo::write_report(report, out_dir);
        write_resolved_config(out_dir, resolved);
        if (out_report_json) *out_report_json = copy_string(bsbo::report_to_json(report));
        return BSBO_OK;
    });
}

int bsbo_design(const char* observations_csv_path, const char* config_json, const char* out_dir,
                char** out_result_json) {
    if (int rc = require(observations_csv_path && out_result_json, "bsbo_design: NULL argument"))
        return rc;
    return guarded([&] {
        const std::string config_text = config_json ? config_json : "";
        const bsbo::CampaignConfig config = bsbo::campaign_config_from_json(config_text);
        const auto rows = bsbo::load_observation_rows(observations_csv_path);

        bsbo::GroundSet ground;
        std::string ground_origin;
        if (auto configured = bsbo::ground_from_config_json(config_text)) {
            ground = std::move(*configured);
            ground_origin = "config";
        } else {
            std::string base = observations_csv_path;
            if (base.size() > 4 && base.substr(base.size() - 4) == ".csv") base.resize(base.size() - 4);
            const std::string sidecar = base + ".meta.json";
            if (std::filesystem::exists(sidecar)) {
                std::ifstream in(sidecar);
                std::ostringstream buffer;
                buffer << in.rdbuf();
                ground = bsbo::ground_from_json(buffer.str());
                ground_origin = "sidecar";
            } else {
                // Infer per-site alphabets from the observed sequences.
                const std::size_t length = rows.front().first.size();
                std::vector<std::set<char>> symbols(length);
                for (const auto& [seq, value] : rows) {
                    if (seq.size() != length)
                        throw bsbo::DataError("observation sequences have inconsistent lengths");
                    for (std::size_t site = 0; site < length; ++site) symbols[site].insert(seq[site]);
                }
                std::vector<std::string> alphabets(length);
                for (std::size_t site = 0; site < length; ++site)
                    alphabets[site] = std::string(symbols[site].begin(), symbols[site].end());
                ground = bsbo::GroundSet(std::move(alphabets));
                ground_origin = "inferred";
            }
        }

        std::vector<bsbo::Observation> observations;
        observations.reserve(rows.size());
        for (const auto& [seq, value] : rows)
            observations.push_back({ground.item_from_sequence(seq), value});

        const bsbo::DesignResult design = bsbo::run_design(ground, observations, config);

        bsbo::detail::json result;
        result["method"] = bsbo::method_name(config.optimizer.method);
        result["ground"] = bsbo::detail::json::parse(bsbo::ground_to_json(ground));
        result["ground_origin"] = ground_origin;
        bsbo::detail::json per_site = bsbo::detail::json::array();
        for (int site = 0; site < ground.num_sites(); ++site) {
            std::string symbols;
            for (int a = 0; a < static_cast<int>(ground.alphabet(site).size()); ++a)
                if (design.best.contains(site, a)) symbols.push_back(ground.alphabet(site)[a]);
            per_site.push_back(symbols);
        }
        result["selected_symbols"] = std::move(per_site);
        result["surrogate_value"] = design.surrogate_value;
        result["library_size"] = design.library_size;
        result["trajectory_length"] = design.trajectory_length;
        result["tau"] = design.tau;
        result["num_observations"] = rows.size();

        const std::string resolved = bsbo::campaign_config_to_json(config);
        if (out_dir && *out_dir) write_resolved_config(out_dir, resolved);
        *out_result_json = copy_string(result.dump(2) + "\n");
        return BSBO_OK;
    });
}

int bsbo_compare_objectives(const bsbo_table* table, const char* config_json, const char* out_dir,
                            char** out_csv) {
    if (int rc = require(table && out_dir, "bsbo_compare_objectives: NULL argument")) return rc;
    return guarded([&] {
        const std::string config_text = config_json ? config_json : "";
        const bsbo::CampaignConfig config = bsbo::campaign_config_from_json(config_text);
        const bsbo::CompareOptions parsed = bsbo::compare_options_from_json(config_text);
        bsbo::CompareOptionsView options{parsed.num_sets, parsed.include_dsopt_solution};
        const auto rows = bsbo::run_compare_objectives(table->table, config, options);
        const std::string csv = bsbo::compare_rows_to_csv(rows);
        bsbo::write_text_file((std::filesystem::path(out_dir) / "compare_objectives.csv").string(),
                              csv);
        // Sets over the MC size cap are dropped from the main CSV but
        // reported row by row here.
        std::ostringstream skipped;
        skipped << "constraint_set_id,library_size,reason\n";
        for (const auto& row : rows)
            if (!row.has_mc)
                skipped << row.id << ',' << row.library_size << ",\"" << row.note << "\"\n";
        bsbo::write_text_file((std::filesystem::path(out_dir) / "skipped_sets.csv").string(),
                              skipped.str());
        write_resolved_config(out_dir, bsbo::campaign_config_to_json(config));
        if (out_csv) *out_csv = copy_string(csv);
        return BSBO_OK;
    });
}

int bsbo_validate_decomposition(const char* config_json, const char* out_dir,
                                char** out_table_text) {
    return guarded([&] {
        const std::string config_text = config_json ? config_json : "";
        const bsbo::ValidateOptions options = bsbo::validate_options_from_json(config_text);
        const bsbo::validate::ValidationReport report = bsbo::validate::run_validation(options);
        const std::string table_text = bsbo::validate::render_table(report);
        if (out_dir && *out_dir) {
            bsbo::write_text_file(
                (std::filesystem::path(out_dir) / "decomposition_dump.csv").string(),
                report.dump_csv);
            bsbo::write_text_file((std::filesystem::path(out_dir) / "validation_report.txt").string(),
                                  table_text);
            bsbo::detail::json resolved;
            resolved["seed"] = options.seed;
            resolved["validate"]["random_instances"] = options.random_instances;
            resolved["validate"]["inject_fault"] = options.inject_fault;
            write_resolved_config(out_dir, resolved.dump(2) + "\n");
        }
        if (out_table_text) *out_table_text = copy_string(table_text);
        if (!report.all_mandatory_passed) {
            g_last_error = "mandatory decomposition check failed";
            return BSBO_ERR_VALIDATION;
        }
        return BSBO_OK;
    });
}

} // extern "C"
