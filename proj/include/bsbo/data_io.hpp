#ifndef BSBO_DATA_IO_HPP
#define BSBO_DATA_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bsbo/constraint_space.hpp"
#include "bsbo/gp_model.hpp"

namespace bsbo {

struct TableMetadata {
    std::string source;
    std::string units;
    std::string wild_type;  // sequence string; empty when unknown
};

enum class MissingPolicy { ImputeZero, DropFromGroundTruthMax };

/// Ground-truth utility for every sequence of a full-factorial library.
/// The simulation oracle: immutable after construction.
class FitnessTable {
public:
    FitnessTable() = default;
    FitnessTable(GroundSet ground, std::vector<double> values, std::vector<std::uint8_t> missing,
                 TableMetadata metadata);

    /// Reads `sequence,fitness` CSV. Alphabets come from the optional
    /// `<name>.meta.json` sidecar, else are inferred from the rows. Unlisted
    /// sequences are marked missing and imputed 0.
    static FitnessTable load_csv(const std::string& path);

    /// Writes the CSV (non-missing rows, 17 significant digits) plus the
    /// meta sidecar; load(save(t)) preserves every non-missing value.
    void save_csv(const std::string& path) const;

    const GroundSet& ground() const { return ground_; }
    std::uint64_t size() const { return values_.size(); }
    double value_at(std::uint64_t index) const { return values_[index]; }
    const std::vector<double>& values() const { return values_; }
    bool is_missing(std::uint64_t index) const { return missing_[index] != 0; }
    std::uint64_t missing_count() const { return missing_count_; }

    double global_best(MissingPolicy policy) const;
    std::uint64_t argmax(MissingPolicy policy) const;

    const TableMetadata& metadata() const { return metadata_; }
    TableMetadata& metadata() { return metadata_; }

    /// In-place log1p transform of all non-missing values.
    void apply_log1p();

private:
    GroundSet ground_;
    std::vector<double> values_;
    std::vector<std::uint8_t> missing_;
    std::uint64_t missing_count_ = 0;
    TableMetadata metadata_;
};

struct SyntheticBlock {
    int row = 0;
    int col = 0;
    int height = 1;
    int width = 1;
    double level = 1.0;
};

/// Two-site blocky landscape: disjoint rectangles of non-zero value on a
/// constant background, multiple blocks so the constraint space has several
/// local optima.
struct SyntheticSpec {
    int alphabet_size = 26;
    double background = 0.0;
    std::uint64_t seed = 0;
    std::vector<SyntheticBlock> blocks;

    static SyntheticSpec defaults();
};

FitnessTable generate_synthetic(const SyntheticSpec& spec);

std::string ground_to_json(const GroundSet& ground);
GroundSet ground_from_json(const std::string& json_text);

/// One campaign round as reported: round 0 is the initial design (no chosen
/// set), rounds 1..T carry the optimizer output and its stochastic batch.
struct RoundRecord {
    int round = 0;
    bool has_design = false;
    std::vector<std::string> chosen_symbols;  // per-site, e.g. {"AC", "D"}
    std::uint64_t library_size = 0;
    double surrogate_value = 0.0;
    double tau_used = 0.0;
    std::vector<std::uint64_t> batch_items;
    std::vector<double> batch_values;
    double best_so_far = 0.0;
    double regret = 0.0;
    bool has_mc = false;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;

    bool operator==(const RoundRecord&) const = default;
};

struct CampaignReport {
    GroundSet ground;
    std::string source;
    std::string units;
    std::string wild_type_sequence;
    double wild_type_fitness = 0.0;
    std::string best_single_mutant_sequence;
    double best_single_mutant_fitness = 0.0;
    std::string recombined_best_sequence;
    double recombined_best_fitness = 0.0;
    double global_best = 0.0;
    std::vector<RoundRecord> rounds;
    std::string resolved_config_json;

    bool operator==(const CampaignReport&) const = default;
};

std::string report_to_json(const CampaignReport& report);
CampaignReport report_from_json(const std::string& json_text);
CampaignReport load_report(const std::string& path);

/// Writes report.json, per_round_batches.csv, ecdf.csv, regret.csv and
/// reference_lines.csv into out_dir; returns the paths. Byte-stable for
/// identical reports.
std::vector<std::string> write_report(const CampaignReport& report, const std::string& out_dir);

/// Raw (sequence, value) rows from an observations CSV; accepts either a
/// `sequence,fitness` or `sequence,value` header.
std::vector<std::pair<std::string, double>> load_observation_rows(const std::string& path);

/// Writes text to path, creating parent directories; DataError on failure.
void write_text_file(const std::string& path, const std::string& contents);

} // namespace bsbo

#endif // BSBO_DATA_IO_HPP
