#include "bsbo/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bsbo/errors.hpp"
#include "json_util.hpp"

namespace bsbo {

namespace {

using detail::format_double;
using detail::json;

std::string sidecar_path(const std::string& csv_path) {
    std::string base = csv_path;
    if (base.size() > 4 && base.substr(base.size() - 4) == ".csv")
        base.resize(base.size() - 4);
    return base + ".meta.json";
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

json ground_json(const GroundSet& ground) {
    json j;
    j["sites"] = ground.num_sites();
    j["alphabets"] = ground.alphabets();
    return j;
}

GroundSet ground_from(const json& j) {
    std::vector<std::string> alphabets = j.at("alphabets").get<std::vector<std::string>>();
    return GroundSet(std::move(alphabets));
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw DataError("failed while writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

FitnessTable::FitnessTable(GroundSet ground, std::vector<double> values,
                           std::vector<std::uint8_t> missing, TableMetadata metadata)
    : ground_(std::move(ground)),
      values_(std::move(values)),
      missing_(std::move(missing)),
      metadata_(std::move(metadata)) {
    if (values_.size() != ground_.library_capacity() || missing_.size() != values_.size())
        throw DataError("fitness table arrays do not match the ground set library");
    for (std::uint64_t i = 0; i < values_.size(); ++i) {
        if (missing_[i]) {
            ++missing_count_;
        } else if (!std::isfinite(values_[i])) {
            throw DataError("non-finite fitness at item index " + std::to_string(i));
        }
    }
}

namespace {

struct CsvRow {
    std::string sequence;
    double value = 0.0;
    std::size_t line = 0;
};

std::vector<CsvRow> parse_value_rows(const std::string& path, bool accept_value_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    const std::string header = strip_cr(line);
    if (header != "sequence,fitness" && !(accept_value_header && header == "sequence,value"))
        throw DataError(path + ":1: expected header 'sequence,fitness', got '" + header + "'");

    std::vector<CsvRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataError(path + ":" + std::to_string(line_no) + ": missing comma");
        std::string seq = line.substr(0, comma);
        const std::string value_text = line.substr(comma + 1);
        char* end = nullptr;
        const double value = std::strtod(value_text.c_str(), &end);
        if (end == value_text.c_str() || *end != '\0' || !std::isfinite(value))
            throw DataError(path + ":" + std::to_string(line_no) + ": bad fitness value '" +
                            value_text + "'");
        if (seq.empty())
            throw DataError(path + ":" + std::to_string(line_no) + ": empty sequence");
        rows.push_back({std::move(seq), value, line_no});
    }
    if (rows.empty()) throw DataError(path + ": no data rows");
    return rows;
}

} // namespace

std::vector<std::pair<std::string, double>> load_observation_rows(const std::string& path) {
    std::vector<std::pair<std::string, double>> out;
    for (CsvRow& row : parse_value_rows(path, true))
        out.emplace_back(std::move(row.sequence), row.value);
    return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
        if (ec) throw DataError("cannot create directory '" + parent.string() + "': " + ec.message());
    }
    write_file(path, contents);
}

FitnessTable FitnessTable::load_csv(const std::string& path) {
    const std::vector<CsvRow> rows = parse_value_rows(path, false);

    TableMetadata metadata;
    GroundSet ground;
    const std::string meta = sidecar_path(path);
    if (std::filesystem::exists(meta)) {
        try {
            const json j = json::parse(read_file(meta));
            ground = ground_from(j);
            metadata.wild_type = j.value("wild_type", std::string{});
            metadata.source = j.value("source", std::string{});
            metadata.units = j.value("units", std::string{});
        } catch (const json::exception& e) {
            throw DataError(meta + ": " + e.what());
        } catch (const ConfigError& e) {
            throw DataError(meta + ": " + e.what());
        }
    } else {
        // Infer per-site alphabets from the observed sequences.
        const std::size_t length = rows.front().sequence.size();
        std::vector<std::set<char>> symbols(length);
        for (const CsvRow& row : rows) {
            if (row.sequence.size() != length)
                throw DataError(path + ":" + std::to_string(row.line) + ": sequence '" +
                                row.sequence + "' has length " + std::to_string(row.sequence.size()) +
                                ", expected " + std::to_string(length));
            for (std::size_t site = 0; site < length; ++site) symbols[site].insert(row.sequence[site]);
        }
        std::vector<std::string> alphabets(length);
        for (std::size_t site = 0; site < length; ++site)
            alphabets[site] = std::string(symbols[site].begin(), symbols[site].end());
        try {
            ground = GroundSet(std::move(alphabets));
        } catch (const ConfigError& e) {
            throw DataError(path + ": " + e.what());
        }
        metadata.source = path;
    }

    std::vector<double> values(ground.library_capacity(), 0.0);
    std::vector<std::uint8_t> missing(ground.library_capacity(), 1);
    for (const CsvRow& row : rows) {
        Item item;
        try {
            item = ground.item_from_sequence(row.sequence);
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(row.line) + ": " + e.what());
        }
        const std::uint64_t index = ground.item_index(item);
        values[index] = row.value;
        missing[index] = 0;
    }
    if (metadata.source.empty()) metadata.source = path;
    return FitnessTable(std::move(ground), std::move(values), std::move(missing), std::move(metadata));
}

void FitnessTable::save_csv(const std::string& path) const {
    std::ostringstream out;
    out << "sequence,fitness\n";
    for (std::uint64_t index = 0; index < values_.size(); ++index) {
        if (missing_[index]) continue;
        out << ground_.sequence_of(ground_.item_at(index)) << ',' << format_double(values_[index])
            << '\n';
    }
    write_file(path, out.str());

    json meta = ground_json(ground_);
    meta["wild_type"] = metadata_.wild_type;
    meta["source"] = metadata_.source;
    meta["units"] = metadata_.units;
    write_file(sidecar_path(path), meta.dump(2) + "\n");
}

double FitnessTable::global_best(MissingPolicy policy) const {
    return values_[argmax(policy)];
}

std::uint64_t FitnessTable::argmax(MissingPolicy policy) const {
    std::uint64_t best = 0;
    bool found = false;
    for (std::uint64_t i = 0; i < values_.size(); ++i) {
        if (policy == MissingPolicy::DropFromGroundTruthMax && missing_[i]) continue;
        if (!found || values_[i] > values_[best]) {
            best = i;
            found = true;
        }
    }
    if (!found) throw DataError("every table entry is missing");
    return best;
}

void FitnessTable::apply_log1p() {
    for (std::uint64_t i = 0; i < values_.size(); ++i) {
        if (missing_[i]) continue;
        if (values_[i] <= -1.0)
            throw DataError("log1p transform needs fitness > -1, got " +
                            format_double(values_[i]));
        values_[i] = std::log1p(values_[i]);
    }
    if (!metadata_.units.empty()) metadata_.units = "log1p(" + metadata_.units + ")";
}

SyntheticSpec SyntheticSpec::defaults() {
    SyntheticSpec spec;
    spec.blocks = {
        {2, 3, 4, 4, 1.0},
        {12, 15, 3, 6, 0.7},
        {20, 8, 5, 2, 0.5},
    };
    return spec;
}

FitnessTable generate_synthetic(const SyntheticSpec& spec) {
    if (spec.alphabet_size < 1 || spec.alphabet_size > 26)
        throw ConfigError("synthetic alphabet size must be in [1, 26]");
    bool any_nonzero = false;
    for (const SyntheticBlock& block : spec.blocks) {
        if (block.height < 1 || block.width < 1 || block.row < 0 || block.col < 0 ||
            block.row + block.height > spec.alphabet_size ||
            block.col + block.width > spec.alphabet_size)
            throw ConfigError("synthetic block out of bounds");
        if (block.level != spec.background) any_nonzero = true;
    }
    if (!any_nonzero) throw ConfigError("synthetic spec needs at least one non-background block");

    std::string alphabet;
    for (int i = 0; i < spec.alphabet_size; ++i) alphabet.push_back(static_cast<char>('A' + i));
    GroundSet ground({alphabet, alphabet});

    const auto n = static_cast<std::uint64_t>(spec.alphabet_size);
    std::vector<double> values(n * n, spec.background);
    std::vector<std::uint8_t> painted(n * n, 0);
    for (const SyntheticBlock& block : spec.blocks) {
        for (int r = block.row; r < block.row + block.height; ++r) {
            for (int c = block.col; c < block.col + block.width; ++c) {
                const std::uint64_t index = static_cast<std::uint64_t>(r) * n + c;
                if (painted[index]) throw ConfigError("synthetic blocks overlap");
                painted[index] = 1;
                values[index] = block.level;
            }
        }
    }

    TableMetadata metadata;
    metadata.source = "synthetic";
    metadata.units = "reward";
    return FitnessTable(std::move(ground), std::move(values),
                        std::vector<std::uint8_t>(n * n, 0), std::move(metadata));
}

std::string ground_to_json(const GroundSet& ground) { return ground_json(ground).dump(); }

GroundSet ground_from_json(const std::string& json_text) {
    try {
        return ground_from(json::parse(json_text));
    } catch (const json::exception& e) {
        throw DataError(std::string("bad ground set JSON: ") + e.what());
    }
}

namespace {

json round_to_json(const RoundRecord& r) {
    json j;
    j["round"] = r.round;
    j["has_design"] = r.has_design;
    j["chosen_symbols"] = r.chosen_symbols;
    j["library_size"] = r.library_size;
    j["surrogate_value"] = r.surrogate_value;
    j["tau_used"] = r.tau_used;
    j["batch_items"] = r.batch_items;
    j["batch_values"] = r.batch_values;
    j["best_so_far"] = r.best_so_far;
    j["regret"] = r.regret;
    j["has_mc"] = r.has_mc;
    j["mc_mean"] = r.mc_mean;
    j["mc_stderr"] = r.mc_stderr;
    return j;
}

RoundRecord round_from_json(const json& j) {
    RoundRecord r;
    r.round = j.at("round").get<int>();
    r.has_design = j.at("has_design").get<bool>();
    r.chosen_symbols = j.at("chosen_symbols").get<std::vector<std::string>>();
    r.library_size = j.at("library_size").get<std::uint64_t>();
    r.surrogate_value = j.at("surrogate_value").get<double>();
    r.tau_used = j.at("tau_used").get<double>();
    r.batch_items = j.at("batch_items").get<std::vector<std::uint64_t>>();
    r.batch_values = j.at("batch_values").get<std::vector<double>>();
    r.best_so_far = j.at("best_so_far").get<double>();
    r.regret = j.at("regret").get<double>();
    r.has_mc = j.at("has_mc").get<bool>();
    r.mc_mean = j.at("mc_mean").get<double>();
    r.mc_stderr = j.at("mc_stderr").get<double>();
    return r;
}

} // namespace

std::string report_to_json(const CampaignReport& report) {
    json j;
    j["ground"] = report.ground.num_sites() > 0 ? ground_json(report.ground) : json::object();
    j["source"] = report.source;
    j["units"] = report.units;
    j["wild_type_sequence"] = report.wild_type_sequence;
    j["wild_type_fitness"] = report.wild_type_fitness;
    j["best_single_mutant_sequence"] = report.best_single_mutant_sequence;
    j["best_single_mutant_fitness"] = report.best_single_mutant_fitness;
    j["recombined_best_sequence"] = report.recombined_best_sequence;
    j["recombined_best_fitness"] = report.recombined_best_fitness;
    j["global_best"] = report.global_best;
    json rounds = json::array();
    for (const RoundRecord& r : report.rounds) rounds.push_back(round_to_json(r));
    j["rounds"] = std::move(rounds);
    j["resolved_config"] =
        report.resolved_config_json.empty() ? json::object() : json::parse(report.resolved_config_json);
    return j.dump(2) + "\n";
}

CampaignReport report_from_json(const std::string& json_text) {
    try {
        const json j = json::parse(json_text);
        CampaignReport report;
        if (j.at("ground").contains("alphabets")) report.ground = ground_from(j.at("ground"));
        report.source = j.at("source").get<std::string>();
        report.units = j.at("units").get<std::string>();
        report.wild_type_sequence = j.at("wild_type_sequence").get<std::string>();
        report.wild_type_fitness = j.at("wild_type_fitness").get<double>();
        report.best_single_mutant_sequence = j.at("best_single_mutant_sequence").get<std::string>();
        report.best_single_mutant_fitness = j.at("best_single_mutant_fitness").get<double>();
        report.recombined_best_sequence = j.at("recombined_best_sequence").get<std::string>();
        report.recombined_best_fitness = j.at("recombined_best_fitness").get<double>();
        report.global_best = j.at("global_best").get<double>();
        for (const json& r : j.at("rounds")) report.rounds.push_back(round_from_json(r));
        const json& config = j.at("resolved_config");
        report.resolved_config_json = config.empty() ? std::string{} : config.dump();
        return report;
    } catch (const json::exception& e) {
        throw DataError(std::string("bad report JSON: ") + e.what());
    }
}

CampaignReport load_report(const std::string& path) { return report_from_json(read_file(path)); }

std::vector<std::string> write_report(const CampaignReport& report, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory '" + out_dir + "': " + ec.message());
    const auto in_dir = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };

    std::vector<std::string> manifest;
    const bool has_ground = report.ground.num_sites() > 0;

    {
        const std::string path = in_dir("report.json");
        write_file(path, report_to_json(report));
        manifest.push_back(path);
    }
    {
        std::ostringstream out;
        out << "round,item,fitness\n";
        for (const RoundRecord& r : report.rounds)
            for (std::size_t i = 0; i < r.batch_items.size(); ++i)
                out << r.round << ','
                    << (has_ground ? report.ground.sequence_of(report.ground.item_at(r.batch_items[i]))
                                   : std::to_string(r.batch_items[i]))
                    << ',' << format_double(r.batch_values[i]) << '\n';
        const std::string path = in_dir("per_round_batches.csv");
        write_file(path, out.str());
        manifest.push_back(path);
    }
    {
        std::ostringstream out;
        out << "round,fitness,cumulative_fraction\n";
        for (const RoundRecord& r : report.rounds) {
            std::vector<double> sorted = r.batch_values;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t i = 0; i < sorted.size(); ++i)
                out << r.round << ',' << format_double(sorted[i]) << ','
                    << format_double(static_cast<double>(i + 1) / static_cast<double>(sorted.size()))
                    << '\n';
        }
        const std::string path = in_dir("ecdf.csv");
        write_file(path, out.str());
        manifest.push_back(path);
    }
    {
        std::ostringstream out;
        out << "round,best,regret\n";
        for (const RoundRecord& r : report.rounds)
            out << r.round << ',' << format_double(r.best_so_far) << ',' << format_double(r.regret)
                << '\n';
        const std::string path = in_dir("regret.csv");
        write_file(path, out.str());
        manifest.push_back(path);
    }
    {
        std::ostringstream out;
        out << "name,value\n";
        if (has_ground) {
            out << "wild_type," << format_double(report.wild_type_fitness) << '\n';
            out << "best_single_mutant," << format_double(report.best_single_mutant_fitness) << '\n';
            out << "recombined_best," << format_double(report.recombined_best_fitness) << '\n';
        }
        const std::string path = in_dir("reference_lines.csv");
        write_file(path, out.str());
        manifest.push_back(path);
    }
    return manifest;
}

} // namespace bsbo
