#include "bsbo/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "bsbo/errors.hpp"
#include "json_util.hpp"

namespace bsbo {

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        values.push_back(lo);
        return values;
    }
    const double step = (std::log(hi) - std::log(lo)) / (count - 1);
    for (int i = 0; i < count; ++i) values.push_back(std::exp(std::log(lo) + step * i));
    return values;
}

// Deduplicates by item index, keeping first occurrence order.
std::vector<Observation> dedup_observations(const GroundSet& ground,
                                            const std::vector<TaggedObservation>& tagged) {
    std::vector<Observation> out;
    out.reserve(tagged.size());
    std::unordered_set<std::uint64_t> seen;
    for (const TaggedObservation& obs : tagged) {
        if (!seen.insert(obs.item_index).second) continue;
        out.push_back({ground.item_at(obs.item_index), obs.value});
    }
    return out;
}

double observed_variance(const std::vector<Observation>& obs) {
    if (obs.size() < 2) return 1.0;
    double mean = 0.0;
    for (const Observation& o : obs) mean += o.value;
    mean /= static_cast<double>(obs.size());
    double var = 0.0;
    for (const Observation& o : obs) var += (o.value - mean) * (o.value - mean);
    var /= static_cast<double>(obs.size() - 1);
    return std::max(var, 1e-12);
}

std::vector<std::string> chosen_symbol_strings(const GroundSet& ground, const ConstraintSet& s) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(ground.num_sites()));
    for (int site = 0; site < ground.num_sites(); ++site) {
        std::string symbols;
        for (int a = 0; a < static_cast<int>(ground.alphabet(site).size()); ++a)
            if (s.contains(site, a)) symbols.push_back(ground.alphabet(site)[static_cast<std::size_t>(a)]);
        out.push_back(std::move(symbols));
    }
    return out;
}

Item resolve_wild_type(const FitnessTable& table, const CampaignConfig& config) {
    const GroundSet& ground = table.ground();
    if (!config.wild_type.empty()) return ground.item_from_sequence(config.wild_type);
    if (!table.metadata().wild_type.empty())
        return ground.item_from_sequence(table.metadata().wild_type);
    return ground.item_at(0);
}

} // namespace

GpGridSpec GpGridSpec::defaults() {
    GpGridSpec grid;
    grid.lengthscales = log_spaced(0.5, 8.0, 5);
    grid.signal_relative = log_spaced(0.1, 10.0, 5);
    grid.noise_relative = log_spaced(1e-6, 1e-2, 5);
    return grid;
}

std::vector<GpHyperparameters> expand_grid(const GpGridSpec& grid, const GpHyperparameters& base,
                                           double variance) {
    std::vector<GpHyperparameters> out;
    out.reserve(grid.lengthscales.size() * grid.signal_relative.size() * grid.noise_relative.size());
    for (double l : grid.lengthscales) {
        for (double s : grid.signal_relative) {
            for (double n : grid.noise_relative) {
                GpHyperparameters hyper = base;
                hyper.lengthscale = l;
                hyper.signal_variance = s * variance;
                hyper.noise_variance = n * variance;
                out.push_back(hyper);
            }
        }
    }
    return out;
}

std::vector<std::uint64_t> sample_batch(const GroundSet& ground, const ConstraintSet& s,
                                        std::int64_t n, Rng& rng) {
    const std::uint64_t q = library_size(ground, s);
    if (q == 0) throw ConfigError("cannot sample a batch from an empty library");
    if (n < 1) throw ConfigError("batch size must be >= 1");

    const auto sel = selected_symbols(ground, s);
    std::vector<std::uint64_t> radix(sel.size(), 1);
    std::uint64_t acc = 1;
    for (std::size_t site = sel.size(); site-- > 0;) {
        radix[site] = acc;
        acc *= sel[site].size();
    }

    std::vector<std::uint64_t> batch;
    batch.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        std::uint64_t k = rng.bounded(q);
        std::uint64_t index = 0;
        for (std::size_t site = 0; site < sel.size(); ++site) {
            index += static_cast<std::uint64_t>(sel[site][static_cast<std::size_t>(k / radix[site])]) *
                     ground.strides()[site];
            k %= radix[site];
        }
        batch.push_back(index);
    }
    return batch;
}

std::vector<Item> initial_design(const GroundSet& ground, const Item& wild_type, int k_random,
                                 Rng& rng) {
    if (wild_type.symbols.size() != static_cast<std::size_t>(ground.num_sites()))
        throw ConfigError("wild type does not match the ground set");

    std::vector<Item> design;
    std::unordered_set<std::uint64_t> seen;
    auto push = [&](Item item) {
        const std::uint64_t index = ground.item_index(item);
        if (seen.insert(index).second) design.push_back(std::move(item));
    };

    push(wild_type);
    for (int site = 0; site < ground.num_sites(); ++site) {
        for (int symbol = 0; symbol < static_cast<int>(ground.alphabet(site).size()); ++symbol) {
            if (symbol == wild_type.symbols[static_cast<std::size_t>(site)]) continue;
            Item mutant = wild_type;
            mutant.symbols[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(symbol);
            push(std::move(mutant));
        }
    }
    for (int i = 0; i < k_random; ++i) push(ground.item_at(rng.bounded(ground.library_capacity())));
    return design;
}

RoundRecord run_round(CampaignState& state, const FitnessTable& table, const CampaignConfig& config) {
    if (state.observations.empty())
        throw ConfigError("run_round needs at least one prior observation");
    const GroundSet& ground = table.ground();
    const int round = state.round + 1;

    std::vector<double> all_values;
    all_values.reserve(state.observations.size());
    for (const TaggedObservation& obs : state.observations) all_values.push_back(obs.value);
    const double tau = update_threshold(all_values);

    const std::vector<Observation> deduped = dedup_observations(ground, state.observations);

    GpHyperparameters hyper = config.gp;
    if (config.refit_hyperparameters && deduped.size() >= 2) {
        const auto grid = expand_grid(config.grid, config.gp, observed_variance(deduped));
        hyper = fit_hyperparameters(ground, deduped, grid);
    }
    const GpPosterior posterior = GpPosterior::fit(ground, deduped, hyper);
    RewardMatrix rewards = compute_rewards(posterior, ground, tau, config.threads);

    const ObjectiveContext ctx(ground, std::move(rewards), config.batch_size);
    OptimizerConfig optimizer = config.optimizer;
    optimizer.seed = derive_seed(config.seed, "optimizer", static_cast<std::uint64_t>(round));
    const DsoptResult result = dsopt(ctx, optimizer);

    Rng batch_rng(derive_seed(config.seed, "batch", static_cast<std::uint64_t>(round)));
    const std::vector<std::uint64_t> batch =
        sample_batch(ground, result.best, config.batch_size, batch_rng);

    Rng noise_rng(derive_seed(config.seed, "noise", static_cast<std::uint64_t>(round)));
    RoundRecord record;
    record.round = round;
    record.has_design = true;
    record.chosen_symbols = chosen_symbol_strings(ground, result.best);
    record.library_size = library_size(ground, result.best);
    record.surrogate_value = result.best_value;
    record.tau_used = tau;
    record.batch_items = batch;
    record.batch_values.reserve(batch.size());
    for (std::uint64_t index : batch) {
        double value = table.value_at(index);
        if (config.observation_noise > 0.0) value += config.observation_noise * noise_rng.gaussian();
        record.batch_values.push_back(value);
        state.observations.push_back({index, value, round});
        state.best_so_far = std::max(state.best_so_far, value);
    }
    state.tau = std::max(tau, state.best_so_far);
    state.round = round;
    record.best_so_far = state.best_so_far;
    record.regret = simple_regret(state.best_so_far, table.global_best(config.missing_policy));

    if (config.mc_validation && record.library_size >= 1 &&
        record.library_size <= config.mc.size_cap) {
        const McEstimate mc = mc_objective(
            result.best, posterior, tau, config.batch_size, config.mc.replicates,
            derive_seed(config.seed, "mc", static_cast<std::uint64_t>(round)), config.mc);
        record.has_mc = true;
        record.mc_mean = mc.mean;
        record.mc_stderr = mc.stderr_;
    }
    return record;
}

CampaignReport run_campaign(const FitnessTable& table, const CampaignConfig& config,
                            const std::string& resolved_config_json) {
    if (config.rounds < 0) throw ConfigError("rounds must be >= 0");
    if (config.batch_size < 1) throw ConfigError("batch size must be >= 1");
    const GroundSet& ground = table.ground();
    const Item wild_type = resolve_wild_type(table, config);
    const double global_best = table.global_best(config.missing_policy);

    CampaignReport report;
    report.ground = ground;
    report.source = table.metadata().source;
    report.units = table.metadata().units;
    // Stored in compact normalized form so the report JSON round-trips to an
    // equal structure.
    report.resolved_config_json =
        resolved_config_json.empty() ? std::string{}
                                     : detail::json::parse(resolved_config_json).dump();
    report.global_best = global_best;
    report.wild_type_sequence = ground.sequence_of(wild_type);
    report.wild_type_fitness = table.value_at(ground.item_index(wild_type));

    // Reference lines: best Hamming-1 mutant, and the per-site best mutant
    // symbols recombined in the wild-type background.
    Item recombined = wild_type;
    bool first_mutant = true;
    for (int site = 0; site < ground.num_sites(); ++site) {
        int best_symbol = -1;
        double best_value = 0.0;
        for (int symbol = 0; symbol < static_cast<int>(ground.alphabet(site).size()); ++symbol) {
            if (symbol == wild_type.symbols[static_cast<std::size_t>(site)]) continue;
            Item mutant = wild_type;
            mutant.symbols[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(symbol);
            const double value = table.value_at(ground.item_index(mutant));
            if (best_symbol < 0 || value > best_value) {
                best_symbol = symbol;
                best_value = value;
            }
            if (first_mutant || value > report.best_single_mutant_fitness) {
                first_mutant = false;
                report.best_single_mutant_fitness = value;
                report.best_single_mutant_sequence = ground.sequence_of(mutant);
            }
        }
        if (best_symbol >= 0)
            recombined.symbols[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(best_symbol);
    }
    report.recombined_best_sequence = ground.sequence_of(recombined);
    report.recombined_best_fitness = table.value_at(ground.item_index(recombined));

    // Round 0: the initial design.
    Rng init_rng(derive_seed(config.seed, "init-random"));
    const std::vector<Item> design = initial_design(ground, wild_type, config.k_random, init_rng);
    Rng noise_rng(derive_seed(config.seed, "noise", 0));

    CampaignState state;
    RoundRecord init_record;
    init_record.round = 0;
    bool first = true;
    for (const Item& item : design) {
        const std::uint64_t index = ground.item_index(item);
        double value = table.value_at(index);
        if (config.observation_noise > 0.0) value += config.observation_noise * noise_rng.gaussian();
        init_record.batch_items.push_back(index);
        init_record.batch_values.push_back(value);
        state.observations.push_back({index, value, 0});
        state.best_so_far = first ? value : std::max(state.best_so_far, value);
        first = false;
    }
    state.tau = state.best_so_far;
    init_record.best_so_far = state.best_so_far;
    init_record.regret = simple_regret(state.best_so_far, global_best);
    report.rounds.push_back(std::move(init_record));

    for (int t = 1; t <= config.rounds; ++t)
        report.rounds.push_back(run_round(state, table, config));
    return report;
}

DesignResult run_design(const GroundSet& ground, std::span<const Observation> observations,
                        const CampaignConfig& config) {
    if (observations.empty()) throw DataError("design needs at least one observation");

    std::vector<TaggedObservation> tagged;
    tagged.reserve(observations.size());
    std::vector<double> values;
    values.reserve(observations.size());
    for (const Observation& obs : observations) {
        tagged.push_back({ground.item_index(obs.item), obs.value, 0});
        values.push_back(obs.value);
    }
    const double tau = update_threshold(values);
    const std::vector<Observation> deduped = dedup_observations(ground, tagged);

    GpHyperparameters hyper = config.gp;
    if (config.refit_hyperparameters && deduped.size() >= 2)
        hyper = fit_hyperparameters(ground, deduped,
                                    expand_grid(config.grid, config.gp, observed_variance(deduped)));
    const GpPosterior posterior = GpPosterior::fit(ground, deduped, hyper);
    RewardMatrix rewards = compute_rewards(posterior, ground, tau, config.threads);

    const ObjectiveContext ctx(ground, std::move(rewards), config.batch_size);
    OptimizerConfig optimizer = config.optimizer;
    optimizer.seed = derive_seed(config.seed, "optimizer", 1);
    const DsoptResult result = dsopt(ctx, optimizer);

    DesignResult design;
    design.best = result.best;
    design.surrogate_value = result.best_value;
    design.library_size = library_size(ground, result.best);
    design.tau = tau;
    for (const OptRun& run : result.runs) {
        if (run.final_set == result.best) {
            design.trajectory_length = run.trajectory.size();
            break;
        }
    }
    return design;
}

std::vector<CompareRow> run_compare_objectives(const FitnessTable& table,
                                               const CampaignConfig& config,
                                               const CompareOptionsView& options) {
    const GroundSet& ground = table.ground();
    const Item wild_type = resolve_wild_type(table, config);

    Rng init_rng(derive_seed(config.seed, "init-random"));
    const std::vector<Item> design = initial_design(ground, wild_type, config.k_random, init_rng);
    std::vector<Observation> observations;
    observations.reserve(design.size());
    std::vector<double> values;
    for (const Item& item : design) {
        const double value = table.value_at(ground.item_index(item));
        observations.push_back({item, value});
        values.push_back(value);
    }
    const double tau = update_threshold(values);

    GpHyperparameters hyper = config.gp;
    if (config.refit_hyperparameters && observations.size() >= 2)
        hyper = fit_hyperparameters(
            ground, observations, expand_grid(config.grid, config.gp, observed_variance(observations)));
    const GpPosterior posterior = GpPosterior::fit(ground, observations, hyper);
    RewardMatrix rewards = compute_rewards(posterior, ground, tau, config.threads);
    const ObjectiveContext ctx(ground, std::move(rewards), config.batch_size);

    std::vector<std::pair<std::string, ConstraintSet>> sets;
    for (int i = 0; i < options.num_sets; ++i) {
        Rng rng(derive_seed(config.seed, "compare-set", static_cast<std::uint64_t>(i)));
        sets.emplace_back("random-" + std::to_string(i), random_start(ground, rng));
    }
    if (options.include_dsopt_solution) {
        OptimizerConfig optimizer = config.optimizer;
        optimizer.seed = derive_seed(config.seed, "optimizer", 1);
        sets.emplace_back("dsopt", dsopt(ctx, optimizer).best);
    }

    std::vector<CompareRow> rows;
    rows.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
        CompareRow row;
        row.id = sets[i].first;
        row.library_size = library_size(ground, sets[i].second);
        row.surrogate = ctx.surrogate(sets[i].second);
        try {
            const McEstimate mc = mc_objective(sets[i].second, posterior, tau, config.batch_size,
                                               config.mc.replicates,
                                               derive_seed(config.seed, "compare-mc", i), config.mc);
            row.has_mc = true;
            row.mc_mean = mc.mean;
            row.mc_stderr = mc.stderr_;
        } catch (const ConfigError& e) {
            row.note = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string compare_rows_to_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream out;
    out << "constraint_set_id,surrogate,mc_mean,mc_stderr,library_size\n";
    char buffer[64];
    auto fmt = [&buffer](double v) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", v);
        return std::string(buffer);
    };
    for (const CompareRow& row : rows) {
        if (!row.has_mc) continue;  // size-cap skips are reported, not written
        out << row.id << ',' << fmt(row.surrogate) << ',' << fmt(row.mc_mean) << ','
            << fmt(row.mc_stderr) << ',' << row.library_size << '\n';
    }
    return out.str();
}

} // namespace bsbo
