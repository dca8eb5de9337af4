#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "bsbo/campaign.hpp"
#include "bsbo/config.hpp"

using namespace bsbo;

namespace {

// A small landscape fast enough for full-campaign unit tests.
FitnessTable small_table() {
    SyntheticSpec spec;
    spec.alphabet_size = 8;
    spec.blocks = {{1, 2, 2, 2, 1.0}, {5, 5, 2, 2, 0.6}};
    return generate_synthetic(spec);
}

CampaignConfig fast_config() {
    CampaignConfig config;
    config.rounds = 2;
    config.batch_size = 12;
    config.k_random = 10;
    config.optimizer.restarts = 5;
    config.grid.lengthscales = {1.0, 2.0};
    config.grid.signal_relative = {1.0};
    config.grid.noise_relative = {1e-4};
    config.seed = 11;
    return config;
}

} // namespace

TEST_CASE("sampling from a singleton library repeats the single item") {
    const GroundSet ground({"ab", "cd"});
    const ConstraintSet s = ground.singleton_set(ground.item_from_sequence("bd"));
    Rng rng(1);
    const auto batch = sample_batch(ground, s, 9, rng);
    REQUIRE(batch.size() == 9);
    for (std::uint64_t index : batch) CHECK(index == ground.item_index(ground.item_from_sequence("bd")));
}

TEST_CASE("batch sampling is uniform (chi-square style bound)") {
    const GroundSet ground({"abc", "de"});  // |Q| = 6
    Rng rng(2);
    const auto batch = sample_batch(ground, ground.full_set(), 60000, rng);
    std::vector<int> counts(6, 0);
    for (std::uint64_t index : batch) ++counts[index];
    // Multinomial sd per cell: sqrt(n p (1-p)) ~ 91.3; allow 5 sd.
    for (int count : counts) CHECK(std::abs(count - 10000) <= 457);
}

TEST_CASE("batch sampling only produces library members and is seed-deterministic") {
    const GroundSet ground({"abcd", "efgh"});
    ConstraintSet s = ground.empty_set();
    s.add(0, 1);
    s.add(0, 3);
    s.add(1, 0);
    s.add(1, 2);
    std::set<std::uint64_t> members;
    for_each_library_index(ground, s, [&](std::uint64_t i) { members.insert(i); });

    Rng rng_a(77), rng_b(77);
    const auto a = sample_batch(ground, s, 500, rng_a);
    const auto b = sample_batch(ground, s, 500, rng_b);
    CHECK(a == b);
    for (std::uint64_t index : a) CHECK(members.count(index) == 1);

    Rng rng_c(3);
    CHECK_THROWS_AS(sample_batch(ground, ground.empty_set(), 5, rng_c), ConfigError);
}

TEST_CASE("initial design counts: wild type plus all single mutants") {
    const std::string aa = "ACDEFGHIKLMNPQRSTVWY";
    const GroundSet ground({aa, aa, aa, aa});
    Rng rng(5);
    const auto design = initial_design(ground, ground.item_at(0), 0, rng);
    CHECK(design.size() == 1 + 4 * 19);  // 77 items before randoms

    Rng rng2(5);
    const auto with_random = initial_design(ground, ground.item_at(0), 100, rng2);
    CHECK(with_random.size() <= 177);
    CHECK(with_random.size() > 77);
    std::set<std::uint64_t> seen;
    for (const Item& item : with_random) {
        CHECK(item.symbols.size() == 4);
        CHECK(seen.insert(ground.item_index(item)).second);  // deduplicated
    }
}

TEST_CASE("noiseless rounds record exactly the table values") {
    const FitnessTable table = small_table();
    CampaignConfig config = fast_config();
    const CampaignReport report = run_campaign(table, config);
    REQUIRE(report.rounds.size() == 3);  // init + 2 rounds
    for (const RoundRecord& round : report.rounds) {
        REQUIRE(round.batch_items.size() == round.batch_values.size());
        for (std::size_t i = 0; i < round.batch_items.size(); ++i)
            CHECK(round.batch_values[i] == table.value_at(round.batch_items[i]));
    }
}

TEST_CASE("best-so-far and tau are running maxima; regret never increases") {
    const FitnessTable table = small_table();
    CampaignConfig config = fast_config();
    config.rounds = 3;
    const CampaignReport report = run_campaign(table, config);

    double best = report.rounds[0].best_so_far;
    double regret = report.rounds[0].regret;
    double running = best;
    for (const RoundRecord& round : report.rounds) {
        for (double v : round.batch_values) running = std::max(running, v);
        CHECK(round.best_so_far == doctest::Approx(running));
        CHECK(round.best_so_far >= best - 1e-15);
        CHECK(round.regret <= regret + 1e-15);
        best = round.best_so_far;
        regret = round.regret;
        if (round.has_design) CHECK(round.tau_used <= best);
    }
}

TEST_CASE("round tau equals the max of all prior observations") {
    const FitnessTable table = small_table();
    CampaignConfig config = fast_config();
    const CampaignReport report = run_campaign(table, config);
    double max_seen = 0.0;
    bool first = true;
    for (const RoundRecord& round : report.rounds) {
        if (round.has_design) CHECK(round.tau_used == doctest::Approx(max_seen));
        for (double v : round.batch_values) {
            max_seen = first ? v : std::max(max_seen, v);
            first = false;
        }
    }
}

TEST_CASE("zero-round campaign reports only the initial design") {
    const FitnessTable table = small_table();
    CampaignConfig config = fast_config();
    config.rounds = 0;
    const CampaignReport report = run_campaign(table, config);
    REQUIRE(report.rounds.size() == 1);
    CHECK(!report.rounds[0].has_design);
    // Wild type + 2*7 single mutants + up to 10 randoms, deduplicated.
    CHECK(report.rounds[0].batch_items.size() >= 15);
    CHECK(report.rounds[0].batch_items.size() <= 25);
}

TEST_CASE("reference lines match their definitions") {
    const FitnessTable table = small_table();
    const GroundSet& ground = table.ground();
    CampaignConfig config = fast_config();
    config.rounds = 0;
    const CampaignReport report = run_campaign(table, config);

    const Item wt = ground.item_from_sequence(report.wild_type_sequence);
    CHECK(report.wild_type_fitness == table.value_at(ground.item_index(wt)));

    // Best single mutant: exhaustive Hamming-1 sweep.
    double best_single = -1e300;
    for (int site = 0; site < ground.num_sites(); ++site) {
        for (int symbol = 0; symbol < static_cast<int>(ground.alphabet(site).size()); ++symbol) {
            if (symbol == wt.symbols[static_cast<std::size_t>(site)]) continue;
            Item mutant = wt;
            mutant.symbols[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(symbol);
            best_single = std::max(best_single, table.value_at(ground.item_index(mutant)));
        }
    }
    CHECK(report.best_single_mutant_fitness == doctest::Approx(best_single));

    // Recombined best: per-site best mutant symbols in the wild-type background.
    Item recombined = wt;
    for (int site = 0; site < ground.num_sites(); ++site) {
        int arg = -1;
        double best = -1e300;
        for (int symbol = 0; symbol < static_cast<int>(ground.alphabet(site).size()); ++symbol) {
            if (symbol == wt.symbols[static_cast<std::size_t>(site)]) continue;
            Item mutant = wt;
            mutant.symbols[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(symbol);
            const double value = table.value_at(ground.item_index(mutant));
            if (value > best) {
                best = value;
                arg = symbol;
            }
        }
        recombined.symbols[static_cast<std::size_t>(site)] = static_cast<std::uint8_t>(arg);
    }
    CHECK(report.recombined_best_sequence == ground.sequence_of(recombined));
    CHECK(report.recombined_best_fitness == table.value_at(ground.item_index(recombined)));
}

TEST_CASE("identical master seeds reproduce the report bit for bit") {
    const FitnessTable table = small_table();
    CampaignConfig config = fast_config();
    const std::string a = report_to_json(run_campaign(table, config, "{}"));
    const std::string b = report_to_json(run_campaign(table, config, "{}"));
    CHECK(a == b);
}

TEST_CASE("run_round refuses an empty observation history") {
    const FitnessTable table = small_table();
    CampaignState state;
    CHECK_THROWS_AS(run_round(state, table, fast_config()), ConfigError);
}

TEST_CASE("observation noise perturbs recorded values") {
    const FitnessTable table = small_table();
    CampaignConfig config = fast_config();
    config.rounds = 1;
    config.observation_noise = 0.05;
    const CampaignReport report = run_campaign(table, config);
    bool any_off_table = false;
    for (const RoundRecord& round : report.rounds)
        for (std::size_t i = 0; i < round.batch_items.size(); ++i)
            any_off_table = any_off_table ||
                            round.batch_values[i] != table.value_at(round.batch_items[i]);
    CHECK(any_off_table);
}

TEST_CASE("mc validation annotates rounds when the library fits the cap") {
    const FitnessTable table = small_table();
    CampaignConfig config = fast_config();
    config.rounds = 1;
    config.mc_validation = true;
    config.mc.replicates = 200;
    const CampaignReport report = run_campaign(table, config);
    const RoundRecord& round = report.rounds.back();
    REQUIRE(round.has_design);
    if (round.library_size <= config.mc.size_cap) {
        CHECK(round.has_mc);
        CHECK(round.mc_stderr >= 0.0);
    }
}

TEST_CASE("campaign config JSON round-trips") {
    CampaignConfig config = fast_config();
    config.mc_validation = true;
    config.optimizer.method = OptimizeMethod::SupSubDC;
    config.missing_policy = MissingPolicy::DropFromGroundTruthMax;
    const std::string once = campaign_config_to_json(config);
    const CampaignConfig parsed = campaign_config_from_json(once);
    CHECK(campaign_config_to_json(parsed) == once);
    CHECK(parsed.optimizer.method == OptimizeMethod::SupSubDC);
    CHECK(parsed.missing_policy == MissingPolicy::DropFromGroundTruthMax);

    CHECK_THROWS_AS(campaign_config_from_json(R"({"batch_sz": 3})"), ConfigError);
    CHECK_THROWS_AS(campaign_config_from_json(R"({"batch_size": 0})"), ConfigError);
    CHECK_THROWS_AS(campaign_config_from_json("not json"), ConfigError);
}

TEST_CASE("design run selects the observed high-value corner on a toy") {
    const GroundSet ground({"ab", "cd"});
    std::vector<Observation> obs = {
        {ground.item_from_sequence("ac"), 5.0},
        {ground.item_from_sequence("ad"), 0.1},
        {ground.item_from_sequence("bc"), 0.1},
        {ground.item_from_sequence("bd"), 0.05},
    };
    CampaignConfig config;
    config.batch_size = 1;
    config.optimizer.restarts = 5;
    config.grid.lengthscales = {1.0, 2.0};
    config.grid.signal_relative = {1.0};
    config.grid.noise_relative = {1e-4};
    const DesignResult result = run_design(ground, obs, config);
    CHECK(result.tau == 5.0);
    CHECK(result.library_size >= 1);
    // The winning set must keep the symbols of the best observed item.
    CHECK(result.best.contains(0, 0));
    CHECK(result.best.contains(1, 0));
    CHECK(result.trajectory_length >= 1);
}

TEST_CASE("compare-objectives rows are complete on a small landscape") {
    SyntheticSpec spec;
    spec.alphabet_size = 6;
    spec.blocks = {{0, 0, 2, 2, 1.0}, {4, 4, 2, 2, 0.5}};
    const FitnessTable table = generate_synthetic(spec);

    CampaignConfig config = fast_config();
    config.batch_size = 5;
    config.mc.replicates = 300;
    CompareOptionsView options;
    options.num_sets = 6;
    const auto rows = run_compare_objectives(table, config, options);
    REQUIRE(rows.size() == 7);  // 6 random + dsopt
    for (const CompareRow& row : rows) {
        CHECK(row.has_mc);
        CHECK(row.library_size >= 1);
        CHECK(row.surrogate >= 0.0);
    }
    const std::string csv = compare_rows_to_csv(rows);
    CHECK(csv.rfind("constraint_set_id,surrogate,mc_mean,mc_stderr,library_size\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);  // header + 7 rows
}
