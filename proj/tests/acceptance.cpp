// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one pass/fail line per criterion. Exits non-zero if any mandatory
// criterion fails. Criterion 12 needs user-supplied datasets (BSBO_GB1_CSV /
// BSBO_PHOQ_CSV) and is skipped when they are absent.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bsbo/campaign.hpp"
#include "bsbo/config.hpp"
#include "bsbo/ds_optimize.hpp"
#include "bsbo/validate.hpp"
#include "oracles.hpp"

using namespace bsbo;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    std::string name;
    enum class State { Pass, Fail, Skip } state;
    std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, const std::string& name, bool pass, const std::string& detail) {
    g_results.push_back({id, name, pass ? Criterion::State::Pass : Criterion::State::Fail, detail});
}

void record_skip(int id, const std::string& name, const std::string& detail) {
    g_results.push_back({id, name, Criterion::State::Skip, detail});
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

double percentile_nearest_rank(std::vector<double> values, double fraction) {
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(values.size())));
    return values[std::min(values.size() - 1, rank == 0 ? 0 : rank - 1)];
}

ObjectiveContext context_from(const validate::RandomInstance& instance) {
    return ObjectiveContext(instance.ground, instance.rewards, instance.batch_size);
}

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

// ---------------------------------------------------------------- C1 + C2

void criteria_1_and_2() {
    const std::int64_t batch_sizes[] = {1, 5, 50};
    Rng rng(derive_seed(20260808, "c1"));
    std::uint64_t identity_violations = 0;
    double worst_identity = 0.0;
    std::uint64_t h1_viol = 0, supermod_viol = 0, monotone_viol = 0;

    for (int inst = 0; inst < 100; ++inst) {
        const auto instance =
            validate::make_random_instance(rng, 3, 4, batch_sizes[inst % 3]);  // L<=3, |C_l|<=4
        const auto ctx = context_from(instance);
        const GroundSet& ground = instance.ground;
        const int m = ground.total_constraints();

        const auto objective = oracles::table_over_subsets(
            ground, [&](const ConstraintSet& s) { return ctx.surrogate(s); });

        for (const bool use_sa : {true, false}) {
            const DsDecomposition ds = use_sa ? decompose_sa(ctx) : decompose_dc(ctx);
            const auto h = oracles::table_over_subsets(ground,
                                                       [&](const ConstraintSet& s) { return ds.h(s); });
            const auto g = oracles::table_over_subsets(ground,
                                                       [&](const ConstraintSet& s) { return ds.g(s); });
            for (std::uint32_t mask = 0; mask < objective.size(); ++mask) {
                const double residual = std::abs(g[mask] - h[mask] - objective[mask]);
                if (residual > 1e-9 * std::max(1.0, std::abs(objective[mask]))) {
                    ++identity_violations;
                    worst_identity = std::max(worst_identity, residual);
                }
            }
            if (use_sa) {
                // Unconditional submodularity of the concave-of-cardinality part.
                if (oracles::worst_submodularity_violation(h, m) > 1e-9) ++h1_viol;
            }
        }

        const auto reward_sum = oracles::table_over_subsets(
            ground, [&](const ConstraintSet& s) { return ctx.reward_sum(s); });
        // Supermodularity: negate and run the diminishing-returns check.
        std::vector<double> negated(reward_sum.size());
        for (std::size_t i = 0; i < reward_sum.size(); ++i) negated[i] = -reward_sum[i];
        if (oracles::worst_submodularity_violation(negated, m) > 1e-9) ++supermod_viol;
        for (std::uint32_t mask = 0; mask < reward_sum.size(); ++mask)
            for (int j = 0; j < m; ++j)
                if (!((mask >> j) & 1U) && reward_sum[mask | (1U << j)] < reward_sum[mask] - 1e-9)
                    ++monotone_viol;
    }

    record(1, "decomposition-identity",
           identity_violations == 0,
           "100 instances, all subsets, SA+DC; violations=" + std::to_string(identity_violations) +
               " worst=" + fmt(worst_identity));
    record(2, "unconditional-submodularity",
           h1_viol == 0 && supermod_viol == 0 && monotone_viol == 0,
           "h1 DR violations=" + std::to_string(h1_viol) +
               ", reward-sum supermodularity violations=" + std::to_string(supermod_viol) +
               ", monotonicity violations=" + std::to_string(monotone_viol));
}

// --------------------------------------------------------------------- C3

void criterion_3() {
    const std::int64_t batch_sizes[] = {1, 2, 5, 20};
    Rng rng(derive_seed(20260808, "c3"));
    std::uint64_t h2_viol = 0, g2_viol = 0, g1_viol = 0;
    int beta_held = 0, beta_broken = 0;

    for (int inst = 0; inst < 50; ++inst) {
        validate::RandomInstance instance = validate::make_random_instance(rng, 3, 4, batch_sizes[inst % 4]);
        while (instance.ground.total_constraints() > 8)
            instance = validate::make_random_instance(rng, 3, 4, batch_sizes[inst % 4]);
        const auto ctx = context_from(instance);
        const GroundSet& ground = instance.ground;
        const int m = ground.total_constraints();

        const DsDecomposition dc = decompose_dc(ctx);
        const auto h2 =
            oracles::table_over_subsets(ground, [&](const ConstraintSet& s) { return dc.h(s); });
        const auto g2 =
            oracles::table_over_subsets(ground, [&](const ConstraintSet& s) { return dc.g(s); });
        if (oracles::worst_submodularity_violation(h2, m) > 1e-9) ++h2_viol;
        if (oracles::worst_submodularity_violation(g2, m) > 1e-9) ++g2_viol;

        const DsDecomposition sa = decompose_sa(ctx);
        const auto g1 =
            oracles::table_over_subsets(ground, [&](const ConstraintSet& s) { return sa.g(s); });
        if (oracles::worst_submodularity_violation(g1, m) > 1e-9) ++g1_viol;
        if (sa.beta_fallback_used)
            ++beta_broken;
        else
            ++beta_held;
    }

    record(3, "claimed-submodularity", h2_viol == 0 && g2_viol == 0 && g1_viol == 0,
           "h2 violations=" + std::to_string(h2_viol) + ", g2 violations=" + std::to_string(g2_viol) +
               ", g1(beta-with-fallback) violations=" + std::to_string(g1_viol) +
               "; beta' held on " + std::to_string(beta_held) + "/50, fallback on " +
               std::to_string(beta_broken) + " (reported, non-fatal per the known sign ambiguity)");
}

// --------------------------------------------------------------------- C4

void criterion_4() {
    Rng rng(derive_seed(20260808, "c4"));
    std::uint64_t violations = 0;
    double worst = 0.0;

    for (int inst = 0; inst < 12; ++inst) {
        validate::RandomInstance instance = validate::make_random_instance(rng, 3, 4, 5);
        while (instance.ground.total_constraints() > 8)
            instance = validate::make_random_instance(rng, 3, 4, 5);
        const auto ctx = context_from(instance);
        const GroundSet& ground = instance.ground;
        const int m = ground.total_constraints();
        const DsDecomposition dc = decompose_dc(ctx);
        const auto h2 =
            oracles::table_over_subsets(ground, [&](const ConstraintSet& s) { return dc.h(s); });
        const auto g2 =
            oracles::table_over_subsets(ground, [&](const ConstraintSet& s) { return dc.g(s); });

        std::vector<std::uint32_t> anchors{0, static_cast<std::uint32_t>((1U << m) - 1)};
        for (int extra = 0; extra < 8; ++extra)
            anchors.push_back(static_cast<std::uint32_t>(rng.bounded(std::uint64_t{1} << m)));

        for (const std::uint32_t x_mask : anchors) {
            const ConstraintSet x = oracles::set_from_mask(ground, x_mask);
            for (const BoundVariant variant : {BoundVariant::Grow, BoundVariant::Shrink}) {
                const ModularFunction ub = modular_upper_bound(ground, dc.h, x, variant);
                if (std::abs(ub.value(ground, x) - h2[x_mask]) >
                    1e-9 * std::max(1.0, std::abs(h2[x_mask]))) {
                    ++violations;
                }
                for (std::uint32_t mask = 0; mask < (1U << m); ++mask) {
                    const ConstraintSet y = oracles::set_from_mask(ground, mask);
                    const double gap = h2[mask] - ub.value(ground, y);
                    if (gap > 1e-9 * std::max(1.0, std::abs(h2[mask]))) {
                        ++violations;
                        worst = std::max(worst, gap);
                    }
                }
            }
            std::vector<int> order;
            for (int j = 0; j < m; ++j)
                if ((x_mask >> j) & 1U) order.push_back(j);
            for (int j = 0; j < m; ++j)
                if (!((x_mask >> j) & 1U)) order.push_back(j);
            const ModularFunction lb = modular_lower_bound(ground, dc.g, x, order);
            if (std::abs(lb.value(ground, x) - g2[x_mask]) >
                1e-9 * std::max(1.0, std::abs(g2[x_mask])))
                ++violations;
            for (std::uint32_t mask = 0; mask < (1U << m); ++mask) {
                const ConstraintSet y = oracles::set_from_mask(ground, mask);
                const double gap = lb.value(ground, y) - g2[mask];
                if (gap > 1e-9 * std::max(1.0, std::abs(g2[mask]))) {
                    ++violations;
                    worst = std::max(worst, gap);
                }
            }
        }
    }
    record(4, "modular-bound-dominance-tightness", violations == 0,
           "12 instances x 10 anchors x both variants; violations=" + std::to_string(violations) +
               (violations ? " worst=" + fmt(worst) : ""));
}

// --------------------------------------------------------------------- C5

void criterion_5() {
    Rng rng(derive_seed(20260808, "c5"));
    const OptimizeMethod methods[] = {OptimizeMethod::ModModSA, OptimizeMethod::ModModDC,
                                      OptimizeMethod::SupSubSA, OptimizeMethod::SupSubDC};
    int runs_checked = 0;
    std::uint64_t audit_failures = 0, monotonicity_failures = 0;

    for (int inst = 0; inst < 25; ++inst) {
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng.bounded(50));
        const auto instance = validate::make_random_instance(rng, 3, 4, n);
        const auto ctx = context_from(instance);
        const GroundSet& ground = instance.ground;

        for (const OptimizeMethod method : methods) {
            OptimizerConfig config;
            config.method = method;
            config.restarts = 3;
            config.seed = derive_seed(900, "c5-run", inst, static_cast<int>(method));
            const DsoptResult result = dsopt(ctx, config);
            ++runs_checked;

            for (const auto& [j, neighbor] : neighbors(ground, result.best))
                if (ctx.surrogate(neighbor) > result.best_value + 1e-9) ++audit_failures;
            for (const OptRun& run : result.runs) {
                for (std::size_t i = 1; i < run.trajectory.size(); ++i)
                    if (run.trajectory[i].second < run.trajectory[i - 1].second - 1e-12)
                        ++monotonicity_failures;
                for (const auto& [j, neighbor] : neighbors(ground, run.final_set))
                    if (ctx.surrogate(neighbor) > run.final_value + 1e-9) ++audit_failures;
            }
        }
    }
    record(5, "optimizer-local-max-and-monotonicity",
           audit_failures == 0 && monotonicity_failures == 0,
           std::to_string(runs_checked) + " seeded runs; toggle-audit failures=" +
               std::to_string(audit_failures) +
               ", trajectory violations=" + std::to_string(monotonicity_failures));
}

// --------------------------------------------------------------------- C6

std::string run_c6(bool& pass) {
    const GroundSet ground({"abcde", "fghij"});
    std::ostringstream log;
    pass = true;

    for (const OptimizeMethod method : {OptimizeMethod::ModModSA, OptimizeMethod::ModModDC}) {
        for (const std::int64_t n : {1LL, 10LL, 100LL}) {
            int hits = 0;
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                Rng rng(derive_seed(seed, "c6-instance", n));
                RewardMatrix rewards;
                rewards.rho.resize(ground.library_capacity());
                for (double& r : rewards.rho) r = rng.uniform();
                const ObjectiveContext ctx(ground, rewards, n);

                const auto table = oracles::table_over_subsets(
                    ground, [&](const ConstraintSet& s) { return ctx.surrogate(s); });
                const double global = oracles::exhaustive_max(table).value;

                OptimizerConfig config;
                config.method = method;
                config.restarts = 19;
                config.seed = seed;
                const DsoptResult result = dsopt(ctx, config);
                if (result.best_value >= 0.95 * global) ++hits;
                log << method_name(method) << ',' << n << ',' << seed << ','
                    << fmt(result.best_value) << ',' << fmt(global) << '\n';
            }
            log << "# " << method_name(method) << " n=" << n << " hits=" << hits << "/50\n";
            if (hits < 45) pass = false;
        }
    }
    return log.str();
}

// --------------------------------------------------------------------- C7

std::string run_c7(bool& pass, std::string& detail) {
    const FitnessTable table = generate_synthetic(SyntheticSpec::defaults());
    const GroundSet& ground = table.ground();
    RewardMatrix rewards;
    rewards.rho.resize(table.size());
    for (std::uint64_t i = 0; i < table.size(); ++i)
        rewards.rho[i] = std::clamp(table.value_at(i), 0.0, 1.0);

    const OptimizeMethod methods[] = {OptimizeMethod::ModModSA, OptimizeMethod::ModModDC,
                                      OptimizeMethod::Greedy, OptimizeMethod::GreedyAdd,
                                      OptimizeMethod::GreedyRem};
    std::ostringstream log;
    std::ostringstream summary;
    pass = true;

    for (const std::int64_t n : {10LL, 100LL, 1000LL}) {
        const ObjectiveContext ctx(ground, rewards, n);
        std::vector<ConstraintSet> starts;
        starts.push_back(best_item_start(ctx));
        for (int i = 1; i < 19; ++i) {
            Rng rng(derive_seed(7, "c7-start", static_cast<std::uint64_t>(n), i));
            starts.push_back(random_start(ground, rng));
        }

        double means[5] = {0, 0, 0, 0, 0};
        for (int mi = 0; mi < 5; ++mi) {
            OptimizerConfig config;
            config.method = methods[mi];
            config.explicit_starts = starts;
            config.seed = 7;
            const DsoptResult result = dsopt(ctx, config);
            double total = 0.0;
            for (const OptRun& run : result.runs) {
                total += run.final_value;
                log << method_name(methods[mi]) << ',' << n << ',' << fmt(run.final_value) << '\n';
            }
            means[mi] = total / static_cast<double>(result.runs.size());
        }
        summary << " n=" << n << ":";
        for (int mi = 0; mi < 5; ++mi)
            summary << ' ' << method_name(methods[mi]) << '=' << fmt(means[mi]);
        // DSOpt-SA, DSOpt-DC and Greedy must each dominate Greedy-Add and Greedy-Rem.
        for (int mi = 0; mi < 3; ++mi)
            if (means[mi] < means[3] - 1e-12 || means[mi] < means[4] - 1e-12) pass = false;
        log << "# n=" << n << " means: sa=" << fmt(means[0]) << " dc=" << fmt(means[1])
            << " greedy=" << fmt(means[2]) << " add=" << fmt(means[3]) << " rem=" << fmt(means[4])
            << '\n';
    }
    detail = summary.str();
    return log.str();
}

// ---------------------------------------------------------------- C8 + C9

struct SurrogatePosterior {
    GroundSet ground;
    GpPosterior posterior;
    double tau;
    RewardMatrix rewards;
};

SurrogatePosterior synthetic_campaign_posterior() {
    const FitnessTable table = generate_synthetic(SyntheticSpec::defaults());
    const GroundSet& ground = table.ground();
    Rng init_rng(derive_seed(11, "c8-init"));
    const std::vector<Item> design = initial_design(ground, ground.item_at(0), 100, init_rng);
    std::vector<Observation> observations;
    std::vector<double> values;
    for (const Item& item : design) {
        const double value = table.value_at(ground.item_index(item));
        observations.push_back({item, value});
        values.push_back(value);
    }
    const double tau = update_threshold(values);

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double variance = 0.0;
    for (double v : values) variance += (v - mean) * (v - mean);
    variance = std::max(variance / static_cast<double>(values.size() - 1), 1e-12);

    GpHyperparameters base;
    const auto grid = expand_grid(GpGridSpec::defaults(), base, variance);
    const GpHyperparameters hyper = fit_hyperparameters(ground, observations, grid);
    GpPosterior posterior = GpPosterior::fit(ground, observations, hyper);
    RewardMatrix rewards = compute_rewards(posterior, ground, tau);
    return {ground, std::move(posterior), tau, std::move(rewards)};
}

void criteria_8_and_9(const SurrogatePosterior& sp) {
    const std::int64_t n = 100;
    const ObjectiveContext ctx(sp.ground, sp.rewards, n);

    {
        std::vector<double> surrogate, mc_mean;
        int overestimates = 0;
        McOptions options;
        options.size_cap = 4096;
        for (int i = 0; i < 20; ++i) {
            Rng rng(derive_seed(11, "c8-set", i));
            ConstraintSet s = random_start(sp.ground, rng);
            while (library_size(sp.ground, s) > 2000) s = random_start(sp.ground, rng);
            const McEstimate est = mc_objective(s, sp.posterior, sp.tau, n, 1000,
                                                derive_seed(11, "c8-mc", i), options);
            surrogate.push_back(ctx.surrogate(s));
            mc_mean.push_back(est.mean);
            if (surrogate.back() >= est.mean - 2.0 * est.stderr_) ++overestimates;
        }
        const double corr = pearson(surrogate, mc_mean);
        record(8, "surrogate-fidelity",
               corr >= 0.9 && overestimates >= 18,
               "Pearson=" + fmt(corr) + " (>=0.9), F-hat >= mc-2se on " +
                   std::to_string(overestimates) + "/20 (>=18)");
    }

    {
        McOptions options;
        options.diagonal_only = true;
        options.size_cap = 4096;
        const std::int64_t replicates = 2000;
        int within = 0;
        double worst_z = 0.0;
        for (int i = 0; i < 20; ++i) {
            Rng rng(derive_seed(13, "c9-set", i));
            ConstraintSet s = random_start(sp.ground, rng);
            while (library_size(sp.ground, s) > 2000) s = random_start(sp.ground, rng);
            const McEstimate est = mc_objective(s, sp.posterior, sp.tau, n, replicates,
                                                derive_seed(13, "c9-mc", i), options);
            const double gap = std::abs(ctx.surrogate(s) - est.mean);
            // Rule-of-three floor: a constant sample has plug-in stderr 0,
            // yet is consistent (3-sigma) with any mean within 3/replicates.
            const double limit = 3.0 * est.stderr_ + 3.0 / static_cast<double>(replicates);
            if (gap <= limit) ++within;
            if (est.stderr_ > 0.0) worst_z = std::max(worst_z, gap / est.stderr_);
        }
        record(9, "independence-equivalence", within == 20,
               std::to_string(within) + "/20 sets within 3 stderr (worst z=" + fmt(worst_z) + ")");
    }
}

// -------------------------------------------------------------------- C10

void criterion_10() {
    // Cross-validate the occupancy formula by exact enumeration first.
    bool formula_ok = true;
    for (int m = 2; m <= 4; ++m) {
        for (int n = 1; n <= 3; ++n) {
            double total = 0.0;
            const auto sequences = static_cast<std::uint64_t>(std::pow(m, n));
            for (std::uint64_t code = 0; code < sequences; ++code) {
                std::uint64_t rest = code;
                unsigned seen_mask = 0;
                for (int d = 0; d < n; ++d) {
                    seen_mask |= 1U << static_cast<int>(rest % m);
                    rest /= m;
                }
                total += std::popcount(seen_mask);
            }
            const double enumerated = total / static_cast<double>(sequences);
            const double formula = m * (1.0 - std::pow(1.0 - 1.0 / m, n));
            if (std::abs(enumerated - formula) > 1e-12) formula_ok = false;
        }
    }

    GpHyperparameters hyper;
    hyper.noise_variance = 1e-10;
    hyper.mean_from_data = true;
    const GroundSet grounds[] = {GroundSet({"ab"}), GroundSet({"abc", "de"}),
                                 GroundSet({"abcde", "fghij", "kl"})};
    bool mc_ok = true;
    std::ostringstream detail;
    for (const GroundSet& ground : grounds) {
        const auto m = ground.library_capacity();
        std::vector<Observation> obs;
        for (std::uint64_t i = 0; i < m; ++i) obs.push_back({ground.item_at(i), 10.0});
        const GpPosterior post = GpPosterior::fit(ground, obs, hyper);
        for (const std::int64_t n : {1LL, 10LL, 100LL}) {
            const std::int64_t replicates = 2000;
            const McEstimate est = mc_objective(ground.full_set(), post, 0.0, n, replicates,
                                                derive_seed(17, "c10", m, n));
            const double expect =
                static_cast<double>(m) * (1.0 - std::pow(1.0 - 1.0 / static_cast<double>(m), n));
            // Same rule-of-three floor as criterion 9 for constant samples.
            if (std::abs(est.mean - expect) >
                3.0 * est.stderr_ + 3.0 / static_cast<double>(replicates)) {
                mc_ok = false;
                detail << " m=" << m << ",n=" << n << " off (" << fmt(est.mean) << " vs "
                       << fmt(expect) << ")";
            }
        }
    }
    record(10, "mc-occupancy-sanity", formula_ok && mc_ok,
           std::string("enumeration cross-check ") + (formula_ok ? "exact" : "FAILED") +
               "; MC within 3 stderr for m in {2,6,50} x n in {1,10,100}" + detail.str());
}

// -------------------------------------------------------------- C11 + C13

struct CampaignBattery {
    int in_top = 0;
    bool regret_ok = true;
    std::vector<std::string> report_dirs;
};

CampaignBattery run_c11(const FitnessTable& table, double threshold, const fs::path& root) {
    CampaignBattery battery;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        CampaignConfig config;
        config.seed = seed;
        const CampaignReport report = run_campaign(table, config, campaign_config_to_json(config));
        const double best = report.rounds.back().best_so_far;
        if (best >= threshold - 1e-12) ++battery.in_top;
        double previous = std::numeric_limits<double>::infinity();
        for (const RoundRecord& round : report.rounds) {
            if (round.regret > previous + 1e-12) battery.regret_ok = false;
            previous = round.regret;
        }
        const fs::path dir = root / ("seed_" + std::to_string(seed));
        write_report(report, dir.string());
        battery.report_dirs.push_back(dir.string());
    }
    return battery;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool compare_report_dirs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const char* names[] = {"report.json", "per_round_batches.csv", "ecdf.csv", "regret.csv",
                           "reference_lines.csv"};
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (const char* name : names)
            if (slurp(fs::path(a[i]) / name) != slurp(fs::path(b[i]) / name)) return false;
    return true;
}

// -------------------------------------------------------------------- C12

void criterion_12() {
    struct Dataset {
        const char* env;
        const char* name;
    };
    const Dataset datasets[] = {{"BSBO_GB1_CSV", "GB1"}, {"BSBO_PHOQ_CSV", "PhoQ"}};
    bool any = false;
    bool pass = true;
    std::ostringstream detail;

    for (const Dataset& ds : datasets) {
        const char* path = std::getenv(ds.env);
        if (!path || !*path) continue;
        any = true;
        const FitnessTable table = FitnessTable::load_csv(path);
        int wins = 0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            CampaignConfig config;
            config.seed = seed;
            config.threads = 4;
            const CampaignReport report = run_campaign(table, config);
            const double best = report.rounds.back().best_so_far;
            if (best > report.wild_type_fitness && best > report.best_single_mutant_fitness &&
                best > report.recombined_best_fitness)
                ++wins;
        }
        detail << ' ' << ds.name << " wins=" << wins << "/3";
        if (wins < 1) pass = false;
    }

    if (!any) {
        record_skip(12, "real-dataset-campaigns",
                    "optional; set BSBO_GB1_CSV / BSBO_PHOQ_CSV to enable");
        return;
    }
    record(12, "real-dataset-campaigns", pass, detail.str());
}

} // namespace

int main() {
    const fs::path out_root = fs::path("acceptance_out");
    fs::remove_all(out_root);
    fs::create_directories(out_root);

    criteria_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();

    bool c6_pass = false;
    const std::string c6_first = run_c6(c6_pass);
    record(6, "global-optimum-recovery", c6_pass,
           "2-site |C_l|=5, SA+DC, n in {1,10,100}, 19 restarts, 50 seeds, >=45/50 each");

    bool c7_pass = false;
    std::string c7_detail;
    const std::string c7_first = run_c7(c7_pass, c7_detail);
    record(7, "baseline-ordering", c7_pass, "26x26 synthetic;" + c7_detail);

    const SurrogatePosterior sp = synthetic_campaign_posterior();
    criteria_8_and_9(sp);
    criterion_10();

    const FitnessTable synthetic = generate_synthetic(SyntheticSpec::defaults());
    std::vector<double> values(synthetic.values());
    const double threshold = percentile_nearest_rank(values, 0.998);
    const CampaignBattery first = run_c11(synthetic, threshold, out_root / "c11");
    record(11, "campaign-effectiveness", first.in_top >= 20 && first.regret_ok,
           "top-0.2% threshold=" + fmt(threshold) + "; reached in " + std::to_string(first.in_top) +
               "/25 seeds (>=20); regret non-increasing=" + (first.regret_ok ? "yes" : "NO"));

    criterion_12();

    {
        bool rerun_pass = false;
        const std::string c6_second = run_c6(rerun_pass);
        bool c7_rerun_pass = false;
        std::string unused;
        const std::string c7_second = run_c7(c7_rerun_pass, unused);
        const CampaignBattery second = run_c11(synthetic, threshold, out_root / "c11_rerun");

        const auto write_text = [](const fs::path& path, const std::string& text) {
            std::ofstream out(path, std::ios::binary);
            out << text;
        };
        write_text(out_root / "c6_results.csv", c6_first);
        write_text(out_root / "c6_results_rerun.csv", c6_second);
        write_text(out_root / "c7_results.csv", c7_first);
        write_text(out_root / "c7_results_rerun.csv", c7_second);

        const bool identical =
            slurp(out_root / "c6_results.csv") == slurp(out_root / "c6_results_rerun.csv") &&
            slurp(out_root / "c7_results.csv") == slurp(out_root / "c7_results_rerun.csv") &&
            compare_report_dirs(first.report_dirs, second.report_dirs);
        record(13, "determinism", identical,
               "criteria 6, 7, 11 re-run with identical seeds; byte-identical=" +
                   std::string(identical ? "yes" : "NO"));
    }

    bool all_pass = true;
    for (const Criterion& c : g_results) {
        const char* tag = c.state == Criterion::State::Pass ? "[PASS]"
                          : c.state == Criterion::State::Skip ? "[SKIP]"
                                                              : "[FAIL]";
        std::cout << tag << " C" << (c.id < 10 ? "0" : "") << c.id << ' ' << c.name << ": "
                  << c.detail << '\n';
        if (c.state == Criterion::State::Fail) all_pass = false;
    }
    std::cout << (all_pass ? "ACCEPTANCE: all mandatory criteria passed\n"
                           : "ACCEPTANCE: FAILURES PRESENT\n");
    return all_pass ? 0 : 1;
}
