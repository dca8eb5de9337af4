#include "bsbo/ds_optimize.hpp"

#include <algorithm>
#include <cmath>

#include "bsbo/errors.hpp"

namespace bsbo {

namespace {

constexpr double kStallEpsilon = 1e-12;
constexpr int kStallWindow = 3;

// Chain order for the lower bound: X first, then the rest. Singleton gains
// of g are uninformative on product spaces (every singleton library is
// empty for L >= 2, so they all tie), so ties fall back to the constraint's
// full-library reward mass before the index.
std::vector<int> chain_order(const GroundSet& ground, const SetFunction& g, const ConstraintSet& x,
                             const ObjectiveContext& ctx, PermutationPolicy policy) {
    const int m = ground.total_constraints();
    std::vector<int> members, outsiders;
    members.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        if (x.contains(ground.site_of(j), ground.symbol_of(j)))
            members.push_back(j);
        else
            outsiders.push_back(j);
    }
    if (policy == PermutationPolicy::SingletonGainDescending) {
        const ConstraintSet empty = ground.empty_set();
        std::vector<double> gain(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) gain[static_cast<std::size_t>(j)] = g.marginal_gain(ground, j, empty);
        auto by_gain = [&](int a, int b) {
            const double ga = gain[static_cast<std::size_t>(a)];
            const double gb = gain[static_cast<std::size_t>(b)];
            if (ga != gb) return ga > gb;
            const double ma = ctx.constraint_mass(a);
            const double mb = ctx.constraint_mass(b);
            if (ma != mb) return ma > mb;
            return a < b;
        };
        std::sort(members.begin(), members.end(), by_gain);
        std::sort(outsiders.begin(), outsiders.end(), by_gain);
    }
    members.insert(members.end(), outsiders.begin(), outsiders.end());
    return members;
}

// Adds, for every empty site, the constraint with the largest full-library
// reward mass (lowest index on ties).
ConstraintSet repair_empty_sites(const ObjectiveContext& ctx, ConstraintSet s) {
    const GroundSet& ground = ctx.ground();
    for (int site = 0; site < ground.num_sites(); ++site) {
        if (s.count(site) > 0) continue;
        int best_symbol = 0;
        double best_mass = -1.0;
        for (int symbol = 0; symbol < static_cast<int>(ground.alphabet(site).size()); ++symbol) {
            const double mass = ctx.constraint_mass(ground.constraint_index(site, symbol));
            if (mass > best_mass) {
                best_mass = mass;
                best_symbol = symbol;
            }
        }
        s.add(site, best_symbol);
    }
    return s;
}

struct ClimbResult {
    ConstraintSet set;
    double value;
    std::vector<std::pair<ConstraintSet, double>> accepted;
    std::uint64_t evaluations;
};

ClimbResult greedy_climb(const ObjectiveContext& ctx, const ConstraintSet& start, GreedyMode mode,
                         bool record_moves) {
    const GroundSet& ground = ctx.ground();
    SurrogateEvaluator eval(ctx, start);
    ClimbResult result{start, eval.value(), {}, 0};
    if (record_moves) result.accepted.emplace_back(start, eval.value());

    // Neighbor values are predicted from slice deltas while accepted states
    // re-sum exactly; the cap rules out float-noise oscillation between the
    // two. Any capped exit that is not a local maximum fails the audits.
    int accepts_left = 64 + 8 * ground.total_constraints();
    while (accepts_left-- > 0) {
        int best_j = -1;
        double best_value = eval.value();
        for (int j = 0; j < ground.total_constraints(); ++j) {
            const bool member = eval.current().contains(ground.site_of(j), ground.symbol_of(j));
            if (mode == GreedyMode::Add && member) continue;
            if (mode == GreedyMode::Remove && !member) continue;
            const double candidate = eval.value_if_toggled(j);
            if (candidate > best_value) {
                best_value = candidate;
                best_j = j;
            }
        }
        if (best_j < 0) break;
        eval.apply_toggle(best_j);
        if (record_moves) result.accepted.emplace_back(eval.current(), eval.value());
    }
    result.set = eval.current();
    result.value = eval.value();
    result.evaluations = eval.eval_count();
    return result;
}

} // namespace

ConstraintSet modmod_step(const DsDecomposition& ds, const ConstraintSet& s,
                          const ObjectiveContext& ctx, BoundVariant variant,
                          PermutationPolicy permutation) {
    const GroundSet& ground = ctx.ground();
    const ModularFunction upper = modular_upper_bound(ground, ds.h, s, variant);
    const std::vector<int> order = chain_order(ground, ds.g, s, ctx, permutation);
    const ModularFunction lower = modular_lower_bound(ground, ds.g, s, order);

    // Exact minimizer of the modular difference: keep every constraint with
    // strictly negative net weight.
    ConstraintSet raw = ground.empty_set();
    for (int j = 0; j < ground.total_constraints(); ++j) {
        const double net = upper.weights[static_cast<std::size_t>(j)] -
                           lower.weights[static_cast<std::size_t>(j)];
        if (net < 0.0) raw.add(ground.site_of(j), ground.symbol_of(j));
    }

    const double current_value = ctx.surrogate(s);
    ConstraintSet best = s;
    double best_value = current_value;
    const ConstraintSet repaired = repair_empty_sites(ctx, raw);
    for (const ConstraintSet* candidate : std::initializer_list<const ConstraintSet*>{&raw, &repaired}) {
        const double value = ctx.surrogate(*candidate);
        if (value > best_value) {
            best_value = value;
            best = *candidate;
        }
    }
    return best;
}

ConstraintSet supsub_step(const DsDecomposition& ds, const ConstraintSet& s,
                          const ObjectiveContext& ctx, BoundVariant variant) {
    const GroundSet& ground = ctx.ground();
    const ModularFunction upper = modular_upper_bound(ground, ds.h, s, variant);
    const int m = ground.total_constraints();

    auto score = [&](const ConstraintSet& y) { return ds.g(y) - upper.value(ground, y); };

    // Forward pass: greedy adds on the submodular surrogate g - m.
    ConstraintSet y = ground.empty_set();
    double y_score = score(y);
    while (true) {
        int best_j = -1;
        double best_score = y_score;
        for (int j = 0; j < m; ++j) {
            if (y.contains(ground.site_of(j), ground.symbol_of(j))) continue;
            ConstraintSet candidate = y;
            candidate.add(ground.site_of(j), ground.symbol_of(j));
            const double value = score(candidate);
            if (value > best_score) {
                best_score = value;
                best_j = j;
            }
        }
        if (best_j < 0) break;
        y.add(ground.site_of(best_j), ground.symbol_of(best_j));
        y_score = best_score;
    }
    // Backward pass: greedy removes.
    while (true) {
        int best_j = -1;
        double best_score = y_score;
        for (int j = 0; j < m; ++j) {
            if (!y.contains(ground.site_of(j), ground.symbol_of(j))) continue;
            ConstraintSet candidate = y;
            candidate.remove(ground.site_of(j), ground.symbol_of(j));
            const double value = score(candidate);
            if (value > best_score) {
                best_score = value;
                best_j = j;
            }
        }
        if (best_j < 0) break;
        y.remove(ground.site_of(best_j), ground.symbol_of(best_j));
        y_score = best_score;
    }

    const double current_value = ctx.surrogate(s);
    ConstraintSet best = s;
    double best_value = current_value;
    const ConstraintSet repaired = repair_empty_sites(ctx, y);
    for (const ConstraintSet* candidate : std::initializer_list<const ConstraintSet*>{&y, &repaired}) {
        const double value = ctx.surrogate(*candidate);
        if (value > best_value) {
            best_value = value;
            best = *candidate;
        }
    }
    return best;
}

ConstraintSet local_search(const ObjectiveContext& ctx, const ConstraintSet& s) {
    return greedy_climb(ctx, s, GreedyMode::Both, false).set;
}

ConstraintSet greedy_baseline(const ObjectiveContext& ctx, GreedyMode mode,
                              const ConstraintSet& start) {
    return greedy_climb(ctx, start, mode, false).set;
}

ConstraintSet best_item_start(const ObjectiveContext& ctx) {
    return ctx.ground().singleton_set(ctx.ground().item_at(ctx.best_item_index()));
}

ConstraintSet random_start(const GroundSet& ground, Rng& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        ConstraintSet s = ground.empty_set();
        for (int j = 0; j < ground.total_constraints(); ++j)
            if (rng.coin()) s.add(ground.site_of(j), ground.symbol_of(j));
        if (!s.any_site_empty()) return s;
    }
    ConstraintSet s = ground.empty_set();
    for (int site = 0; site < ground.num_sites(); ++site)
        s.add(site, static_cast<int>(rng.bounded(ground.alphabet(site).size())));
    return s;
}

DsoptResult dsopt(const ObjectiveContext& ctx, const OptimizerConfig& config) {
    if (config.restarts < 1) throw ConfigError("optimizer needs at least one restart");
    if (config.max_outer_iterations < 1) throw ConfigError("max outer iterations must be >= 1");

    const GroundSet& ground = ctx.ground();
    const bool greedy_family = config.method == OptimizeMethod::Greedy ||
                               config.method == OptimizeMethod::GreedyAdd ||
                               config.method == OptimizeMethod::GreedyRem;
    const bool supsub = config.method == OptimizeMethod::SupSubSA ||
                        config.method == OptimizeMethod::SupSubDC;
    const bool sa_construction = config.method == OptimizeMethod::ModModSA ||
                                 config.method == OptimizeMethod::SupSubSA;

    std::optional<DsDecomposition> ds;
    if (!greedy_family) ds = sa_construction ? decompose_sa(ctx) : decompose_dc(ctx);

    std::vector<ConstraintSet> starts = config.explicit_starts;
    if (starts.empty()) {
        starts.reserve(static_cast<std::size_t>(config.restarts));
        starts.push_back(best_item_start(ctx));
        for (int i = 1; i < config.restarts; ++i) {
            Rng rng(derive_seed(config.seed, "restart", static_cast<std::uint64_t>(i)));
            starts.push_back(random_start(ground, rng));
        }
    }

    DsoptResult result;
    result.runs.reserve(starts.size());
    bool have_best = false;

    for (const ConstraintSet& start : starts) {
        OptRun run;
        run.initial = start;

        std::vector<std::pair<ConstraintSet, double>> pool;
        auto pool_local_max = [&](const ConstraintSet& from) {
            ClimbResult climbed = greedy_climb(ctx, from, GreedyMode::Both, false);
            run.evaluations += climbed.evaluations;
            pool.emplace_back(std::move(climbed.set), climbed.value);
        };

        if (greedy_family) {
            const GreedyMode mode = config.method == OptimizeMethod::GreedyAdd ? GreedyMode::Add
                                    : config.method == OptimizeMethod::GreedyRem ? GreedyMode::Remove
                                                                                 : GreedyMode::Both;
            ClimbResult climbed = greedy_climb(ctx, start, mode, true);
            run.trajectory = std::move(climbed.accepted);
            run.evaluations = climbed.evaluations;
            run.converged = true;
            pool.emplace_back(std::move(climbed.set), climbed.value);
        } else {
            ConstraintSet s = start;
            double value = ctx.surrogate(s);
            run.trajectory.emplace_back(s, value);
            int stalled = 0;
            for (int iter = 0; iter < config.max_outer_iterations; ++iter) {
                pool_local_max(s);
                ConstraintSet next = supsub
                                         ? supsub_step(*ds, s, ctx, config.upper_bound_variant)
                                         : modmod_step(*ds, s, ctx, config.upper_bound_variant,
                                                       config.permutation);
                if (next == s) {
                    run.converged = true;
                    break;
                }
                const double next_value = ctx.surrogate(next);
                run.trajectory.emplace_back(next, next_value);
                stalled = (next_value - value < kStallEpsilon) ? stalled + 1 : 0;
                s = std::move(next);
                value = next_value;
                if (stalled >= kStallWindow) break;
            }
            // Polish the converged point so every pooled candidate is a
            // 1-toggle local maximum.
            pool_local_max(s);
        }

        std::size_t best_index = 0;
        for (std::size_t i = 1; i < pool.size(); ++i)
            if (pool[i].second > pool[best_index].second) best_index = i;
        run.final_set = pool[best_index].first;
        run.final_value = pool[best_index].second;

        if (!have_best || run.final_value > result.best_value) {
            have_best = true;
            result.best = run.final_set;
            result.best_value = run.final_value;
        }
        result.runs.push_back(std::move(run));
    }
    return result;
}

std::string method_name(OptimizeMethod method) {
    switch (method) {
        case OptimizeMethod::ModModSA: return "modmod-sa";
        case OptimizeMethod::ModModDC: return "modmod-dc";
        case OptimizeMethod::SupSubSA: return "supsub-sa";
        case OptimizeMethod::SupSubDC: return "supsub-dc";
        case OptimizeMethod::Greedy: return "greedy";
        case OptimizeMethod::GreedyAdd: return "greedy-add";
        case OptimizeMethod::GreedyRem: return "greedy-rem";
    }
    return "modmod-sa";
}

OptimizeMethod method_from_name(const std::string& name) {
    if (name == "modmod-sa") return OptimizeMethod::ModModSA;
    if (name == "modmod-dc") return OptimizeMethod::ModModDC;
    if (name == "supsub-sa") return OptimizeMethod::SupSubSA;
    if (name == "supsub-dc") return OptimizeMethod::SupSubDC;
    if (name == "greedy") return OptimizeMethod::Greedy;
    if (name == "greedy-add") return OptimizeMethod::GreedyAdd;
    if (name == "greedy-rem") return OptimizeMethod::GreedyRem;
    throw ConfigError("unknown optimizer method '" + name + "'");
}

} // namespace bsbo
