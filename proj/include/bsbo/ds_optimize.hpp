#ifndef BSBO_DS_OPTIMIZE_HPP
#define BSBO_DS_OPTIMIZE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bsbo/ds_decompose.hpp"
#include "bsbo/objective.hpp"
#include "bsbo/rng.hpp"

namespace bsbo {

enum class OptimizeMethod { ModModSA, ModModDC, SupSubSA, SupSubDC, Greedy, GreedyAdd, GreedyRem };

enum class PermutationPolicy { SingletonGainDescending, IndexOrder };

struct OptimizerConfig {
    OptimizeMethod method = OptimizeMethod::ModModSA;
    int restarts = 19;
    int max_outer_iterations = 100;
    PermutationPolicy permutation = PermutationPolicy::SingletonGainDescending;
    BoundVariant upper_bound_variant = BoundVariant::Grow;
    std::uint64_t seed = 0;
    /// When non-empty, replaces the restart scheme with these exact starts.
    std::vector<ConstraintSet> explicit_starts;
};

/// One restart's audit trail. The trajectory holds every accepted move
/// (including the start) and is non-decreasing in the objective.
struct OptRun {
    ConstraintSet initial;
    std::vector<std::pair<ConstraintSet, double>> trajectory;
    ConstraintSet final_set;
    double final_value = 0.0;
    bool converged = false;
    std::uint64_t evaluations = 0;
};

struct DsoptResult {
    ConstraintSet best;
    double best_value = 0.0;
    std::vector<OptRun> runs;
};

enum class GreedyMode { Add, Remove, Both };

/// One bound-and-minimize move: modular upper bound on h, chain lower bound
/// on g, exact minimization of their difference, empty-site repair, and the
/// keep-only-improvements filter. Never decreases the surrogate.
ConstraintSet modmod_step(const DsDecomposition& ds, const ConstraintSet& s,
                          const ObjectiveContext& ctx,
                          BoundVariant variant = BoundVariant::Grow,
                          PermutationPolicy permutation = PermutationPolicy::SingletonGainDescending);

/// Bounds only h modularly and greedily maximizes g - m (forward adds, then
/// backward removes); keeps the greedy result only if it improves.
ConstraintSet supsub_step(const DsDecomposition& ds, const ConstraintSet& s,
                          const ObjectiveContext& ctx, BoundVariant variant = BoundVariant::Grow);

/// Steepest-ascent single toggles until no strictly improving move exists.
ConstraintSet local_search(const ObjectiveContext& ctx, const ConstraintSet& s);

/// Steepest ascent restricted to additions, removals, or both.
ConstraintSet greedy_baseline(const ObjectiveContext& ctx, GreedyMode mode, const ConstraintSet& start);

/// The restart start used for restart 0: the minimal set generating the
/// single highest-reward item.
ConstraintSet best_item_start(const ObjectiveContext& ctx);

/// Random start: each constraint with probability 1/2, rejection-sampled
/// until every site is non-empty (<= 1000 tries, then one uniform symbol
/// per site).
ConstraintSet random_start(const GroundSet& ground, Rng& rng);

/// Multi-restart DS optimization. The returned set is a 1-toggle local
/// maximum of the surrogate; deterministic for a fixed (config, seed).
DsoptResult dsopt(const ObjectiveContext& ctx, const OptimizerConfig& config);

std::string method_name(OptimizeMethod method);
OptimizeMethod method_from_name(const std::string& name);

} // namespace bsbo

#endif // BSBO_DS_OPTIMIZE_HPP
