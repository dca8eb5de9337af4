#ifndef BSBO_OBJECTIVE_HPP
#define BSBO_OBJECTIVE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "bsbo/constraint_space.hpp"
#include "bsbo/gp_model.hpp"

namespace bsbo {

/// Frozen inputs of one acquisition round: the reward matrix over Q(C), the
/// batch size n, and cached per-constraint reward masses. Immutable; all
/// evaluations are pure.
class ObjectiveContext {
public:
    ObjectiveContext(GroundSet ground, RewardMatrix rewards, std::int64_t batch_size);

    const GroundSet& ground() const { return ground_; }
    const RewardMatrix& rewards() const { return rewards_; }
    std::int64_t batch_size() const { return batch_size_; }

    /// Sum of rho over Q(S); 0 when a site is empty.
    double reward_sum(const ConstraintSet& s) const;

    /// Sum of rho over {symbol at site} x prod of the other sites' current
    /// selections — the delta of toggling that constraint.
    double slice_sum(const ConstraintSet& s, int site, int symbol) const;

    /// Probability that one fixed library item appears at least once in an
    /// n-draw uniform batch: 1 - (1 - 1/q)^n.
    double coverage(std::uint64_t q) const;

    /// The surrogate acquisition value of S.
    double surrogate(const ConstraintSet& s) const;
    double surrogate_from(double reward_total, std::uint64_t q) const;

    /// Full-library reward mass of one constraint (used by the repair rule).
    double constraint_mass(int constraint) const { return masses_[static_cast<std::size_t>(constraint)]; }

    double total_reward() const { return total_reward_; }
    std::uint64_t best_item_index() const { return best_item_; }

private:
    GroundSet ground_;
    RewardMatrix rewards_;
    std::int64_t batch_size_;
    std::vector<double> masses_;
    double total_reward_ = 0.0;
    std::uint64_t best_item_ = 0;
};

double surrogate_objective(const ConstraintSet& s, const ObjectiveContext& ctx);

/// Stateful surrogate evaluator for toggle sweeps: neighbor values come from
/// slice sums, accepted toggles re-sum exactly so drift never accumulates.
class SurrogateEvaluator {
public:
    SurrogateEvaluator(const ObjectiveContext& ctx, ConstraintSet start);

    const ConstraintSet& current() const { return current_; }
    double value() const { return value_; }
    double value_if_toggled(int constraint) const;
    void apply_toggle(int constraint);
    std::uint64_t eval_count() const { return evals_; }

private:
    const ObjectiveContext* ctx_;
    ConstraintSet current_;
    double reward_total_;
    double value_;
    mutable std::uint64_t evals_ = 0;
};

struct McOptions {
    std::int64_t replicates = 1000;
    std::uint64_t size_cap = 4096;
    bool diagonal_only = false;    // drop posterior cross-covariances
    bool count_duplicates = false; // count every draw instead of distinct items
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t replicates = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate of the exact batched objective: per replicate, draw
/// a joint utility sample over Q(S) from the posterior, draw n uniform items
/// with replacement, and count distinct sampled items above tau.
/// Deterministic per seed; replicate r draws from the (seed, r) stream.
McEstimate mc_objective(const ConstraintSet& s, const GpPosterior& posterior, double tau,
                        std::int64_t batch_size, std::int64_t replicates, std::uint64_t seed,
                        const McOptions& options = {});

/// tau = max observed value; throws ConfigError on an empty list.
double update_threshold(std::span<const double> observed_values);

double simple_regret(double best_found, double global_best);

} // namespace bsbo

#endif // BSBO_OBJECTIVE_HPP
