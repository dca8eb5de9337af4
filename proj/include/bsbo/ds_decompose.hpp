#ifndef BSBO_DS_DECOMPOSE_HPP
#define BSBO_DS_DECOMPOSE_HPP

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "bsbo/constraint_space.hpp"
#include "bsbo/detail/lru_cache.hpp"
#include "bsbo/objective.hpp"

namespace bsbo {

/// Memoizing set-function evaluator. Evaluation is deterministic and
/// thread-safe (the memo is lock-protected); the marginal gain is literally
/// the two-point difference.
class SetFunction {
public:
    using Evaluator = std::function<double(const ConstraintSet&)>;

    explicit SetFunction(Evaluator fn, std::size_t memo_capacity = 100000);

    double operator()(const ConstraintSet& s) const;

    /// Delta(j | s) = f(s + {j}) - f(s). Requires j not in s.
    double marginal_gain(const GroundSet& ground, int constraint, const ConstraintSet& s) const;

private:
    Evaluator fn_;
    struct Memo {
        std::mutex mu;
        detail::LruCache<ConstraintSet, double, ConstraintSetHash> cache;
        explicit Memo(std::size_t cap) : cache(cap) {}
    };
    std::shared_ptr<Memo> memo_;
};

/// F-hat = g - h with both components submodular (exactly, or up to the
/// documented beta diagnostics for the SA route).
struct DsDecomposition {
    enum class Construction { SubmodularAugmentation, DifferenceOfConvex };

    SetFunction h;
    SetFunction g;
    double alpha = 1.0;
    double beta_used = 0.0;        // coefficient actually baked into h and g
    double beta_prime_raw = 0.0;   // SA only: the polynomial-time bound
    std::optional<double> beta_exact;  // SA only, when the ground set is small enough to brute-force
    bool beta_fallback_used = false;   // SA only: beta_prime_raw was not a valid lower bound
    Construction construction = Construction::SubmodularAugmentation;
};

/// Lower bound beta' on the submodularity violation of F-hat, from sorted
/// reward prefix sums: beta' = -max_s [ ((1-1/(2s))^n - (1-1/s)^n) * r2(s) ].
/// The two coverage terms are ordered so the factor is non-negative (the
/// printed order yields a negative factor, contradicting the increment bound
/// it is derived from).
double evaluate_beta_prime(const ObjectiveContext& ctx);

/// Exact violation bound beta = min over j and chains S <= S' <= C\{j} of
/// Delta(j|S) - Delta(j|S'), brute-forced over all subsets. Only feasible
/// for small ground sets; throws ConfigError above max_constraints.
double brute_force_beta(const ObjectiveContext& ctx, int max_constraints = 12);

/// Submodular-augmentation decomposition: h1 = (|beta|/alpha) sqrt(|S|),
/// g1 = F-hat + h1, alpha the minimum curvature gap of sqrt over the
/// reachable cardinalities. For |C| <= 12 the exact beta is brute-forced
/// and used as a fallback whenever beta' fails to lower-bound it.
/// The returned evaluators reference ctx; it must outlive the decomposition.
DsDecomposition decompose_sa(const ObjectiveContext& ctx);

/// |min r''| over the real interval [1, |Q(C)|] for r(x) = (1-1/x)^n,
/// clamped at 0 when r is already convex there. Analytic for n <= 3, for
/// larger n an integer scan with local refinement, inflated 1% to stay an
/// upper bound.
double dc_curvature_bound(std::int64_t batch_size, std::uint64_t library_capacity);

/// Difference-of-convex decomposition with u(x) = x^2/2 (alpha = 1):
/// h2 = -(1 + beta u(|Q(S)|)) R(S), g2 = -(r(|Q(S)|) + beta u(|Q(S)|)) R(S),
/// where R is the library reward sum. Same ctx lifetime contract as
/// decompose_sa.
DsDecomposition decompose_dc(const ObjectiveContext& ctx);

/// Modular function: offset + sum of per-constraint weights.
struct ModularFunction {
    double offset = 0.0;
    std::vector<double> weights;

    double value(const GroundSet& ground, const ConstraintSet& s) const;
};

enum class BoundVariant { Grow, Shrink };

/// Tight modular upper bound on submodular h at X.
ModularFunction modular_upper_bound(const GroundSet& ground, const SetFunction& h,
                                    const ConstraintSet& x, BoundVariant variant);

/// Tight modular lower bound on submodular g at X along the given chain
/// order, which must be a permutation of C with the elements of X first.
ModularFunction modular_lower_bound(const GroundSet& ground, const SetFunction& g,
                                    const ConstraintSet& x, std::span<const int> order);

} // namespace bsbo

#endif // BSBO_DS_DECOMPOSE_HPP
