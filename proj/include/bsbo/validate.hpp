#ifndef BSBO_VALIDATE_HPP
#define BSBO_VALIDATE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bsbo/config.hpp"
#include "bsbo/ds_decompose.hpp"
#include "bsbo/rng.hpp"

namespace bsbo::validate {

/// Subset bitmask (over constraint indices) to per-site constraint set.
ConstraintSet set_from_mask(const GroundSet& ground, std::uint32_t mask);

/// Evaluates f over all 2^|C| subsets, indexed by bitmask.
std::vector<double> build_set_table(const GroundSet& ground,
                                    const std::function<double(const ConstraintSet&)>& fn);

struct ViolationCount {
    std::uint64_t violations = 0;
    double worst_excess = 0.0;  // largest residual beyond the tolerance scale
};

/// Diminishing-returns check over every (S, j, k): a violation is
/// Delta(j | S + k) > Delta(j | S) beyond rel_tol * max(1, |values|).
ViolationCount count_submodularity_violations(const std::vector<double>& table, int m,
                                              double rel_tol);
/// Increasing-returns check (the reverse inequality).
ViolationCount count_supermodularity_violations(const std::vector<double>& table, int m,
                                                double rel_tol);
ViolationCount count_monotonicity_violations(const std::vector<double>& table, int m,
                                             double rel_tol);

/// Random test instance: a small ground set with uniform rewards.
struct RandomInstance {
    GroundSet ground;
    RewardMatrix rewards;
    std::int64_t batch_size = 1;
};

RandomInstance make_random_instance(Rng& rng, int max_sites, int max_alphabet,
                                    std::int64_t batch_size);

struct CheckResult {
    std::string name;
    bool mandatory = true;
    std::uint64_t violations = 0;
    double worst_residual = 0.0;
    bool passed = true;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_mandatory_passed = true;
    /// Per-subset dump for the first instance:
    /// construction,mask,objective,h,g,residual rows.
    std::string dump_csv;
};

/// The brute-force property battery behind `validate-decomposition`: identity
/// sweeps, unconditional and claimed submodularity, the beta' diagnostic,
/// and modular bound dominance/tightness.
ValidationReport run_validation(const ValidateOptions& options);

std::string render_table(const ValidationReport& report);

} // namespace bsbo::validate

#endif // BSBO_VALIDATE_HPP
