#include "bsbo/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsbo/errors.hpp"
#include "json_util.hpp"

namespace bsbo::validate {

namespace {

constexpr double kRelTol = 1e-9;

double scale(double a, double b) { return std::max({1.0, std::abs(a), std::abs(b)}); }

void merge(CheckResult& into, const ViolationCount& count) {
    into.violations += count.violations;
    into.worst_residual = std::max(into.worst_residual, count.worst_excess);
}

} // namespace

ConstraintSet set_from_mask(const GroundSet& ground, std::uint32_t mask) {
    ConstraintSet s = ground.empty_set();
    for (int j = 0; j < ground.total_constraints(); ++j)
        if ((mask >> j) & 1U) s.add(ground.site_of(j), ground.symbol_of(j));
    return s;
}

std::vector<double> build_set_table(const GroundSet& ground,
                                    const std::function<double(const ConstraintSet&)>& fn) {
    const int m = ground.total_constraints();
    if (m > 24) throw ConfigError("set table brute force is limited to 24 constraints");
    std::vector<double> table(std::size_t{1} << m);
    for (std::uint32_t mask = 0; mask < table.size(); ++mask)
        table[mask] = fn(set_from_mask(ground, mask));
    return table;
}

ViolationCount count_submodularity_violations(const std::vector<double>& table, int m,
                                              double rel_tol) {
    ViolationCount result;
    const auto count = static_cast<std::uint32_t>(table.size());
    for (std::uint32_t mask = 0; mask < count; ++mask) {
        for (int j = 0; j < m; ++j) {
            const std::uint32_t bit_j = 1U << j;
            if (mask & bit_j) continue;
            const double gain_small = table[mask | bit_j] - table[mask];
            for (int k = 0; k < m; ++k) {
                if (k == j) continue;
                const std::uint32_t bit_k = 1U << k;
                if (mask & bit_k) continue;
                const double gain_large = table[mask | bit_k | bit_j] - table[mask | bit_k];
                const double excess = gain_large - gain_small;
                if (excess > rel_tol * scale(gain_small, gain_large)) {
                    ++result.violations;
                    result.worst_excess = std::max(result.worst_excess, excess);
                }
            }
        }
    }
    return result;
}

ViolationCount count_supermodularity_violations(const std::vector<double>& table, int m,
                                                double rel_tol) {
    std::vector<double> negated(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) negated[i] = -table[i];
    return count_submodularity_violations(negated, m, rel_tol);
}

ViolationCount count_monotonicity_violations(const std::vector<double>& table, int m,
                                             double rel_tol) {
    ViolationCount result;
    const auto count = static_cast<std::uint32_t>(table.size());
    for (std::uint32_t mask = 0; mask < count; ++mask) {
        for (int j = 0; j < m; ++j) {
            const std::uint32_t bit_j = 1U << j;
            if (mask & bit_j) continue;
            const double drop = table[mask] - table[mask | bit_j];
            if (drop > rel_tol * scale(table[mask], table[mask | bit_j])) {
                ++result.violations;
                result.worst_excess = std::max(result.worst_excess, drop);
            }
        }
    }
    return result;
}

RandomInstance make_random_instance(Rng& rng, int max_sites, int max_alphabet,
                                    std::int64_t batch_size) {
    const int sites = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_sites)));
    std::vector<std::string> alphabets;
    alphabets.reserve(static_cast<std::size_t>(sites));
    for (int site = 0; site < sites; ++site) {
        const int width = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_alphabet)));
        alphabets.push_back(std::string("ABCDEFGH").substr(0, static_cast<std::size_t>(width)));
    }
    RandomInstance instance{GroundSet(std::move(alphabets)), {}, batch_size};
    instance.rewards.tau = 0.0;
    instance.rewards.rho.resize(instance.ground.library_capacity());
    for (double& rho : instance.rewards.rho) rho = rng.uniform();
    return instance;
}

ValidationReport run_validation(const ValidateOptions& options) {
    ValidationReport report;
    CheckResult identity_sa{"identity-sa", true};
    CheckResult identity_dc{"identity-dc", true};
    CheckResult h1_submodular{"h1-submodular", true};
    CheckResult reward_sum_supermodular{"reward-sum-supermodular", true};
    CheckResult reward_sum_monotone{"reward-sum-monotone", true};
    CheckResult g1_submodular{"g1-submodular-with-fallback", true};
    CheckResult h2_submodular{"h2-submodular", true};
    CheckResult g2_submodular{"g2-submodular", true};
    CheckResult beta_diag{"beta-prime-lower-bounds-beta-exact", false};
    CheckResult ub_bounds{"modular-upper-bound-dominates", true};
    CheckResult lb_bounds{"modular-lower-bound-dominated", true};

    std::ostringstream dump;
    dump << "construction,mask,objective,h,g,residual,h_violations,g_violations\n";

    // Diminishing-returns violations anchored at one subset: pairs (j, k)
    // outside the subset with Delta(j | S + k) > Delta(j | S).
    const auto violations_at = [](const std::vector<double>& table, int m, std::uint32_t mask) {
        std::uint64_t count = 0;
        for (int j = 0; j < m; ++j) {
            const std::uint32_t bit_j = 1U << j;
            if (mask & bit_j) continue;
            const double gain_small = table[mask | bit_j] - table[mask];
            for (int k = 0; k < m; ++k) {
                const std::uint32_t bit_k = 1U << k;
                if (k == j || (mask & bit_k)) continue;
                const double gain_large = table[mask | bit_k | bit_j] - table[mask | bit_k];
                if (gain_large - gain_small > kRelTol * scale(gain_small, gain_large)) ++count;
            }
        }
        return count;
    };

    const std::int64_t batch_sizes[] = {1, 2, 5, 20, 50};
    Rng rng(derive_seed(options.seed, "validate"));
    for (int inst = 0; inst < options.random_instances; ++inst) {
        const std::int64_t n = batch_sizes[static_cast<std::size_t>(inst) % 5];
        // Keep |C| <= 8 so exhaustive sweeps stay cheap.
        RandomInstance instance = make_random_instance(rng, 3, 2 + inst % 2, n);
        const GroundSet& ground = instance.ground;
        const int m = ground.total_constraints();
        const ObjectiveContext ctx(ground, instance.rewards, n);

        const double fault = options.inject_fault;
        DsDecomposition sa = decompose_sa(ctx);
        DsDecomposition dc = decompose_dc(ctx);

        const auto objective = build_set_table(ground, [&](const ConstraintSet& s) { return ctx.surrogate(s); });
        auto check_identity = [&](const DsDecomposition& ds, CheckResult& check, const char* tag) {
            const auto h_table = build_set_table(ground, [&](const ConstraintSet& s) { return ds.h(s); });
            const auto g_table = build_set_table(
                ground, [&](const ConstraintSet& s) { return ds.g(s) + fault * (s.total() % 2); });
            for (std::uint32_t mask = 0; mask < objective.size(); ++mask) {
                const double residual = g_table[mask] - h_table[mask] - objective[mask];
                const double tol = kRelTol * std::max(1.0, std::abs(objective[mask]));
                if (std::abs(residual) > tol) {
                    ++check.violations;
                    check.worst_residual = std::max(check.worst_residual, std::abs(residual));
                }
                if (inst == 0)
                    dump << tag << ',' << mask << ',' << detail::format_double(objective[mask]) << ','
                         << detail::format_double(h_table[mask]) << ','
                         << detail::format_double(g_table[mask]) << ','
                         << detail::format_double(residual) << ','
                         << violations_at(h_table, m, mask) << ','
                         << violations_at(g_table, m, mask) << '\n';
            }
            return std::pair{h_table, g_table};
        };
        const auto [h1_table, g1_table] = check_identity(sa, identity_sa, "sa");
        const auto [h2_table, g2_table] = check_identity(dc, identity_dc, "dc");

        merge(h1_submodular, count_submodularity_violations(h1_table, m, kRelTol));
        merge(g1_submodular, count_submodularity_violations(g1_table, m, kRelTol));
        merge(h2_submodular, count_submodularity_violations(h2_table, m, kRelTol));
        merge(g2_submodular, count_submodularity_violations(g2_table, m, kRelTol));

        const auto reward_table =
            build_set_table(ground, [&](const ConstraintSet& s) { return ctx.reward_sum(s); });
        merge(reward_sum_supermodular, count_supermodularity_violations(reward_table, m, kRelTol));
        merge(reward_sum_monotone, count_monotonicity_violations(reward_table, m, kRelTol));

        if (sa.beta_fallback_used) {
            ++beta_diag.violations;
            if (sa.beta_exact)
                beta_diag.worst_residual =
                    std::max(beta_diag.worst_residual, sa.beta_prime_raw - *sa.beta_exact);
        }

        // Modular bound dominance and tightness at a handful of anchors.
        std::vector<ConstraintSet> anchors{ground.empty_set(), ground.full_set()};
        for (int extra = 0; extra < 4; ++extra)
            anchors.push_back(set_from_mask(
                ground, static_cast<std::uint32_t>(rng.bounded(std::uint64_t{1} << m))));
        for (const ConstraintSet& x : anchors) {
            for (const BoundVariant variant : {BoundVariant::Grow, BoundVariant::Shrink}) {
                const ModularFunction ub = modular_upper_bound(ground, dc.h, x, variant);
                const auto ub_table = build_set_table(
                    ground, [&](const ConstraintSet& s) { return ub.value(ground, s); });
                for (std::uint32_t mask = 0; mask < h2_table.size(); ++mask) {
                    const double gap = h2_table[mask] - ub_table[mask];
                    const double tol = kRelTol * std::max(1.0, std::abs(h2_table[mask]));
                    if (gap > tol) {
                        ++ub_bounds.violations;
                        ub_bounds.worst_residual = std::max(ub_bounds.worst_residual, gap);
                    }
                }
                const std::uint32_t x_mask = [&] {
                    std::uint32_t mask = 0;
                    for (int j = 0; j < m; ++j)
                        if (x.contains(ground.site_of(j), ground.symbol_of(j))) mask |= 1U << j;
                    return mask;
                }();
                const double at_x = std::abs(ub_table[x_mask] - h2_table[x_mask]);
                if (at_x > 1e-9 * std::max(1.0, std::abs(h2_table[x_mask]))) {
                    ++ub_bounds.violations;
                    ub_bounds.worst_residual = std::max(ub_bounds.worst_residual, at_x);
                }
            }
            {
                std::vector<int> order;
                for (int j = 0; j < m; ++j)
                    if (x.contains(ground.site_of(j), ground.symbol_of(j))) order.push_back(j);
                for (int j = 0; j < m; ++j)
                    if (!x.contains(ground.site_of(j), ground.symbol_of(j))) order.push_back(j);
                const ModularFunction lb = modular_lower_bound(ground, dc.g, x, order);
                const auto lb_table = build_set_table(
                    ground, [&](const ConstraintSet& s) { return lb.value(ground, s); });
                for (std::uint32_t mask = 0; mask < g2_table.size(); ++mask) {
                    const double gap = lb_table[mask] - g2_table[mask];
                    const double tol = kRelTol * std::max(1.0, std::abs(g2_table[mask]));
                    if (gap > tol) {
                        ++lb_bounds.violations;
                        lb_bounds.worst_residual = std::max(lb_bounds.worst_residual, gap);
                    }
                }
            }
        }
    }

    for (CheckResult* check :
         {&identity_sa, &identity_dc, &h1_submodular, &reward_sum_supermodular, &reward_sum_monotone,
          &g1_submodular, &h2_submodular, &g2_submodular, &beta_diag, &ub_bounds, &lb_bounds}) {
        check->passed = !check->mandatory || check->violations == 0;
        if (check->mandatory && !check->passed) report.all_mandatory_passed = false;
        report.checks.push_back(*check);
    }
    report.dump_csv = dump.str();
    return report;
}

std::string render_table(const ValidationReport& report) {
    std::ostringstream out;
    for (const CheckResult& check : report.checks) {
        const char* tag = !check.mandatory ? "[INFO] " : check.passed ? "[PASS] " : "[FAIL] ";
        out << tag << check.name << (check.mandatory ? "" : " (diagnostic)")
            << ": violations=" << check.violations;
        if (check.violations > 0)
            out << " worst=" << detail::format_double(check.worst_residual);
        out << '\n';
    }
    out << (report.all_mandatory_passed ? "all mandatory checks passed\n"
                                        : "mandatory check failure\n");
    return out.str();
}

} // namespace bsbo::validate
