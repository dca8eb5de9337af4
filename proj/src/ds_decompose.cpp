#include "bsbo/ds_decompose.hpp"

#include <algorithm>
#include <cmath>

#include "bsbo/errors.hpp"

namespace bsbo {

namespace {

// r(x) = (1 - 1/x)^n. Second derivative, stable at x = 1 for every n.
double coverage_complement_second_derivative(std::int64_t n, double x) {
    if (n == 1) return -2.0 / (x * x * x);
    if (n == 2) return 6.0 / (x * x * x * x) - 4.0 / (x * x * x);
    const double t = 1.0 - 1.0 / x;
    const double nd = static_cast<double>(n);
    return nd * std::pow(t, nd - 2.0) *
           ((nd - 1.0) / (x * x * x * x) - 2.0 * t / (x * x * x));
}

ConstraintSet set_from_mask(const GroundSet& ground, std::uint32_t mask) {
    ConstraintSet s = ground.empty_set();
    for (int j = 0; j < ground.total_constraints(); ++j)
        if ((mask >> j) & 1U) s.add(ground.site_of(j), ground.symbol_of(j));
    return s;
}

} // namespace

SetFunction::SetFunction(Evaluator fn, std::size_t memo_capacity)
    : fn_(std::move(fn)), memo_(std::make_shared<Memo>(memo_capacity)) {}

double SetFunction::operator()(const ConstraintSet& s) const {
    {
        std::lock_guard<std::mutex> lock(memo_->mu);
        if (auto hit = memo_->cache.get(s)) return *hit;
    }
    const double value = fn_(s);
    std::lock_guard<std::mutex> lock(memo_->mu);
    memo_->cache.put(s, value);
    return value;
}

double SetFunction::marginal_gain(const GroundSet& ground, int constraint,
                                  const ConstraintSet& s) const {
    ConstraintSet with = s;
    with.add(ground.site_of(constraint), ground.symbol_of(constraint));
    return (*this)(with) - (*this)(s);
}

double evaluate_beta_prime(const ObjectiveContext& ctx) {
    std::vector<double> sorted = ctx.rewards().rho;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto n = static_cast<double>(ctx.batch_size());
    double best = 0.0;
    double prefix = 0.0;
    for (std::size_t s = 1; s <= sorted.size(); ++s) {
        prefix += sorted[s - 1];
        const double sd = static_cast<double>(s);
        const double factor = std::pow(1.0 - 1.0 / (2.0 * sd), n) - std::pow(1.0 - 1.0 / sd, n);
        best = std::max(best, factor * prefix);
    }
    return -best;
}

double brute_force_beta(const ObjectiveContext& ctx, int max_constraints) {
    const GroundSet& ground = ctx.ground();
    const int m = ground.total_constraints();
    if (m > max_constraints)
        throw ConfigError("exact beta brute force is limited to " + std::to_string(max_constraints) +
                          " constraints, got " + std::to_string(m));

    const std::uint32_t count = 1U << m;
    std::vector<double> objective(count);
    for (std::uint32_t mask = 0; mask < count; ++mask)
        objective[mask] = ctx.surrogate(set_from_mask(ground, mask));

    double beta = std::numeric_limits<double>::infinity();
    std::vector<double> delta(count), subset_min(count);
    for (int j = 0; j < m; ++j) {
        const std::uint32_t bit_j = 1U << j;
        for (std::uint32_t mask = 0; mask < count; ++mask) {
            if (mask & bit_j) continue;
            delta[mask] = objective[mask | bit_j] - objective[mask];
            subset_min[mask] = delta[mask];
        }
        // Subset-min DP: subset_min[mask] = min over S <= mask of delta[S].
        for (int b = 0; b < m; ++b) {
            if (b == j) continue;
            const std::uint32_t bit_b = 1U << b;
            for (std::uint32_t mask = 0; mask < count; ++mask) {
                if ((mask & bit_j) || !(mask & bit_b)) continue;
                subset_min[mask] = std::min(subset_min[mask], subset_min[mask ^ bit_b]);
            }
        }
        for (std::uint32_t mask = 0; mask < count; ++mask) {
            if (mask & bit_j) continue;
            beta = std::min(beta, subset_min[mask] - delta[mask]);
        }
    }
    return beta;
}

DsDecomposition decompose_sa(const ObjectiveContext& ctx) {
    const int m = ctx.ground().total_constraints();

    // Minimum curvature gap of p(S) = sqrt(|S|) over the actual domain,
    // i.e. over all consecutive cardinality pairs reachable under chains
    // S <= S' <= C \ {j}. Including s = 0 matters only for |C| = 2, where
    // it is the binding pair.
    double alpha = 1.0;
    if (m >= 2) {
        alpha = std::numeric_limits<double>::infinity();
        for (int s = 0; s <= m - 2; ++s)
            alpha = std::min(alpha, 2.0 * std::sqrt(s + 1.0) - std::sqrt(static_cast<double>(s)) -
                                        std::sqrt(s + 2.0));
    }

    const double beta_prime = evaluate_beta_prime(ctx);
    std::optional<double> beta_exact;
    double beta_used = beta_prime;
    bool fallback = false;
    if (m <= 12) {
        beta_exact = brute_force_beta(ctx);
        if (beta_prime > *beta_exact + 1e-12 * std::max(1.0, std::abs(*beta_exact))) {
            beta_used = *beta_exact;
            fallback = true;
        }
    }

    const double coeff = std::abs(beta_used) / alpha;
    const ObjectiveContext* context = &ctx;
    SetFunction h([coeff](const ConstraintSet& s) { return coeff * std::sqrt(static_cast<double>(s.total())); });
    SetFunction g([coeff, context](const ConstraintSet& s) {
        return context->surrogate(s) + coeff * std::sqrt(static_cast<double>(s.total()));
    });

    DsDecomposition ds{std::move(h), std::move(g), 1.0, 0.0, 0.0, std::nullopt, false,
                       DsDecomposition::Construction::SubmodularAugmentation};
    ds.alpha = alpha;
    ds.beta_used = beta_used;
    ds.beta_prime_raw = beta_prime;
    ds.beta_exact = beta_exact;
    ds.beta_fallback_used = fallback;
    ds.construction = DsDecomposition::Construction::SubmodularAugmentation;
    return ds;
}

double dc_curvature_bound(std::int64_t batch_size, std::uint64_t library_capacity) {
    const double hi = static_cast<double>(std::max<std::uint64_t>(library_capacity, 1));
    auto r2 = [batch_size](double x) { return coverage_complement_second_derivative(batch_size, x); };

    double minimum;
    if (batch_size == 1) {
        minimum = r2(1.0);
    } else if (batch_size <= 3) {
        std::vector<double> candidates{1.0, hi};
        if (batch_size == 2) {
            if (2.0 <= hi) candidates.push_back(2.0);
        } else {
            // Roots of 3x^2 - 12x + 10, the critical points of r'' for n = 3.
            const double root = std::sqrt(6.0) / 3.0;
            for (double x : {2.0 - root, 2.0 + root})
                if (x >= 1.0 && x <= hi) candidates.push_back(x);
        }
        minimum = std::numeric_limits<double>::infinity();
        for (double x : candidates) minimum = std::min(minimum, r2(x));
        return std::max(0.0, -minimum);
    } else {
        // Integer scan over the region containing the interior minimum, then
        // a 1e-2 refinement around the scan argmin.
        const double scan_hi = std::min(hi, std::max(1000.0, 50.0 * static_cast<double>(batch_size)));
        minimum = r2(hi);
        double argmin = hi;
        for (double x = 1.0; x <= scan_hi; x += 1.0) {
            const double v = r2(x);
            if (v < minimum) {
                minimum = v;
                argmin = x;
            }
        }
        for (double x = std::max(1.0, argmin - 1.0); x <= std::min(hi, argmin + 1.0); x += 1e-2)
            minimum = std::min(minimum, r2(x));
        return 1.01 * std::max(0.0, -minimum);
    }
    return std::max(0.0, -minimum);
}

DsDecomposition decompose_dc(const ObjectiveContext& ctx) {
    const double beta = dc_curvature_bound(ctx.batch_size(), ctx.ground().library_capacity());
    const std::int64_t n = ctx.batch_size();
    const ObjectiveContext* context = &ctx;

    SetFunction h([beta, context](const ConstraintSet& s) {
        const std::uint64_t q = library_size(context->ground(), s);
        if (q == 0) return 0.0;
        const double qd = static_cast<double>(q);
        return -(1.0 + beta * 0.5 * qd * qd) * context->reward_sum(s);
    });
    SetFunction g([beta, n, context](const ConstraintSet& s) {
        const std::uint64_t q = library_size(context->ground(), s);
        if (q == 0) return 0.0;
        const double qd = static_cast<double>(q);
        const double r = std::pow(1.0 - 1.0 / qd, static_cast<double>(n));
        return -(r + beta * 0.5 * qd * qd) * context->reward_sum(s);
    });

    DsDecomposition ds{std::move(h), std::move(g), 1.0, 0.0, 0.0, std::nullopt, false,
                       DsDecomposition::Construction::SubmodularAugmentation};
    ds.alpha = 1.0;
    ds.beta_used = beta;
    ds.construction = DsDecomposition::Construction::DifferenceOfConvex;
    return ds;
}

double ModularFunction::value(const GroundSet& ground, const ConstraintSet& s) const {
    double total = offset;
    for (int site = 0; site < ground.num_sites(); ++site) {
        SiteMask mask = s.masks[static_cast<std::size_t>(site)];
        while (mask != 0) {
            const int symbol = std::countr_zero(mask);
            total += weights[static_cast<std::size_t>(ground.constraint_index(site, symbol))];
            mask &= mask - 1;
        }
    }
    return total;
}

ModularFunction modular_upper_bound(const GroundSet& ground, const SetFunction& h,
                                    const ConstraintSet& x, BoundVariant variant) {
    const int m = ground.total_constraints();
    ModularFunction bound;
    bound.weights.assign(static_cast<std::size_t>(m), 0.0);

    const double h_at_x = h(x);
    double member_sum = 0.0;
    const ConstraintSet full = ground.full_set();
    const ConstraintSet empty = ground.empty_set();
    for (int j = 0; j < m; ++j) {
        const int site = ground.site_of(j);
        const int symbol = ground.symbol_of(j);
        double w;
        if (x.contains(site, symbol)) {
            if (variant == BoundVariant::Grow) {
                ConstraintSet without = x;
                without.remove(site, symbol);
                w = h_at_x - h(without);
            } else {
                ConstraintSet almost_full = full;
                almost_full.remove(site, symbol);
                w = h(full) - h(almost_full);
            }
            member_sum += w;
        } else {
            w = (variant == BoundVariant::Grow) ? h.marginal_gain(ground, j, empty)
                                                : h.marginal_gain(ground, j, x);
        }
        bound.weights[static_cast<std::size_t>(j)] = w;
    }
    bound.offset = h_at_x - member_sum;
    return bound;
}

ModularFunction modular_lower_bound(const GroundSet& ground, const SetFunction& g,
                                    const ConstraintSet& x, std::span<const int> order) {
    const int m = ground.total_constraints();
    if (static_cast<int>(order.size()) != m)
        throw ConfigError("chain order must be a permutation of all constraints");
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    for (int j : order) {
        if (j < 0 || j >= m || seen[static_cast<std::size_t>(j)])
            throw ConfigError("chain order is not a permutation");
        seen[static_cast<std::size_t>(j)] = true;
    }
    const int x_size = x.total();
    for (int i = 0; i < x_size; ++i) {
        const int j = order[static_cast<std::size_t>(i)];
        if (!x.contains(ground.site_of(j), ground.symbol_of(j)))
            throw ConfigError("the elements of X must form a prefix of the chain order");
    }

    ModularFunction bound;
    bound.weights.assign(static_cast<std::size_t>(m), 0.0);
    ConstraintSet chain = ground.empty_set();
    double previous = g(chain);
    bound.offset = previous;
    for (int j : order) {
        chain.add(ground.site_of(j), ground.symbol_of(j));
        const double current = g(chain);
        bound.weights[static_cast<std::size_t>(j)] = current - previous;
        previous = current;
    }
    return bound;
}

} // namespace bsbo
