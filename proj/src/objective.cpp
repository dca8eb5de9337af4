#include "bsbo/objective.hpp"

#include <algorithm>
#include <cmath>

#include "bsbo/errors.hpp"
#include "bsbo/rng.hpp"

namespace bsbo {

ObjectiveContext::ObjectiveContext(GroundSet ground, RewardMatrix rewards, std::int64_t batch_size)
    : ground_(std::move(ground)), rewards_(std::move(rewards)), batch_size_(batch_size) {
    if (batch_size_ < 1) throw ConfigError("batch size must be >= 1");
    if (rewards_.rho.size() != ground_.library_capacity())
        throw ConfigError("reward matrix size does not match the ground set library");

    masses_.assign(static_cast<std::size_t>(ground_.total_constraints()), 0.0);
    for (std::uint64_t index = 0; index < rewards_.rho.size(); ++index) {
        const double rho = rewards_.rho[index];
        total_reward_ += rho;
        if (rho > rewards_.rho[best_item_]) best_item_ = index;
        const Item item = ground_.item_at(index);
        for (int site = 0; site < ground_.num_sites(); ++site)
            masses_[static_cast<std::size_t>(
                ground_.constraint_index(site, item.symbols[static_cast<std::size_t>(site)]))] += rho;
    }
}

double ObjectiveContext::reward_sum(const ConstraintSet& s) const {
    double sum = 0.0;
    for_each_library_index(ground_, s, [&](std::uint64_t index) { sum += rewards_.rho[index]; });
    return sum;
}

double ObjectiveContext::slice_sum(const ConstraintSet& s, int site, int symbol) const {
    ConstraintSet slice = s;
    slice.masks[static_cast<std::size_t>(site)] = SiteMask{1} << symbol;
    return reward_sum(slice);
}

double ObjectiveContext::coverage(std::uint64_t q) const {
    if (q == 0) return 0.0;
    return 1.0 - std::pow(1.0 - 1.0 / static_cast<double>(q), static_cast<double>(batch_size_));
}

double ObjectiveContext::surrogate_from(double reward_total, std::uint64_t q) const {
    if (q == 0) return 0.0;
    return reward_total * coverage(q);
}

double ObjectiveContext::surrogate(const ConstraintSet& s) const {
    const std::uint64_t q = library_size(ground_, s);
    if (q == 0) return 0.0;
    return surrogate_from(reward_sum(s), q);
}

double surrogate_objective(const ConstraintSet& s, const ObjectiveContext& ctx) {
    return ctx.surrogate(s);
}

SurrogateEvaluator::SurrogateEvaluator(const ObjectiveContext& ctx, ConstraintSet start)
    : ctx_(&ctx), current_(std::move(start)) {
    reward_total_ = ctx_->reward_sum(current_);
    value_ = ctx_->surrogate_from(reward_total_, library_size(ctx_->ground(), current_));
    evals_ = 1;
}

double SurrogateEvaluator::value_if_toggled(int constraint) const {
    ++evals_;
    const GroundSet& ground = ctx_->ground();
    const int site = ground.site_of(constraint);
    const int symbol = ground.symbol_of(constraint);
    const bool removing = current_.contains(site, symbol);

    std::uint64_t q_new = 1;
    for (int k = 0; k < ground.num_sites(); ++k) {
        std::uint64_t width = static_cast<std::uint64_t>(current_.count(k));
        if (k == site) width += removing ? -1 : +1;
        if (width == 0) return 0.0;
        q_new *= width;
    }
    const double slice = ctx_->slice_sum(current_, site, symbol);
    const double total_new = removing ? reward_total_ - slice : reward_total_ + slice;
    return ctx_->surrogate_from(total_new, q_new);
}

void SurrogateEvaluator::apply_toggle(int constraint) {
    const GroundSet& ground = ctx_->ground();
    current_.toggle(ground.site_of(constraint), ground.symbol_of(constraint));
    reward_total_ = ctx_->reward_sum(current_);
    value_ = ctx_->surrogate_from(reward_total_, library_size(ground, current_));
    ++evals_;
}

McEstimate mc_objective(const ConstraintSet& s, const GpPosterior& posterior, double tau,
                        std::int64_t batch_size, std::int64_t replicates, std::uint64_t seed,
                        const McOptions& options) {
    const GroundSet& ground = posterior.ground();
    const std::uint64_t q = library_size(ground, s);
    if (q == 0) throw ConfigError("Monte Carlo objective needs a non-empty library");
    if (q > options.size_cap)
        throw ConfigError("library size " + std::to_string(q) + " exceeds the MC size cap " +
                          std::to_string(options.size_cap) + "; shrink S or raise the cap");
    if (replicates < 1) throw ConfigError("Monte Carlo needs at least one replicate");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");

    std::vector<Item> items = enumerate_library(ground, s);
    const auto m = static_cast<Eigen::Index>(items.size());

    Eigen::VectorXd mean;
    Eigen::VectorXd sd;         // diagonal mode
    Eigen::MatrixXd chol_lower; // full-covariance mode
    if (options.diagonal_only) {
        mean.resize(m);
        sd.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Item& item = items[static_cast<std::size_t>(i)];
            mean(i) = posterior.mean_at(item);
            sd(i) = std::sqrt(posterior.variance_at(item));
        }
    } else {
        Eigen::MatrixXd cov;
        posterior.joint(items, mean, cov);
        const double mean_diag = std::max(cov.trace() / static_cast<double>(m), 1e-300);
        double jitter = 1e-12 * mean_diag;
        while (true) {
            Eigen::MatrixXd jittered = cov;
            jittered.diagonal().array() += jitter;
            Eigen::LLT<Eigen::MatrixXd> llt(jittered);
            if (llt.info() == Eigen::Success) {
                chol_lower = llt.matrixL();
                break;
            }
            if (jitter >= 1e-4 * mean_diag)
                throw NumericError("posterior covariance over Q(S) is not positive definite");
            jitter *= 10.0;
        }
    }

    double sum = 0.0;
    double sum_sq = 0.0;
    Eigen::VectorXd z(m);
    Eigen::VectorXd utilities(m);
    std::vector<std::uint8_t> drawn(static_cast<std::size_t>(m));
    for (std::int64_t rep = 0; rep < replicates; ++rep) {
        Rng rng(derive_seed(seed, "mc-replicate", static_cast<std::uint64_t>(rep)));
        for (Eigen::Index i = 0; i < m; ++i) z(i) = rng.gaussian();
        if (options.diagonal_only)
            utilities = mean + sd.cwiseProduct(z);
        else
            utilities = mean + chol_lower.triangularView<Eigen::Lower>() * z;

        double count = 0.0;
        std::fill(drawn.begin(), drawn.end(), 0);
        for (std::int64_t draw = 0; draw < batch_size; ++draw) {
            const std::uint64_t pick = rng.bounded(q);
            if (options.count_duplicates) {
                if (utilities(static_cast<Eigen::Index>(pick)) > tau) count += 1.0;
            } else if (!drawn[pick]) {
                drawn[pick] = 1;
                if (utilities(static_cast<Eigen::Index>(pick)) > tau) count += 1.0;
            }
        }
        sum += count;
        sum_sq += count * count;
    }

    McEstimate est;
    est.replicates = replicates;
    est.seed = seed;
    est.mean = sum / static_cast<double>(replicates);
    if (replicates > 1) {
        const double var =
            std::max(0.0, (sum_sq - sum * sum / static_cast<double>(replicates)) /
                              static_cast<double>(replicates - 1));
        est.stderr_ = std::sqrt(var / static_cast<double>(replicates));
    }
    return est;
}

double update_threshold(std::span<const double> observed_values) {
    if (observed_values.empty())
        throw ConfigError("threshold update needs at least one observed value");
    return *std::max_element(observed_values.begin(), observed_values.end());
}

double simple_regret(double best_found, double global_best) { return global_best - best_found; }

} // namespace bsbo
