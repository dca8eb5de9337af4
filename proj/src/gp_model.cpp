#include "bsbo/gp_model.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bsbo/errors.hpp"

namespace bsbo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;
constexpr double kLog2Pi = 1.8378770664093453;

// Builds the noisy Gram matrix for a set of items given their pairwise
// squared distances.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& sqdist, const GpHyperparameters& hyper) {
    const auto n = sqdist.rows();
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double k = kernel_value(hyper, sqdist(i, j));
            gram(i, j) = k;
            gram(j, i) = k;
        }
        gram(i, i) += hyper.noise_variance;
    }
    return gram;
}

Eigen::MatrixXd pairwise_sqdist(std::span<const Observation> observations) {
    const auto n = static_cast<Eigen::Index>(observations.size());
    Eigen::MatrixXd sqdist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sqdist(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d2 = squared_distance(observations[static_cast<std::size_t>(i)].item,
                                               observations[static_cast<std::size_t>(j)].item);
            sqdist(i, j) = d2;
            sqdist(j, i) = d2;
        }
    }
    return sqdist;
}

struct CholeskyResult {
    Eigen::MatrixXd lower;
    double jitter = 0.0;
};

// LLT with escalating relative jitter. The floor is 1e-10 of the mean
// diagonal, escalated x10 up to 1e-4 of the mean diagonal before failing.
CholeskyResult robust_cholesky(const Eigen::MatrixXd& gram) {
    const auto n = gram.rows();
    const double mean_diag = std::max(gram.trace() / static_cast<double>(n), 1e-300);
    double jitter = 1e-10 * mean_diag;
    const double cap = 1e-4 * mean_diag;
    while (true) {
        Eigen::MatrixXd jittered = gram;
        jittered.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(jittered);
        if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
        if (jitter >= cap)
            throw NumericError("Gram matrix is not positive definite after jitter escalation to " +
                               std::to_string(jitter));
        jitter *= 10.0;
    }
}

double lml_from_cholesky(const Eigen::MatrixXd& lower, const Eigen::VectorXd& y_centered,
                         const Eigen::VectorXd& alpha) {
    const auto n = y_centered.size();
    double log_det_half = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_det_half += std::log(lower(i, i));
    return -0.5 * y_centered.dot(alpha) - log_det_half - 0.5 * static_cast<double>(n) * kLog2Pi;
}

} // namespace

double kernel_value(const GpHyperparameters& hyper, double squared_dist) {
    const double d = std::sqrt(std::max(squared_dist, 0.0));
    const double l = hyper.lengthscale;
    switch (hyper.kernel) {
        case KernelFamily::Matern12:
            return hyper.signal_variance * std::exp(-d / l);
        case KernelFamily::Matern32: {
            const double t = kSqrt3 * d / l;
            return hyper.signal_variance * (1.0 + t) * std::exp(-t);
        }
        case KernelFamily::Matern52: {
            const double t = kSqrt5 * d / l;
            return hyper.signal_variance * (1.0 + t + t * t / 3.0) * std::exp(-t);
        }
        case KernelFamily::SquaredExponential:
            return hyper.signal_variance * std::exp(-0.5 * squared_dist / (l * l));
    }
    return 0.0;
}

double squared_distance(const Item& a, const Item& b) {
    int differing = 0;
    for (std::size_t site = 0; site < a.symbols.size(); ++site)
        differing += (a.symbols[site] != b.symbols[site]) ? 1 : 0;
    return 2.0 * differing;
}

Eigen::VectorXd encode_item(const Item& item, const GroundSet& ground) {
    Eigen::VectorXd features = Eigen::VectorXd::Zero(ground.total_constraints());
    for (int site = 0; site < ground.num_sites(); ++site) {
        const int symbol = item.symbols[static_cast<std::size_t>(site)];
        if (symbol < 0 || symbol >= static_cast<int>(ground.alphabet(site).size()))
            throw DataError("item symbol index " + std::to_string(symbol) +
                            " out of range at site " + std::to_string(site));
        features(ground.constraint_index(site, symbol)) = 1.0;
    }
    return features;
}

double improvement_probability(double mean, double variance, double tau) {
    if (variance <= 0.0) return mean > tau ? 1.0 : 0.0;
    const double z = (tau - mean) / std::sqrt(variance);
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

GpPosterior GpPosterior::fit(const GroundSet& ground, std::span<const Observation> observations,
                             const GpHyperparameters& hyper) {
    if (hyper.signal_variance <= 0.0 || hyper.lengthscale <= 0.0)
        throw ConfigError("GP scale hyperparameters must be strictly positive");
    if (hyper.noise_variance < 0.0) throw ConfigError("GP noise variance must be non-negative");

    GpPosterior post;
    post.ground_ = ground;
    post.hyper_ = hyper;
    post.items_.reserve(observations.size());
    for (const Observation& obs : observations) {
        if (!std::isfinite(obs.value)) throw DataError("non-finite observation value");
        post.items_.push_back(obs.item);
    }

    const auto n = static_cast<Eigen::Index>(observations.size());
    double mu0 = hyper.prior_mean;
    if (hyper.mean_from_data && n > 0) {
        double sum = 0.0;
        for (const Observation& obs : observations) sum += obs.value;
        mu0 = sum / static_cast<double>(n);
    }
    post.prior_mean_ = mu0;

    if (n == 0) return post;  // posterior = prior

    post.y_centered_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        post.y_centered_(i) = observations[static_cast<std::size_t>(i)].value - mu0;

    const Eigen::MatrixXd gram = gram_matrix(pairwise_sqdist(observations), hyper);
    auto [lower, jitter] = robust_cholesky(gram);
    post.jitter_ = jitter;
    post.alpha_ = lower.transpose().triangularView<Eigen::Upper>().solve(
        lower.triangularView<Eigen::Lower>().solve(post.y_centered_));
    for (Eigen::Index i = 0; i < n; ++i) post.log_det_half_ += std::log(lower(i, i));
    post.chol_lower_ = std::move(lower);
    return post;
}

Eigen::VectorXd GpPosterior::cross_covariance(const Item& item) const {
    const auto n = static_cast<Eigen::Index>(items_.size());
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i)
        k(i) = kernel_value(hyper_, squared_distance(items_[static_cast<std::size_t>(i)], item));
    return k;
}

double GpPosterior::mean_at(const Item& item) const {
    if (items_.empty()) return prior_mean_;
    return prior_mean_ + cross_covariance(item).dot(alpha_);
}

double GpPosterior::variance_at(const Item& item) const {
    const double prior_var = kernel_value(hyper_, 0.0);
    if (items_.empty()) return prior_var;
    const Eigen::VectorXd k = cross_covariance(item);
    const Eigen::VectorXd v = chol_lower_.triangularView<Eigen::Lower>().solve(k);
    return std::max(0.0, prior_var - v.squaredNorm());
}

void GpPosterior::joint(std::span<const Item> query, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) const {
    const auto m = static_cast<Eigen::Index>(query.size());
    mean.resize(m);
    cov.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double k = kernel_value(
                hyper_, squared_distance(query[static_cast<std::size_t>(i)], query[static_cast<std::size_t>(j)]));
            cov(i, j) = k;
            cov(j, i) = k;
        }
    }
    if (items_.empty()) {
        mean.setConstant(prior_mean_);
        return;
    }
    const auto n = static_cast<Eigen::Index>(items_.size());
    Eigen::MatrixXd cross(n, m);
    for (Eigen::Index j = 0; j < m; ++j) cross.col(j) = cross_covariance(query[static_cast<std::size_t>(j)]);
    mean = (cross.transpose() * alpha_).array() + prior_mean_;
    const Eigen::MatrixXd v = chol_lower_.triangularView<Eigen::Lower>().solve(cross);
    cov.noalias() -= v.transpose() * v;
}

double GpPosterior::log_marginal_likelihood() const {
    if (items_.empty()) return 0.0;
    return -0.5 * y_centered_.dot(alpha_) - log_det_half_ -
           0.5 * static_cast<double>(items_.size()) * kLog2Pi;
}

RewardMatrix compute_rewards(const GpPosterior& posterior, const GroundSet& ground, double tau,
                             int threads) {
    if (!std::isfinite(tau)) throw ConfigError("reward threshold must be finite");
    const std::uint64_t total = ground.library_capacity();
    if (total > 10'000'000)
        throw ConfigError("library capacity " + std::to_string(total) +
                          " exceeds the dense reward matrix limit");
    RewardMatrix rewards;
    rewards.tau = tau;
    rewards.rho.resize(total);

    auto worker = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t index = begin; index < end; ++index) {
            const Item item = ground.item_at(index);
            rewards.rho[index] =
                improvement_probability(posterior.mean_at(item), posterior.variance_at(item), tau);
        }
    };

    const int usable = std::max(1, threads);
    if (usable == 1 || total < 1024) {
        worker(0, total);
        return rewards;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + usable - 1) / static_cast<std::uint64_t>(usable);
    for (int t = 0; t < usable; ++t) {
        const std::uint64_t begin = chunk * static_cast<std::uint64_t>(t);
        if (begin >= total) break;
        pool.emplace_back(worker, begin, std::min(total, begin + chunk));
    }
    for (auto& th : pool) th.join();
    return rewards;
}

GpHyperparameters fit_hyperparameters(const GroundSet& ground, std::span<const Observation> observations,
                                      std::span<const GpHyperparameters> grid) {
    (void)ground;
    if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
    if (observations.size() < 2)
        throw ConfigError("hyperparameter selection needs at least 2 observations");

    // The pairwise distances do not depend on the hyperparameters; build once.
    const Eigen::MatrixXd sqdist = pairwise_sqdist(observations);
    const auto n = static_cast<Eigen::Index>(observations.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = observations[static_cast<std::size_t>(i)].value;

    bool found = false;
    double best_lml = 0.0;
    GpHyperparameters best = grid[0];
    for (const GpHyperparameters& hyper : grid) {
        if (hyper.signal_variance <= 0.0 || hyper.lengthscale <= 0.0 || hyper.noise_variance < 0.0)
            continue;
        double mu0 = hyper.mean_from_data ? y.mean() : hyper.prior_mean;
        try {
            const Eigen::VectorXd y_centered = y.array() - mu0;
            auto [lower, jitter] = robust_cholesky(gram_matrix(sqdist, hyper));
            const Eigen::VectorXd alpha = lower.transpose().triangularView<Eigen::Upper>().solve(
                lower.triangularView<Eigen::Lower>().solve(y_centered));
            const double lml = lml_from_cholesky(lower, y_centered, alpha);
            if (!std::isfinite(lml)) continue;
            if (!found || lml > best_lml) {
                found = true;
                best_lml = lml;
                best = hyper;
            }
        } catch (const NumericError&) {
            continue;
        }
    }
    if (!found) throw NumericError("every hyperparameter grid point was numerically infeasible");
    return best;
}

} // namespace bsbo
