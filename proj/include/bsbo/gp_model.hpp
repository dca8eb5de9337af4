#ifndef BSBO_GP_MODEL_HPP
#define BSBO_GP_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "bsbo/constraint_space.hpp"

namespace bsbo {

enum class KernelFamily { Matern12, Matern32, Matern52, SquaredExponential };

struct GpHyperparameters {
    KernelFamily kernel = KernelFamily::Matern52;
    double signal_variance = 1.0;
    double lengthscale = 1.0;
    double noise_variance = 1e-4;
    double prior_mean = 0.0;
    bool mean_from_data = true;  // overrides prior_mean with mean(y) at fit time
};

struct Observation {
    Item item;
    double value;
};

/// Kernel value from the squared feature distance. One-hot features per
/// site make d^2 = 2 * (number of differing sites).
double kernel_value(const GpHyperparameters& hyper, double squared_distance);

/// Squared one-hot feature distance between two items.
double squared_distance(const Item& a, const Item& b);

/// Concatenated per-site one-hot encoding, length sum of alphabet sizes,
/// exactly L ones. Throws DataError if a symbol index is out of range.
Eigen::VectorXd encode_item(const Item& item, const GroundSet& ground);

/// P(u > tau) for u ~ N(mean, variance); the degenerate variance = 0 case
/// collapses to the indicator mean > tau.
double improvement_probability(double mean, double variance, double tau);

/// Per-item improvement probabilities over all of Q(C), plus the threshold
/// they were computed against.
struct RewardMatrix {
    std::vector<double> rho;
    double tau = 0.0;
};

/// Exact GP regression posterior, conditioned once at construction.
/// Immutable afterwards; queries are pure and thread-safe.
class GpPosterior {
public:
    /// Conditions on the observations via Cholesky with escalating jitter
    /// (relative floor 1e-10, cap 1e-4 of the mean diagonal). Throws
    /// NumericError when the Gram matrix stays non-PD at the cap.
    static GpPosterior fit(const GroundSet& ground, std::span<const Observation> observations,
                           const GpHyperparameters& hyper);

    double mean_at(const Item& item) const;
    double variance_at(const Item& item) const;  // clamped at 0

    /// Posterior mean vector and full covariance over a list of query items.
    void joint(std::span<const Item> items, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) const;

    double log_marginal_likelihood() const;

    const GroundSet& ground() const { return ground_; }
    const GpHyperparameters& hyper() const { return hyper_; }
    double prior_mean_used() const { return prior_mean_; }
    std::size_t num_observations() const { return items_.size(); }
    double jitter_used() const { return jitter_; }

private:
    GroundSet ground_;
    GpHyperparameters hyper_;
    std::vector<Item> items_;
    Eigen::VectorXd y_centered_;
    Eigen::MatrixXd chol_lower_;  // L with L L^T = K + (sigma^2 + jitter) I
    Eigen::VectorXd alpha_;       // K^{-1} (y - mu0)
    double prior_mean_ = 0.0;
    double jitter_ = 0.0;
    double log_det_half_ = 0.0;   // sum log L_ii

    Eigen::VectorXd cross_covariance(const Item& item) const;
};

/// rho(x) = P(u(x) > tau) for every item of Q(C), from the posterior
/// marginals. Items are independent, so the loop is data-parallel.
RewardMatrix compute_rewards(const GpPosterior& posterior, const GroundSet& ground, double tau,
                             int threads = 1);

/// Grid-search hyperparameter selection by exact log marginal likelihood;
/// ties broken by first occurrence. Requires >= 2 observations and a
/// non-empty grid; throws NumericError if every grid point is infeasible.
GpHyperparameters fit_hyperparameters(const GroundSet& ground, std::span<const Observation> observations,
                                      std::span<const GpHyperparameters> grid);

} // namespace bsbo

#endif // BSBO_GP_MODEL_HPP
