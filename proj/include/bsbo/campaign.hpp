#ifndef BSBO_CAMPAIGN_HPP
#define BSBO_CAMPAIGN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bsbo/data_io.hpp"
#include "bsbo/ds_optimize.hpp"
#include "bsbo/objective.hpp"
#include "bsbo/rng.hpp"

namespace bsbo {

/// Hyperparameter search grid; variance axes are relative to var(y) at fit
/// time so one grid serves landscapes of any scale.
struct GpGridSpec {
    std::vector<double> lengthscales;
    std::vector<double> signal_relative;
    std::vector<double> noise_relative;

    static GpGridSpec defaults();  // log-spaced 5 x 5 x 5
};

struct CampaignConfig {
    int rounds = 3;
    std::int64_t batch_size = 100;
    int k_random = 100;
    std::string wild_type;  // sequence; empty -> table metadata -> item 0
    double observation_noise = 0.0;
    bool refit_hyperparameters = true;
    GpHyperparameters gp;
    GpGridSpec grid = GpGridSpec::defaults();
    OptimizerConfig optimizer;
    bool mc_validation = false;
    McOptions mc;
    MissingPolicy missing_policy = MissingPolicy::ImputeZero;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct TaggedObservation {
    std::uint64_t item_index = 0;
    double value = 0.0;
    int round = 0;
};

struct CampaignState {
    int round = 0;  // rounds completed; 0 right after the initial design
    std::vector<TaggedObservation> observations;
    double tau = 0.0;
    double best_so_far = 0.0;
};

/// n i.i.d. uniform draws with replacement from Q(S), decoded through
/// mixed-radix indexing; no enumeration is materialized.
std::vector<std::uint64_t> sample_batch(const GroundSet& ground, const ConstraintSet& s,
                                        std::int64_t n, Rng& rng);

/// Wild type, every Hamming-1 mutant, plus k uniform items; deduplicated.
std::vector<Item> initial_design(const GroundSet& ground, const Item& wild_type, int k_random,
                                 Rng& rng);

/// One optimize-sample-observe round; appends observations to the state and
/// returns the round's record.
RoundRecord run_round(CampaignState& state, const FitnessTable& table, const CampaignConfig& config);

/// Initial design plus T rounds against the table oracle. Bit-for-bit
/// reproducible for a fixed master seed.
CampaignReport run_campaign(const FitnessTable& table, const CampaignConfig& config,
                            const std::string& resolved_config_json = {});

/// Expands the relative grid around the observed variance into concrete
/// hyperparameter candidates (kernel/mean settings copied from the base).
std::vector<GpHyperparameters> expand_grid(const GpGridSpec& grid, const GpHyperparameters& base,
                                           double observed_variance);

/// One between-rounds constraint design from real observations: fit the GP,
/// build the reward matrix against tau = max observed, run the optimizer.
struct DesignResult {
    ConstraintSet best;
    double surrogate_value = 0.0;
    std::uint64_t library_size = 0;
    std::size_t trajectory_length = 0;
    double tau = 0.0;
};

DesignResult run_design(const GroundSet& ground, std::span<const Observation> observations,
                        const CampaignConfig& config);

/// Surrogate-versus-Monte-Carlo comparison over sampled constraint sets,
/// using a posterior fit on the table's initial design. Sets whose library
/// exceeds the MC size cap are kept as rows with a note and no estimate.
struct CompareRow {
    std::string id;
    std::uint64_t library_size = 0;
    double surrogate = 0.0;
    bool has_mc = false;
    double mc_mean = 0.0;
    double mc_stderr = 0.0;
    std::string note;
};

struct CompareOptionsView {
    int num_sets = 20;
    bool include_dsopt_solution = true;
};

std::vector<CompareRow> run_compare_objectives(const FitnessTable& table,
                                               const CampaignConfig& config,
                                               const CompareOptionsView& options);

std::string compare_rows_to_csv(const std::vector<CompareRow>& rows);

} // namespace bsbo

#endif // BSBO_CAMPAIGN_HPP
