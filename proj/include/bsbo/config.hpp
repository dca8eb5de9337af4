#ifndef BSBO_CONFIG_HPP
#define BSBO_CONFIG_HPP

#include <optional>
#include <string>

#include "bsbo/campaign.hpp"
#include "bsbo/data_io.hpp"

namespace bsbo {

/// Parses a campaign/design configuration document. Unknown keys are
/// rejected so typos fail loudly. Throws ConfigError with the offending key.
CampaignConfig campaign_config_from_json(const std::string& json_text);

/// The fully resolved form (every default materialized); parsing it back
/// yields the identical configuration.
std::string campaign_config_to_json(const CampaignConfig& config);

SyntheticSpec synthetic_spec_from_json(const std::string& json_text);
std::string synthetic_spec_to_json(const SyntheticSpec& spec);

/// Optional "ground" block ({"alphabets": [...]}) used by the design
/// command when the observations file has no sidecar.
std::optional<GroundSet> ground_from_config_json(const std::string& json_text);

struct CompareOptions {
    int num_sets = 20;
    bool include_dsopt_solution = true;
};

CompareOptions compare_options_from_json(const std::string& json_text);

struct ValidateOptions {
    int random_instances = 50;
    std::uint64_t seed = 0;
    double inject_fault = 0.0;  // added to g; non-zero breaks the identity on purpose
};

ValidateOptions validate_options_from_json(const std::string& json_text);

std::string kernel_name(KernelFamily kernel);
KernelFamily kernel_from_name(const std::string& name);

} // namespace bsbo

#endif // BSBO_CONFIG_HPP
