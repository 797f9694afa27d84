#ifndef FREQBAND_CONFIG_HPP
#define FREQBAND_CONFIG_HPP

#include <cstdint>
#include <string>

#include "freqband/advloss.hpp"
#include "freqband/freqmoe.hpp"
#include "freqband/hints.hpp"

namespace freqband {

// Tool configuration: flat key=value lines with dotted section prefixes,
// '#' comments. Unknown keys are rejected. Command-line flags override file
// values, which override the defaults below.
struct CliConfig {
    hints::HintThresholds thresholds;
    adv::LossConfig loss;
    std::uint64_t seed = 7;

    double router_lambda_s_raw = 0.0;
    double router_temperature = 1.0;
    int router_kernel_size = 9;
    double router_kernel_sigma = 2.0;
    int router_num_experts = 2;

    moe::RouterConfig router() const;

    // Applies one "section.key=value" assignment; throws on unknown keys.
    void set(const std::string& key, const std::string& value);
};

// Parses a config file; throws std::invalid_argument with the offending
// line on malformed input or unknown keys.
CliConfig load_config(const std::string& path, CliConfig base = {});

}  // namespace freqband

#endif
