#include "freqband/config.hpp"

#include <fstream>
#include <stdexcept>

namespace freqband {

namespace {

double to_double(const std::string& value, const std::string& key) {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) {
        throw std::invalid_argument("config: bad numeric value for " + key + ": " + value);
    }
    return v;
}

}  // namespace

moe::RouterConfig CliConfig::router() const {
    moe::RouterConfig rc;
    rc.lambda_s_raw = router_lambda_s_raw;
    rc.temperature = router_temperature;
    rc.kernel = moe::gaussian_kernel(router_kernel_size, router_kernel_sigma);
    rc.num_experts = router_num_experts;
    return rc;
}

void CliConfig::set(const std::string& key, const std::string& value) {
    auto num = [&] { return to_double(value, key); };

    if (key == "seed") {
        seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "thresholds.line_score_min") {
        thresholds.line_score_min = num();
    } else if (key == "thresholds.anisotropy_min") {
        thresholds.anisotropy_min = num();
    } else if (key == "thresholds.freq_ratio_min") {
        thresholds.freq_ratio_min = num();
    } else if (key == "thresholds.small_blobs_min") {
        thresholds.small_blobs_min = num();
    } else if (key == "thresholds.snow_anisotropy_max") {
        thresholds.snow_anisotropy_max = num();
    } else if (key == "thresholds.noise_score_min") {
        thresholds.noise_score_min = num();
    } else if (key == "thresholds.grad95_max") {
        thresholds.grad95_max = num();
    } else if (key == "thresholds.lap_var_max") {
        thresholds.lap_var_max = num();
    } else if (key == "thresholds.hf_energy_max") {
        thresholds.hf_energy_max = num();
    } else if (key == "thresholds.haze_score_min") {
        thresholds.haze_score_min = num();
    } else if (key == "thresholds.depth_grad_min") {
        thresholds.depth_grad_min = num();
    } else if (key == "thresholds.mean_y_max") {
        thresholds.mean_y_max = num();
    } else if (key == "thresholds.p50_max") {
        thresholds.p50_max = num();
    } else if (key == "thresholds.sr_min_side") {
        thresholds.sr_min_side = num();
    } else if (key == "router.lambda_s_raw") {
        router_lambda_s_raw = num();
    } else if (key == "router.temperature") {
        router_temperature = num();
    } else if (key == "router.kernel_size") {
        router_kernel_size = static_cast<int>(num());
    } else if (key == "router.kernel_sigma") {
        router_kernel_sigma = num();
    } else if (key == "router.num_experts") {
        router_num_experts = static_cast<int>(num());
    } else if (key == "loss.alpha") {
        loss.alpha = num();
    } else if (key == "loss.beta") {
        loss.beta = num();
    } else if (key == "loss.lambda") {
        loss.lambda = num();
    } else if (key == "loss.gamma") {
        loss.gamma = num();
    } else {
        throw std::invalid_argument("config: unknown key: " + key);
    }
}

CliConfig load_config(const std::string& path, CliConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open file: " + path);

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not key=value: " + line);
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

}  // namespace freqband
