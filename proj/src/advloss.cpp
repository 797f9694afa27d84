#include "freqband/advloss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "freqband/imgstats.hpp"
#include "freqband/rng.hpp"

namespace freqband::adv {

namespace {

constexpr double kLogClamp = 1e-7;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// depthwise 1-2-1 pass along one axis, replicate padding
void binomial_pass(const FeatureMap& in, FeatureMap& out, bool along_x) {
    for (int c = 0; c < in.channels; ++c) {
        for (int y = 0; y < in.height; ++y) {
            for (int x = 0; x < in.width; ++x) {
                const double center = in.at(c, y, x);
                double acc = 0.0;
                for (int t = -1; t <= 1; ++t) {
                    const int yy = along_x ? y : clampi(y + t, 0, in.height - 1);
                    const int xx = along_x ? clampi(x + t, 0, in.width - 1) : x;
                    const double w = t == 0 ? 0.5 : 0.25;
                    acc += w * (in.at(c, yy, xx) - center);
                }
                out.at(c, y, x) = center + acc;
            }
        }
    }
}

}  // namespace

SpectralNorm::Result SpectralNorm::normalize(const Eigen::MatrixXd& weight, int iterations) {
    if (iterations < 1) throw std::invalid_argument("SpectralNorm: iterations must be >= 1");
    Result r;
    if (weight.size() == 0 || weight.isZero(0.0)) {
        r.normalized = weight;
        r.sigma = 0.0;
        r.zero_input = true;
        return r;
    }

    if (u_.size() != weight.rows()) {
        u_ = Eigen::VectorXd::Ones(weight.rows());
        u_.normalize();
    }
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd v = weight.transpose() * u_;
        double n = v.norm();
        if (n == 0.0) {  // u landed in the left nullspace; restart off-axis
            u_ = Eigen::VectorXd::Zero(weight.rows());
            u_(0) = 1.0;
            v = weight.transpose() * u_;
            n = v.norm();
            if (n == 0.0) break;
        }
        v_ = v / n;
        Eigen::VectorXd wu = weight * v_;
        const double m = wu.norm();
        if (m == 0.0) break;
        u_ = wu / m;
    }
    r.sigma = u_.dot(weight * v_);
    r.normalized = weight / r.sigma;
    return r;
}

FeatureMap blurpool_downsample(const FeatureMap& map) {
    if (map.height < 2 || map.width < 2) {
        throw std::invalid_argument("blurpool_downsample: map must be at least 2x2");
    }
    FeatureMap blurred_x(map.channels, map.height, map.width);
    FeatureMap blurred(map.channels, map.height, map.width);
    binomial_pass(map, blurred_x, true);
    binomial_pass(blurred_x, blurred, false);

    const int oh = (map.height + 1) / 2;
    const int ow = (map.width + 1) / 2;
    FeatureMap out(map.channels, oh, ow);
    for (int c = 0; c < map.channels; ++c) {
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                out.at(c, y, x) = blurred.at(c, 2 * y, 2 * x);
            }
        }
    }
    return out;
}

CriticScore critic_score(const CriticFeatures& f, const CriticHead& head) {
    if (head.level_mix.size() != f.levels.size() ||
        head.level_bias.size() != f.levels.size()) {
        throw std::invalid_argument("critic_score: head level count mismatch");
    }
    if (head.pooled_mix.cols() != f.pooled.size()) {
        throw std::invalid_argument("critic_score: pooled map size mismatch");
    }

    CriticScore score;
    for (std::size_t l = 0; l < f.levels.size(); ++l) {
        const FeatureMap& fm = f.levels[l];
        if (head.level_mix[l].cols() != fm.channels) {
            throw std::invalid_argument("critic_score: level mix width mismatch");
        }
        SpectralNorm sn;
        const auto norm = sn.normalize(head.level_mix[l], head.power_iterations);

        FeatureMap mixed(1, fm.height, fm.width);
        for (int y = 0; y < fm.height; ++y) {
            for (int x = 0; x < fm.width; ++x) {
                double acc = head.level_bias[l];
                for (int c = 0; c < fm.channels; ++c) {
                    acc += norm.normalized(0, c) * fm.at(c, y, x);
                }
                mixed.at(0, y, x) = acc;
            }
        }
        const FeatureMap down = blurpool_downsample(mixed);
        double mean = 0.0;
        for (double v : down.data) mean += v;
        mean /= static_cast<double>(down.data.size());
        score.level_means.push_back(mean);
    }

    SpectralNorm sn_pool;
    const auto norm_pool = sn_pool.normalize(head.pooled_mix, head.power_iterations);
    score.pooled_score = (norm_pool.normalized * f.pooled)(0) + head.pooled_bias;

    double acc = score.pooled_score;
    for (double s : score.level_means) acc += s;
    score.aggregate = acc / static_cast<double>(score.level_means.size() + 1);
    return score;
}

double discriminator_loss(double d_real, double d_fake) {
    const double p_real = std::clamp(logistic(d_real), kLogClamp, 1.0 - kLogClamp);
    const double p_fake = std::clamp(logistic(d_fake), kLogClamp, 1.0 - kLogClamp);
    return -std::log(p_real) - std::log(1.0 - p_fake);
}

void discriminator_loss_grad(double d_real, double d_fake, double& g_real, double& g_fake) {
    g_real = logistic(d_real) - 1.0;
    g_fake = logistic(d_fake);
}

GeneratorLoss generator_loss(const ImageBuffer& x_hat, const ImageBuffer& x,
                             const Eigen::VectorXd& features_hat,
                             const Eigen::VectorXd& features_x, double d_fake,
                             const LossConfig& cfg) {
    if (x_hat.height != x.height || x_hat.width != x.width || x_hat.channels != x.channels) {
        throw std::invalid_argument("generator_loss: image shape mismatch");
    }
    if (features_hat.size() != features_x.size()) {
        throw std::invalid_argument("generator_loss: feature size mismatch");
    }

    GeneratorLoss loss;
    double mse = 0.0;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double d = x_hat.data[i] - x.data[i];
        mse += d * d;
    }
    loss.mse_term = mse / static_cast<double>(x.data.size());
    loss.perceptual_term =
        features_hat.size() > 0
            ? (features_hat - features_x).squaredNorm() / static_cast<double>(features_hat.size())
            : 0.0;
    loss.adv_term = -cfg.lambda * d_fake;
    loss.total = cfg.alpha * loss.mse_term + cfg.beta * loss.perceptual_term + loss.adv_term;
    return loss;
}

GeneratorLossGrad generator_loss_grad(const ImageBuffer& x_hat, const ImageBuffer& x,
                                      const Eigen::VectorXd& features_hat,
                                      const Eigen::VectorXd& features_x,
                                      const LossConfig& cfg) {
    GeneratorLossGrad grad;
    const double n_px = static_cast<double>(x.data.size());
    grad.d_pixels.resize(x.data.size());
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        grad.d_pixels[i] = 2.0 * cfg.alpha * (x_hat.data[i] - x.data[i]) / n_px;
    }
    grad.d_features = features_hat.size() > 0
                          ? Eigen::VectorXd(2.0 * cfg.beta * (features_hat - features_x) /
                                            static_cast<double>(features_hat.size()))
                          : Eigen::VectorXd();
    grad.d_fake = -cfg.lambda;
    return grad;
}

double total_objective(const GeneratorLoss& gen, double freq_term, const LossConfig& cfg) {
    return gen.total + cfg.gamma * freq_term;
}

FeatureExtractor::FeatureExtractor(std::uint64_t seed, int levels, int channels)
    : levels_(levels), channels_(channels) {
    if (levels < 1 || channels < 1) {
        throw std::invalid_argument("FeatureExtractor: levels and channels must be positive");
    }
    Rng rng(mix_seed(seed, 0xFEA7ull));
    kernels_.resize(static_cast<std::size_t>(levels));
    for (auto& level : kernels_) {
        level.resize(static_cast<std::size_t>(channels));
        for (auto& k : level) {
            for (double& w : k) w = rng.normal() * 0.5;
        }
    }
    pool_map_ = Eigen::MatrixXd(channels, channels);
    for (int r = 0; r < channels; ++r) {
        for (int c = 0; c < channels; ++c) pool_map_(r, c) = rng.normal() / std::sqrt(channels);
    }
}

CriticFeatures FeatureExtractor::features(const ImageBuffer& img) const {
    const GrayImage gray = imgstats::to_gray(img);

    CriticFeatures f;
    FeatureMap current(1, gray.height, gray.width);
    std::copy(gray.data.begin(), gray.data.end(), current.data.begin());

    for (int l = 0; l < levels_; ++l) {
        FeatureMap level(channels_, current.height, current.width);
        for (int c = 0; c < channels_; ++c) {
            const auto& k = kernels_[l][c];
            // 3x3 conv over the channel-mean of the previous map, then |.|
            for (int y = 0; y < current.height; ++y) {
                for (int x = 0; x < current.width; ++x) {
                    double acc = 0.0;
                    for (int dy = -1; dy <= 1; ++dy) {
                        const int yy = clampi(y + dy, 0, current.height - 1);
                        for (int dx = -1; dx <= 1; ++dx) {
                            const int xx = clampi(x + dx, 0, current.width - 1);
                            double mean_c = 0.0;
                            for (int pc = 0; pc < current.channels; ++pc) {
                                mean_c += current.at(pc, yy, xx);
                            }
                            mean_c /= current.channels;
                            acc += k[(dy + 1) * 3 + (dx + 1)] * mean_c;
                        }
                    }
                    level.at(c, y, x) = std::abs(acc);
                }
            }
        }
        f.levels.push_back(level);
        current = blurpool_downsample(level);
    }

    Eigen::VectorXd means(channels_);
    for (int c = 0; c < channels_; ++c) {
        double m = 0.0;
        for (int y = 0; y < current.height; ++y) {
            for (int x = 0; x < current.width; ++x) m += current.at(c, y, x);
        }
        means(c) = m / (static_cast<double>(current.height) * current.width);
    }
    f.pooled = pool_map_ * means;
    return f;
}

Eigen::VectorXd FeatureExtractor::embedding(const ImageBuffer& img) const {
    const CriticFeatures f = features(img);
    Eigen::VectorXd out(levels_ * channels_ + f.pooled.size());
    int at = 0;
    for (const FeatureMap& level : f.levels) {
        for (int c = 0; c < level.channels; ++c) {
            double m = 0.0;
            for (int y = 0; y < level.height; ++y) {
                for (int x = 0; x < level.width; ++x) m += level.at(c, y, x);
            }
            out(at++) = m / (static_cast<double>(level.height) * level.width);
        }
    }
    out.segment(at, f.pooled.size()) = f.pooled;
    return out;
}

CriticHead FeatureExtractor::make_head(std::uint64_t seed) const {
    Rng rng(mix_seed(seed, 0x4EADull));
    CriticHead head;
    for (int l = 0; l < levels_; ++l) {
        Eigen::RowVectorXd mix(channels_);
        for (int c = 0; c < channels_; ++c) mix(c) = rng.normal();
        head.level_mix.push_back(mix);
        head.level_bias.push_back(0.0);
    }
    head.pooled_mix = Eigen::RowVectorXd(channels_);
    for (int c = 0; c < channels_; ++c) head.pooled_mix(c) = rng.normal();
    head.pooled_bias = 0.0;
    return head;
}

}  // namespace freqband::adv
