#ifndef FREQBAND_ADVLOSS_HPP
#define FREQBAND_ADVLOSS_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "freqband/image.hpp"

// Adversarial-training objective math: spectrally normalized multi-level
// discriminator head with anti-aliased downsampling, discriminator and
// composite generator losses, and the total objective with the frequency
// regularizer term.

namespace freqband::adv {

// C x H x W feature map, channel-major.
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, fill) {}

    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

struct CriticFeatures {
    std::vector<FeatureMap> levels;
    Eigen::VectorXd pooled;
};

struct CriticScore {
    std::vector<double> level_means;  // spatially averaged per-level scores
    double pooled_score = 0.0;
    double aggregate = 0.0;  // (sum of level means + pooled) / (L + 1)
};

struct LossConfig {
    double alpha = 50.0;
    double beta = 5.0;
    double lambda = 0.5;
    double gamma = 1e-3;
};

// Power-iteration spectral normalization with persistent left/right warm
// starts. Instances must be confined to one thread or synchronized.
class SpectralNorm {
public:
    struct Result {
        Eigen::MatrixXd normalized;
        double sigma = 0.0;
        bool zero_input = false;
    };
    Result normalize(const Eigen::MatrixXd& weight, int iterations);

private:
    Eigen::VectorXd u_, v_;
};

// Depthwise 1-2-1 binomial blur (separable, replicate padding) followed by
// stride-2 subsampling; output is ceil(H/2) x ceil(W/2).
FeatureMap blurpool_downsample(const FeatureMap& map);

// Shallow head: one spectrally normalized 1x1 channel mix plus one
// blurpool per level, and a normalized linear map on the pooled vector.
struct CriticHead {
    std::vector<Eigen::RowVectorXd> level_mix;  // 1 x C_l each
    std::vector<double> level_bias;
    Eigen::RowVectorXd pooled_mix;  // 1 x D
    double pooled_bias = 0.0;
    int power_iterations = 50;
};

CriticScore critic_score(const CriticFeatures& f, const CriticHead& head);

// Raw scores pass through the logistic internally; logs clamped at 1e-7.
double discriminator_loss(double d_real, double d_fake);
void discriminator_loss_grad(double d_real, double d_fake, double& g_real, double& g_fake);

struct GeneratorLoss {
    double total = 0.0;
    double mse_term = 0.0;         // raw mean squared pixel error
    double perceptual_term = 0.0;  // raw mean squared feature error
    double adv_term = 0.0;         // exactly -lambda * d_fake
};

// total = alpha * mse + beta * perceptual - lambda * d_fake; the
// adversarial term uses the raw critic score, no logistic.
GeneratorLoss generator_loss(const ImageBuffer& x_hat, const ImageBuffer& x,
                             const Eigen::VectorXd& features_hat,
                             const Eigen::VectorXd& features_x, double d_fake,
                             const LossConfig& cfg);

struct GeneratorLossGrad {
    std::vector<double> d_pixels;    // w.r.t. x_hat entries
    Eigen::VectorXd d_features;      // w.r.t. features_hat entries
    double d_fake = 0.0;             // always -lambda
};

GeneratorLossGrad generator_loss_grad(const ImageBuffer& x_hat, const ImageBuffer& x,
                                      const Eigen::VectorXd& features_hat,
                                      const Eigen::VectorXd& features_x,
                                      const LossConfig& cfg);

// total = generator total + gamma * freq_term
double total_objective(const GeneratorLoss& gen, double freq_term, const LossConfig& cfg);

// Fixed, seeded random multi-scale convolutional feature stack standing in
// for a frozen perceptual backbone at desk scale. Deterministic per seed.
class FeatureExtractor {
public:
    explicit FeatureExtractor(std::uint64_t seed, int levels = 3, int channels = 6);

    CriticFeatures features(const ImageBuffer& img) const;
    Eigen::VectorXd embedding(const ImageBuffer& img) const;

    // A head with unit mixing weights and zero biases matching this
    // extractor's shapes; deterministic per seed.
    CriticHead make_head(std::uint64_t seed) const;

    int levels() const { return levels_; }
    int channels() const { return channels_; }

private:
    int levels_;
    int channels_;
    std::vector<std::vector<std::array<double, 9>>> kernels_;  // per level, per channel
    Eigen::MatrixXd pool_map_;
};

}  // namespace freqband::adv

#endif
