#ifndef FREQBAND_FREQMOE_HPP
#define FREQBAND_FREQMOE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

// Frequency-aware LoRA-MoE routing over token sequences: FIR spectral
// split, energy gating, text gating, fused top-1 routing and low-rank
// weight merging. All operations are pure and deterministic.

namespace freqband::moe {

// B x L x D real tensor; row-major with d fastest.
struct TokenSequence {
    int batch = 0;
    int length = 0;
    int dim = 0;
    std::vector<double> values;

    TokenSequence() = default;
    TokenSequence(int b, int l, int d, double fill = 0.0)
        : batch(b), length(l), dim(d),
          values(static_cast<std::size_t>(b) * l * d, fill) {}

    double& at(int b, int l, int d) {
        return values[(static_cast<std::size_t>(b) * length + l) * dim + d];
    }
    double at(int b, int l, int d) const {
        return values[(static_cast<std::size_t>(b) * length + l) * dim + d];
    }
    std::size_t size() const { return values.size(); }
};

// Symmetric normalized FIR taps, all positive, sum exactly 1.
struct FirKernel {
    std::vector<double> taps;
    int size() const { return static_cast<int>(taps.size()); }
};

// Truncated Gaussian taps (odd size), renormalized; size/sigma default to
// 9 taps and 2 tokens.
FirKernel gaussian_kernel(int size = 9, double sigma = 2.0);

// Throws unless taps are odd-length, symmetric, positive and sum to 1.
void validate(const FirKernel& g);

enum class GateGranularity { kTokenWise, kSequenceLevel };

// Routing weights over N experts: token-wise B x L x N or reduced B x N.
struct GateWeights {
    int batch = 0;
    int length = 0;  // 1 when reduced
    int experts = 0;
    GateGranularity granularity = GateGranularity::kTokenWise;
    std::vector<double> values;

    double& at(int b, int l, int n) {
        return values[(static_cast<std::size_t>(b) * length + l) * experts + n];
    }
    double at(int b, int l, int n) const {
        return values[(static_cast<std::size_t>(b) * length + l) * experts + n];
    }
};

struct LoraExpert {
    Eigen::MatrixXd a_matrix;  // d_out x r
    Eigen::MatrixXd b_matrix;  // r x d_in
    int rank() const { return static_cast<int>(a_matrix.cols()); }
};

struct RouterConfig {
    double lambda_s_raw = 0.0;  // logistic(raw) = lambda_s in (0,1)
    double temperature = 1.0;
    FirKernel kernel = gaussian_kernel();
    int num_experts = 2;

    double lambda_s() const;
};

// Depthwise 1-D low-pass along the token axis, replicate padding.
// Kernels longer than 2L+1 are a usage error.
TokenSequence fir_lowpass(const TokenSequence& x, const FirKernel& g);

// Adjoint of fir_lowpass as a linear operator (scatter form); used by the
// analytic gradients below.
TokenSequence fir_lowpass_adjoint(const TokenSequence& x, const FirKernel& g);

// Token-wise two-expert gate from the relative energy of the low/high
// split; all-zero tokens gate to (1/2, 1/2).
GateWeights spectral_gate(const TokenSequence& x, const RouterConfig& cfg);

// Per-token low-band energy fractions p_low (B x L) prior to the softmax.
std::vector<double> spectral_plow(const TokenSequence& x, const RouterConfig& cfg);

// Gradient of sum_{b,l} p_low[b,l] with respect to every input entry.
TokenSequence spectral_plow_grad(const TokenSequence& x, const RouterConfig& cfg);

// Right-pads h_text with zero tokens to target_len, applies the D x N map
// token-wise, softmax over experts.
GateWeights text_gate(const TokenSequence& h_text, int target_len,
                      const Eigen::MatrixXd& weight);

struct RoutingResult {
    GateWeights fused;              // token-wise or reduced, per granularity
    std::vector<int> selection;     // chosen expert per (b) or per (b,l)
    std::vector<double> one_hot;    // same layout as fused rows
};

// alpha_tilde = lambda_s * w_text + (1 - lambda_s) * w_visual, followed by
// top-1 selection (ties to the lower index). Sequence-level granularity
// reduces by the token mean before the argmax.
RoutingResult fuse_and_route(const GateWeights& w_text, const GateWeights& w_visual,
                             double lambda_s, GateGranularity granularity);

// W' = W + sum_i alpha_i * A_i * B_i; the base is never mutated.
Eigen::MatrixXd lora_merge(const Eigen::MatrixXd& base, const std::vector<LoraExpert>& experts,
                           const std::vector<double>& alpha);

// Out-of-band energy: mean over elements of |highpass(y_low)|^2 plus
// |lowpass(y_high)|^2.
double freq_regularizer(const TokenSequence& y_low, const TokenSequence& y_high,
                        const FirKernel& g);

// Analytic gradients of freq_regularizer with respect to both inputs.
void freq_regularizer_grad(const TokenSequence& y_low, const TokenSequence& y_high,
                           const FirKernel& g, TokenSequence& grad_low,
                           TokenSequence& grad_high);

}  // namespace freqband::moe

#endif
