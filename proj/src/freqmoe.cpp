#include "freqband/freqmoe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace freqband::moe {

namespace {

constexpr double kEnergyEps = 1e-12;

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

void check_same_shape(const TokenSequence& a, const TokenSequence& b, const char* what) {
    if (a.batch != b.batch || a.length != b.length || a.dim != b.dim) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
}

void check_kernel_fits(const FirKernel& g, const TokenSequence& x) {
    if (g.size() > 2 * x.length + 1) {
        throw std::invalid_argument("fir kernel longer than 2L+1 tokens");
    }
}

void softmax_pair(double a, double b, double& wa, double& wb) {
    const double m = std::max(a, b);
    const double ea = std::exp(a - m);
    const double eb = std::exp(b - m);
    wa = ea / (ea + eb);
    wb = eb / (ea + eb);
}

}  // namespace

FirKernel gaussian_kernel(int size, double sigma) {
    if (size < 1 || size % 2 == 0) throw std::invalid_argument("kernel size must be odd");
    if (sigma <= 0.0) throw std::invalid_argument("kernel sigma must be positive");
    FirKernel g;
    g.taps.resize(static_cast<std::size_t>(size));
    const int radius = size / 2;
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        g.taps[t + radius] = std::exp(-0.5 * (t / sigma) * (t / sigma));
        sum += g.taps[t + radius];
    }
    for (double& v : g.taps) v /= sum;
    return g;
}

void validate(const FirKernel& g) {
    const int k = g.size();
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("FirKernel: size must be odd");
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        if (!(g.taps[i] > 0.0)) throw std::invalid_argument("FirKernel: taps must be positive");
        if (g.taps[i] != g.taps[k - 1 - i]) {
            throw std::invalid_argument("FirKernel: taps must be symmetric");
        }
        sum += g.taps[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("FirKernel: taps must sum to 1");
    }
}

double RouterConfig::lambda_s() const { return 1.0 / (1.0 + std::exp(-lambda_s_raw)); }

TokenSequence fir_lowpass(const TokenSequence& x, const FirKernel& g) {
    validate(g);
    check_kernel_fits(g, x);
    const int radius = g.size() / 2;
    TokenSequence out(x.batch, x.length, x.dim);
    for (int b = 0; b < x.batch; ++b) {
        for (int t = 0; t < x.length; ++t) {
            for (int d = 0; d < x.dim; ++d) {
                const double center = x.at(b, t, d);
                double acc = 0.0;  // center-relative: constants pass through exactly
                for (int k = -radius; k <= radius; ++k) {
                    const int tt = clampi(t + k, 0, x.length - 1);
                    acc += g.taps[k + radius] * (x.at(b, tt, d) - center);
                }
                out.at(b, t, d) = center + acc;
            }
        }
    }
    return out;
}

TokenSequence fir_lowpass_adjoint(const TokenSequence& x, const FirKernel& g) {
    validate(g);
    check_kernel_fits(g, x);
    const int radius = g.size() / 2;
    TokenSequence out(x.batch, x.length, x.dim);
    for (int b = 0; b < x.batch; ++b) {
        for (int t = 0; t < x.length; ++t) {
            for (int k = -radius; k <= radius; ++k) {
                const int tt = clampi(t + k, 0, x.length - 1);
                for (int d = 0; d < x.dim; ++d) {
                    out.at(b, tt, d) += g.taps[k + radius] * x.at(b, t, d);
                }
            }
        }
    }
    return out;
}

std::vector<double> spectral_plow(const TokenSequence& x, const RouterConfig& cfg) {
    const TokenSequence low = fir_lowpass(x, cfg.kernel);
    std::vector<double> plow(static_cast<std::size_t>(x.batch) * x.length);
    for (int b = 0; b < x.batch; ++b) {
        for (int t = 0; t < x.length; ++t) {
            double e_low = 0.0, e_high = 0.0;
            for (int d = 0; d < x.dim; ++d) {
                const double lo = low.at(b, t, d);
                const double hi = x.at(b, t, d) - lo;
                e_low += lo * lo;
                e_high += hi * hi;
            }
            plow[static_cast<std::size_t>(b) * x.length + t] =
                (e_low + e_high == 0.0) ? 0.5 : e_low / (e_low + e_high + kEnergyEps);
        }
    }
    return plow;
}

GateWeights spectral_gate(const TokenSequence& x, const RouterConfig& cfg) {
    if (cfg.temperature <= 0.0) throw std::invalid_argument("spectral_gate: temperature must be > 0");
    const std::vector<double> plow = spectral_plow(x, cfg);
    GateWeights w;
    w.batch = x.batch;
    w.length = x.length;
    w.experts = 2;
    w.granularity = GateGranularity::kTokenWise;
    w.values.resize(static_cast<std::size_t>(x.batch) * x.length * 2);
    for (std::size_t i = 0; i < plow.size(); ++i) {
        const double p_low = plow[i];
        const double p_high = 1.0 - p_low;
        double wl, wh;
        softmax_pair(p_low / cfg.temperature, p_high / cfg.temperature, wl, wh);
        w.values[2 * i] = wl;
        w.values[2 * i + 1] = wh;
    }
    return w;
}

TokenSequence spectral_plow_grad(const TokenSequence& x, const RouterConfig& cfg) {
    const TokenSequence low = fir_lowpass(x, cfg.kernel);

    TokenSequence a(x.batch, x.length, x.dim);  // d p / d e_low path
    TokenSequence b(x.batch, x.length, x.dim);  // d p / d e_high path
    for (int bi = 0; bi < x.batch; ++bi) {
        for (int t = 0; t < x.length; ++t) {
            double e_low = 0.0, e_high = 0.0;
            for (int d = 0; d < x.dim; ++d) {
                const double lo = low.at(bi, t, d);
                const double hi = x.at(bi, t, d) - lo;
                e_low += lo * lo;
                e_high += hi * hi;
            }
            if (e_low + e_high == 0.0) continue;  // degenerate tokens pin p at 1/2
            const double s = e_low + e_high + kEnergyEps;
            const double d_elow = (e_high + kEnergyEps) / (s * s);
            const double d_ehigh = -e_low / (s * s);
            for (int d = 0; d < x.dim; ++d) {
                const double lo = low.at(bi, t, d);
                const double hi = x.at(bi, t, d) - lo;
                a.at(bi, t, d) = 2.0 * d_elow * lo;
                b.at(bi, t, d) = 2.0 * d_ehigh * hi;
            }
        }
    }

    // grad = L^T a + (I - L)^T b
    TokenSequence diff = a;
    for (std::size_t i = 0; i < diff.size(); ++i) diff.values[i] -= b.values[i];
    TokenSequence grad = fir_lowpass_adjoint(diff, cfg.kernel);
    for (std::size_t i = 0; i < grad.size(); ++i) grad.values[i] += b.values[i];
    return grad;
}

GateWeights text_gate(const TokenSequence& h_text, int target_len,
                      const Eigen::MatrixXd& weight) {
    if (h_text.length > target_len) {
        throw std::invalid_argument("text_gate: text length exceeds target length");
    }
    if (weight.rows() != h_text.dim) {
        throw std::invalid_argument("text_gate: weight rows must equal token dim");
    }
    const int experts = static_cast<int>(weight.cols());
    GateWeights w;
    w.batch = h_text.batch;
    w.length = target_len;
    w.experts = experts;
    w.granularity = GateGranularity::kTokenWise;
    w.values.resize(static_cast<std::size_t>(w.batch) * target_len * experts);

    Eigen::VectorXd logits(experts);
    for (int b = 0; b < h_text.batch; ++b) {
        for (int t = 0; t < target_len; ++t) {
            if (t < h_text.length) {
                Eigen::VectorXd token(h_text.dim);
                for (int d = 0; d < h_text.dim; ++d) token(d) = h_text.at(b, t, d);
                logits = weight.transpose() * token;
            } else {
                logits.setZero();  // right padding with zero tokens
            }
            const double m = logits.maxCoeff();
            double z = 0.0;
            for (int n = 0; n < experts; ++n) z += std::exp(logits(n) - m);
            for (int n = 0; n < experts; ++n) {
                w.at(b, t, n) = std::exp(logits(n) - m) / z;
            }
        }
    }
    return w;
}

RoutingResult fuse_and_route(const GateWeights& w_text, const GateWeights& w_visual,
                             double lambda_s, GateGranularity granularity) {
    if (w_text.batch != w_visual.batch || w_text.length != w_visual.length ||
        w_text.experts != w_visual.experts) {
        throw std::invalid_argument("fuse_and_route: gate shape mismatch");
    }
    const int batch = w_text.batch, length = w_text.length, experts = w_text.experts;

    GateWeights fused;
    fused.batch = batch;
    fused.experts = experts;
    fused.granularity = granularity;

    RoutingResult result;
    if (granularity == GateGranularity::kTokenWise) {
        fused.length = length;
        fused.values.resize(static_cast<std::size_t>(batch) * length * experts);
        for (std::size_t i = 0; i < fused.values.size(); ++i) {
            fused.values[i] =
                lambda_s * w_text.values[i] + (1.0 - lambda_s) * w_visual.values[i];
        }
        result.selection.reserve(static_cast<std::size_t>(batch) * length);
        result.one_hot.assign(fused.values.size(), 0.0);
        for (int b = 0; b < batch; ++b) {
            for (int t = 0; t < length; ++t) {
                int best = 0;
                for (int n = 1; n < experts; ++n) {
                    if (fused.at(b, t, n) > fused.at(b, t, best)) best = n;
                }
                result.selection.push_back(best);
                result.one_hot[(static_cast<std::size_t>(b) * length + t) * experts + best] = 1.0;
            }
        }
    } else {
        fused.length = 1;
        fused.values.assign(static_cast<std::size_t>(batch) * experts, 0.0);
        for (int b = 0; b < batch; ++b) {
            for (int t = 0; t < length; ++t) {
                for (int n = 0; n < experts; ++n) {
                    const std::size_t i = (static_cast<std::size_t>(b) * length + t) * experts + n;
                    fused.at(b, 0, n) +=
                        (lambda_s * w_text.values[i] + (1.0 - lambda_s) * w_visual.values[i]) /
                        length;
                }
            }
        }
        result.selection.reserve(batch);
        result.one_hot.assign(fused.values.size(), 0.0);
        for (int b = 0; b < batch; ++b) {
            int best = 0;
            for (int n = 1; n < experts; ++n) {
                if (fused.at(b, 0, n) > fused.at(b, 0, best)) best = n;
            }
            result.selection.push_back(best);
            result.one_hot[static_cast<std::size_t>(b) * experts + best] = 1.0;
        }
    }
    result.fused = std::move(fused);
    return result;
}

Eigen::MatrixXd lora_merge(const Eigen::MatrixXd& base, const std::vector<LoraExpert>& experts,
                           const std::vector<double>& alpha) {
    if (experts.size() != alpha.size()) {
        throw std::invalid_argument("lora_merge: one coefficient per expert required");
    }
    Eigen::MatrixXd merged = base;
    for (std::size_t i = 0; i < experts.size(); ++i) {
        const LoraExpert& e = experts[i];
        if (e.a_matrix.rows() != base.rows() || e.b_matrix.cols() != base.cols() ||
            e.a_matrix.cols() != e.b_matrix.rows()) {
            throw std::invalid_argument("lora_merge: expert factor shapes do not conform");
        }
        merged.noalias() += alpha[i] * (e.a_matrix * e.b_matrix);
    }
    return merged;
}

double freq_regularizer(const TokenSequence& y_low, const TokenSequence& y_high,
                        const FirKernel& g) {
    check_same_shape(y_low, y_high, "freq_regularizer");
    const TokenSequence low_of_low = fir_lowpass(y_low, g);
    const TokenSequence low_of_high = fir_lowpass(y_high, g);
    double acc = 0.0;
    for (std::size_t i = 0; i < y_low.size(); ++i) {
        const double out_of_band_low = y_low.values[i] - low_of_low.values[i];
        acc += out_of_band_low * out_of_band_low;
        acc += low_of_high.values[i] * low_of_high.values[i];
    }
    return acc / static_cast<double>(y_low.size());
}

void freq_regularizer_grad(const TokenSequence& y_low, const TokenSequence& y_high,
                           const FirKernel& g, TokenSequence& grad_low,
                           TokenSequence& grad_high) {
    check_same_shape(y_low, y_high, "freq_regularizer_grad");
    const double scale = 2.0 / static_cast<double>(y_low.size());

    // d/dy_low (1/N)|y - L y|^2 = (2/N) (I - L)^T (I - L) y
    TokenSequence high_part = y_low;
    const TokenSequence low_of_low = fir_lowpass(y_low, g);
    for (std::size_t i = 0; i < high_part.size(); ++i) high_part.values[i] -= low_of_low.values[i];
    const TokenSequence adj = fir_lowpass_adjoint(high_part, g);
    grad_low = high_part;
    for (std::size_t i = 0; i < grad_low.size(); ++i) {
        grad_low.values[i] = scale * (high_part.values[i] - adj.values[i]);
    }

    // d/dy_high (1/N)|L y|^2 = (2/N) L^T L y
    const TokenSequence low_of_high = fir_lowpass(y_high, g);
    grad_high = fir_lowpass_adjoint(low_of_high, g);
    for (std::size_t i = 0; i < grad_high.size(); ++i) grad_high.values[i] *= scale;
}

}  // namespace freqband::moe
