#include "freqband/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "freqband/hints.hpp"
#include "freqband/imgstats.hpp"
#include "freqband/parallel.hpp"

#include <json.hpp>

namespace freqband::degrade {

namespace {

using planner::TaskToken;

constexpr double kPi = 3.14159265358979323846;

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

double param(const DegradationSpec& spec, const std::string& key) {
    const auto it = spec.params.find(key);
    if (it == spec.params.end()) {
        throw std::invalid_argument("degradation spec for '" + planner::task_name(spec.kind) +
                                    "' is missing parameter '" + key + "'");
    }
    return it->second;
}

double param_or(const DegradationSpec& spec, const std::string& key, double fallback) {
    const auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

// Deposits an anti-aliased flat-top ribbon (about 3 px wide) into an
// additive overlay, capped at the streak intensity so crossings do not
// over-brighten. The flat core is wider than the 3x3 box window, so streak
// interiors leave no local-mean residual and stay out of the noise cue.
void splat_segment(GrayImage& overlay, double cx, double cy, double angle_rad, double length,
                   double intensity) {
    const double dx = std::sin(angle_rad);
    const double dy = std::cos(angle_rad);  // angle measured from vertical
    const double step = 0.4;
    const int steps = std::max(1, static_cast<int>(length / step));
    for (int s = 0; s <= steps; ++s) {
        const double t = (static_cast<double>(s) / steps - 0.5) * length;
        for (int lane = 0; lane < 4; ++lane) {
            const double off = -1.2 + 0.8 * lane;
            const double px = cx + t * dx - off * dy;
            const double py = cy + t * dy + off * dx;
            const int x0 = static_cast<int>(std::floor(px));
            const int y0 = static_cast<int>(std::floor(py));
            const double fx = px - x0;
            const double fy = py - y0;
            const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
            const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
            const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
            for (int k = 0; k < 4; ++k) {
                if (xs[k] < 0 || xs[k] >= overlay.width || ys[k] < 0 || ys[k] >= overlay.height)
                    continue;
                double& cell = overlay.at(ys[k], xs[k]);
                cell = std::min(intensity, cell + intensity * w[k]);
            }
        }
    }
}

ImageBuffer add_luma_overlay(const ImageBuffer& base, const GrayImage& overlay) {
    ImageBuffer out = base;
    for (int y = 0; y < base.height; ++y) {
        for (int x = 0; x < base.width; ++x) {
            const double a = overlay.at(y, x);
            if (a == 0.0) continue;
            for (int c = 0; c < base.channels; ++c) {
                out.at(y, x, c) = clamp01(out.at(y, x, c) + a);
            }
        }
    }
    return out;
}

ImageBuffer apply_rain(const ImageBuffer& base, const DegradationSpec& spec) {
    const double angle = param(spec, "angle_deg") * kPi / 180.0;
    const double density = param(spec, "density_mpx");
    const double length_frac = param(spec, "length_frac");
    const double intensity = param(spec, "intensity");

    Rng rng(spec.seed);
    const double diag = std::hypot(base.height, base.width);
    const double mpx = base.pixel_count() / 1e6;
    const int count = std::max(1, static_cast<int>(std::lround(density * mpx)));

    GrayImage overlay(base.height, base.width, 0.0);
    for (int i = 0; i < count; ++i) {
        const double cx = rng.uniform(0.0, base.width);
        const double cy = rng.uniform(0.0, base.height);
        const double jitter = rng.uniform(-5.0, 5.0) * kPi / 180.0;
        const double len = length_frac * diag * rng.uniform(0.7, 1.3);
        splat_segment(overlay, cx, cy, angle + jitter, len, intensity);
    }
    return add_luma_overlay(base, overlay);
}

ImageBuffer apply_snow(const ImageBuffer& base, const DegradationSpec& spec) {
    const double density = param(spec, "density_mpx");
    const double radius_frac = param(spec, "radius_frac");
    const double intensity = param(spec, "intensity");

    Rng rng(spec.seed);
    const double mpx = base.pixel_count() / 1e6;
    const int count = std::max(1, static_cast<int>(std::lround(density * mpx)));
    const double base_radius = radius_frac * std::min(base.height, base.width);

    GrayImage overlay(base.height, base.width, 0.0);
    for (int i = 0; i < count; ++i) {
        const double cx = rng.uniform(0.0, base.width);
        const double cy = rng.uniform(0.0, base.height);
        const double r = std::max(1.0, base_radius * rng.uniform(0.6, 1.6));
        const int x_lo = std::max(0, static_cast<int>(cx - r - 2));
        const int x_hi = std::min(base.width - 1, static_cast<int>(cx + r + 2));
        const int y_lo = std::max(0, static_cast<int>(cy - r - 2));
        const int y_hi = std::min(base.height - 1, static_cast<int>(cy + r + 2));
        for (int y = y_lo; y <= y_hi; ++y) {
            for (int x = x_lo; x <= x_hi; ++x) {
                const double d = std::hypot(x - cx, y - cy);
                const double edge = (r + 0.7 - d) / 1.4;  // soft 1.4 px rim
                if (edge <= 0.0) continue;
                const double w = edge >= 1.0 ? 1.0 : edge * edge * (3.0 - 2.0 * edge);
                double& cell = overlay.at(y, x);
                cell = std::max(cell, intensity * w);
            }
        }
    }
    return add_luma_overlay(base, overlay);
}

ImageBuffer apply_noise(const ImageBuffer& base, const DegradationSpec& spec) {
    const double sigma = param(spec, "sigma");
    ImageBuffer out = base;
    if (sigma == 0.0) return out;
    Rng rng(spec.seed);
    for (double& v : out.data) v = clamp01(v + sigma * rng.normal());
    return out;
}

// k x k kernel with taps summing to 1, applied per channel in
// center-relative form (constants stay bit-exact).
ImageBuffer convolve_kernel(const ImageBuffer& base, const std::vector<double>& kernel,
                            int ksize) {
    const int radius = ksize / 2;
    ImageBuffer out = base;
    for (int y = 0; y < base.height; ++y) {
        for (int x = 0; x < base.width; ++x) {
            for (int c = 0; c < base.channels; ++c) {
                const double center = base.at(y, x, c);
                double acc = 0.0;
                for (int dy = -radius; dy <= radius; ++dy) {
                    const int yy = std::clamp(y + dy, 0, base.height - 1);
                    for (int dx = -radius; dx <= radius; ++dx) {
                        const double w = kernel[(dy + radius) * ksize + (dx + radius)];
                        if (w == 0.0) continue;
                        const int xx = std::clamp(x + dx, 0, base.width - 1);
                        acc += w * (base.at(yy, xx, c) - center);
                    }
                }
                out.at(y, x, c) = clamp01(center + acc);
            }
        }
    }
    return out;
}

ImageBuffer apply_blur(const ImageBuffer& base, const DegradationSpec& spec) {
    const int kind = static_cast<int>(param_or(spec, "blur_kind", 0.0));
    const int size = std::min(base.height, base.width);
    if (kind == 0) {
        const double sigma = param_or(spec, "sigma", param_or(spec, "sigma_frac", 0.0) * size);
        if (sigma <= 0.0) throw std::invalid_argument("blur: sigma or sigma_frac required");
        ImageBuffer out = base;
        for (int c = 0; c < base.channels; ++c) {
            GrayImage plane(base.height, base.width);
            for (int y = 0; y < base.height; ++y)
                for (int x = 0; x < base.width; ++x) plane.at(y, x) = base.at(y, x, c);
            plane = imgstats::gaussian_blur(plane, sigma);
            for (int y = 0; y < base.height; ++y)
                for (int x = 0; x < base.width; ++x) out.at(y, x, c) = clamp01(plane.at(y, x));
        }
        return out;
    }

    // motion: line kernel sampled with bilinear weights
    const double length =
        std::max(2.0, param_or(spec, "length", param_or(spec, "length_frac", 0.0) * size));
    const double angle = param_or(spec, "angle_deg", 0.0) * kPi / 180.0;
    const int radius = static_cast<int>(std::ceil(length / 2.0)) + 1;
    const int ksize = 2 * radius + 1;
    std::vector<double> kernel(static_cast<std::size_t>(ksize) * ksize, 0.0);
    const double dx = std::cos(angle), dy = std::sin(angle);
    const double step = 0.25;
    for (double t = -length / 2.0; t <= length / 2.0; t += step) {
        const double px = radius + t * dx;
        const double py = radius + t * dy;
        const int x0 = static_cast<int>(std::floor(px));
        const int y0 = static_cast<int>(std::floor(py));
        const double fx = px - x0, fy = py - y0;
        kernel[y0 * ksize + x0] += (1 - fx) * (1 - fy);
        kernel[y0 * ksize + x0 + 1] += fx * (1 - fy);
        kernel[(y0 + 1) * ksize + x0] += (1 - fx) * fy;
        kernel[(y0 + 1) * ksize + x0 + 1] += fx * fy;
    }
    double sum = 0.0;
    for (double w : kernel) sum += w;
    for (double& w : kernel) w /= sum;
    return convolve_kernel(base, kernel, ksize);
}

ImageBuffer apply_haze(const ImageBuffer& base, const DegradationSpec& spec) {
    const double airlight = param(spec, "airlight");
    const double beta = param(spec, "beta");
    ImageBuffer out = base;
    for (int y = 0; y < base.height; ++y) {
        // far at the top: depth 1 at row 0, 0 at the bottom row
        const double depth =
            base.height > 1 ? 1.0 - static_cast<double>(y) / (base.height - 1) : 1.0;
        const double t = std::exp(-beta * depth);
        for (int x = 0; x < base.width; ++x) {
            for (int c = 0; c < base.channels; ++c) {
                out.at(y, x, c) = clamp01(base.at(y, x, c) * t + airlight * (1.0 - t));
            }
        }
    }
    return out;
}

ImageBuffer apply_low_light(const ImageBuffer& base, const DegradationSpec& spec) {
    const double gain = param(spec, "gain");
    const double gamma = param(spec, "gamma");
    ImageBuffer out = base;
    for (double& v : out.data) v = clamp01(gain * std::pow(v, gamma));
    return out;
}

ImageBuffer apply_sr(const ImageBuffer& base, const DegradationSpec& spec) {
    const int factor = static_cast<int>(param(spec, "factor"));
    if (factor < 2) throw std::invalid_argument("sr: factor must be >= 2");
    const int oh = base.height / factor;
    const int ow = base.width / factor;
    if (oh < 8 || ow < 8) throw std::invalid_argument("sr: output smaller than 8x8");
    ImageBuffer out(oh, ow, base.channels);
    const double inv = 1.0 / (factor * factor);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            for (int c = 0; c < base.channels; ++c) {
                double acc = 0.0;
                for (int by = 0; by < factor; ++by) {
                    for (int bx = 0; bx < factor; ++bx) {
                        acc += base.at(y * factor + by, x * factor + bx, c);
                    }
                }
                out.at(y, x, c) = acc * inv;
            }
        }
    }
    return out;
}

DegradationSpec sample_spec(TaskToken task, Rng& rng, std::uint64_t item_seed) {
    DegradationSpec spec;
    spec.kind = task;
    spec.seed = item_seed;
    auto& p = spec.params;
    switch (task) {
        case TaskToken::kDeraining:
            p["angle_deg"] = rng.uniform(-30.0, 30.0);
            p["density_mpx"] = rng.uniform(3800.0, 4800.0);
            p["length_frac"] = rng.uniform(0.07, 0.10);
            p["intensity"] = rng.uniform(0.20, 0.22);
            break;
        case TaskToken::kDesnowing:
            p["density_mpx"] = rng.uniform(280.0, 520.0);
            p["radius_frac"] = rng.uniform(0.0035, 0.0075);
            p["intensity"] = rng.uniform(0.85, 0.95);
            break;
        case TaskToken::kDenoise:
            p["sigma"] = (rng.uniform_int(2) == 0 ? 15.0 : 25.0) / 255.0;
            break;
        case TaskToken::kDeblur:
            if (rng.uniform_int(2) == 0) {
                p["blur_kind"] = 0.0;
                p["sigma_frac"] = rng.uniform(0.004, 0.008);
            } else {
                p["blur_kind"] = 1.0;
                p["length_frac"] = rng.uniform(0.02, 0.035);
                p["angle_deg"] = rng.uniform(0.0, 180.0);
            }
            break;
        case TaskToken::kDehazing:
            // airlight kept below the snow luma threshold so the hazy top
            // half cannot fragment into small bright blobs
            p["airlight"] = rng.uniform(0.70, 0.76);
            p["beta"] = rng.uniform(0.9, 1.5);
            break;
        case TaskToken::kLightEnhancement:
            p["gain"] = rng.uniform(0.55, 0.65);
            p["gamma"] = rng.uniform(1.15, 1.30);
            break;
        case TaskToken::kSuperResolution:
            p["factor"] = 5.0 + rng.uniform_int(2);
            break;
    }
    return spec;
}

}  // namespace

ImageBuffer apply(const ImageBuffer& base, const DegradationSpec& spec) {
    validate(base);
    switch (spec.kind) {
        case TaskToken::kDeraining: return apply_rain(base, spec);
        case TaskToken::kDesnowing: return apply_snow(base, spec);
        case TaskToken::kDenoise: return apply_noise(base, spec);
        case TaskToken::kDeblur: return apply_blur(base, spec);
        case TaskToken::kDehazing: return apply_haze(base, spec);
        case TaskToken::kLightEnhancement: return apply_low_light(base, spec);
        case TaskToken::kSuperResolution: return apply_sr(base, spec);
    }
    throw std::invalid_argument("apply: unknown degradation kind");
}

namespace {

// one procedural candidate; builtin_bases filters these with the margin check
ImageBuffer base_candidate(int size, std::uint64_t sub_seed) {
        Rng rng(sub_seed);
        const int h = size, w = size;

        struct Wave {
            double fx, fy, phase, amp;
        };

        // weak large-scale background
        std::vector<Wave> waves;
        for (int i = 0; i < 3; ++i) {
            const double period = size / rng.uniform(1.0, 3.0);
            const double theta = rng.uniform(0.0, kPi);
            waves.push_back({std::cos(theta) / period, std::sin(theta) / period,
                             rng.uniform(0.0, 2.0 * kPi), rng.uniform(0.015, 0.03)});
        }

        // multi-scale isotropic texture; the high bands carry the Laplacian
        // variance, the low bands survive box downscaling
        // near-Nyquist diagonal checker: strong Laplacian response but nearly
        // invisible to the Sobel smoothing taps and outside the spectrum's
        // Nyquist disc, so it feeds lap_var without touching the other cues
        for (int i = 0; i < 4; ++i) {
            const double fx = (rng.uniform_int(2) ? 1.0 : -1.0) * rng.uniform(0.44, 0.48);
            const double fy = (rng.uniform_int(2) ? 1.0 : -1.0) * rng.uniform(0.44, 0.48);
            waves.push_back({fx, fy, rng.uniform(0.0, 2.0 * kPi), 0.12});
        }

        // energy across octaves so integer-factor downscales stay sharp
        const double band_freq[6] = {0.46, 0.30, 0.19, 0.12, 0.075, 0.048};
        const double band_amp[6] = {0.24, 0.12, 0.05, 0.11, 0.20, 0.20};
        const int band_waves[6] = {5, 5, 5, 9, 9, 9};  // low bands carry the
        // downscaled image's orientation statistics, so keep them populous
        for (int band = 0; band < 6; ++band) {
            const int n = band_waves[band];
            for (int i = 0; i < n; ++i) {
                const double f = band_freq[band] * rng.uniform(0.85, 1.15);
                const double theta = rng.uniform(0.0, kPi);
                waves.push_back({f * std::cos(theta), f * std::sin(theta),
                                 rng.uniform(0.0, 2.0 * kPi),
                                 band_amp[band] * rng.uniform(0.8, 1.2) / std::sqrt(n)});
            }
        }

        // broad oriented lobe across two bands; keeps anisotropy away from
        // both the rain trigger and the snow low-anisotropy trigger
        const double lobe_dir = rng.uniform(0.0, kPi);
        for (int i = 0; i < 6; ++i) {
            const double f = (i < 3 ? 0.40 : 0.17) * rng.uniform(0.85, 1.15);
            const double theta = lobe_dir + rng.uniform(-0.35, 0.35);
            waves.push_back({f * std::cos(theta), f * std::sin(theta),
                             rng.uniform(0.0, 2.0 * kPi), rng.uniform(0.038, 0.050)});
        }

        // smooth gate masking the texture so flat regions stay clean
        struct Gate {
            double fx, fy, phase;
        };
        std::vector<Gate> gates;
        for (int i = 0; i < 3; ++i) {
            const double period = size / rng.uniform(1.5, 3.0);
            const double theta = rng.uniform(0.0, kPi);
            gates.push_back({std::cos(theta) / period, std::sin(theta) / period,
                             rng.uniform(0.0, 2.0 * kPi)});
        }

        // constant zero-luma chroma offset: saturated color without chroma
        // variation in flat regions
        const double cb0 = (rng.uniform_int(2) ? 1.0 : -1.0) * rng.uniform(0.06, 0.10);
        const double cr0 = (rng.uniform_int(2) ? 1.0 : -1.0) * rng.uniform(0.06, 0.10);
        Wave cbw{rng.uniform(0.5, 1.5) / size, rng.uniform(0.5, 1.5) / size,
                 rng.uniform(0.0, 2.0 * kPi), 0.004};
        Wave crw{rng.uniform(0.5, 1.5) / size, rng.uniform(0.5, 1.5) / size,
                 rng.uniform(0.0, 2.0 * kPi), 0.004};

        ImageBuffer img(h, w, 3);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double gate = 0.0;
                for (const Gate& gd : gates) {
                    gate += std::cos(2.0 * kPi * (gd.fx * x + gd.fy * y) + gd.phase);
                }
                const double mask = 0.5 + 0.5 * std::tanh(3.0 * (gate + 0.35));

                double luma = 0.42;
                for (std::size_t i = 0; i < waves.size(); ++i) {
                    const Wave& v = waves[i];
                    const double value =
                        v.amp * std::cos(2.0 * kPi * (v.fx * x + v.fy * y) + v.phase);
                    luma += i < 3 ? value : mask * value;
                }
                luma = std::clamp(luma, 0.07, 0.55);

                const double cb =
                    cb0 + cbw.amp * std::cos(2.0 * kPi * (cbw.fx * x + cbw.fy * y) + cbw.phase);
                const double cr =
                    cr0 + crw.amp * std::cos(2.0 * kPi * (crw.fx * x + crw.fy * y) + crw.phase);
                const double r = luma + 1.402 * cr;
                const double bch = luma + 1.772 * cb;
                const double g = (luma - 0.299 * r - 0.114 * bch) / 0.587;
                img.at(y, x, 0) = clamp01(r);
                img.at(y, x, 1) = clamp01(g);
                img.at(y, x, 2) = clamp01(bch);
            }
        }
        return img;
}

bool margins_clean(const ImageBuffer& img, double slack) {
    const hints::HintThresholds th;
    const auto margins = planner::severity_scores(hints::extract_hints(img), th);
    for (const auto& [task, margin] : margins) {
        if (margin > -slack) return false;
    }
    return true;
}

// Requires the intended rule to beat every other margin by the gap.
bool probe_wins(const ImageBuffer& img, const DegradationSpec& probe, double gap) {
    const hints::HintThresholds th;
    const auto margins = planner::severity_scores(hints::extract_hints(apply(img, probe)), th);
    const double target = margins.at(probe.kind);
    if (target <= 0.0) return false;
    for (const auto& [task, margin] : margins) {
        if (task != probe.kind && margin + gap > target) return false;
    }
    return true;
}

// The fragile races are probed directly: noise flattens the orientation
// histogram toward the desnowing rule, deep downscales can leave one
// oriented wave dominant, and floor-parameter rain sits near its margin
// boundary. A base must survive all of them.
bool probes_ok(const ImageBuffer& img) {
    for (double sigma : {15.0 / 255.0, 25.0 / 255.0}) {
        DegradationSpec probe;
        probe.kind = TaskToken::kDenoise;
        probe.seed = 0xA0B1u;
        probe.params["sigma"] = sigma;
        if (!probe_wins(img, probe, 0.2)) return false;
    }
    for (double factor : {5.0, 6.0}) {
        DegradationSpec probe;
        probe.kind = TaskToken::kSuperResolution;
        probe.seed = 0xA0B2u;
        probe.params["factor"] = factor;
        if (!probe_wins(img, probe, 0.1)) return false;
    }
    DegradationSpec rain;
    rain.kind = TaskToken::kDeraining;
    rain.seed = 0xA0B3u;
    rain.params["angle_deg"] = 15.0;
    rain.params["density_mpx"] = 3800.0;
    rain.params["length_frac"] = 0.07;
    rain.params["intensity"] = 0.20;
    return probe_wins(img, rain, 0.05);
}

}  // namespace

std::vector<ImageBuffer> builtin_bases(int size, int count, std::uint64_t seed) {
    if (size < 24) throw std::invalid_argument("builtin_bases: size must be >= 24");
    std::vector<ImageBuffer> bases;
    bases.reserve(count);

    // rejection-sampled against the planner margins: a candidate is a base
    // only if no rule comes within the slack of firing
    const int max_attempts = 60 * count;
    for (int attempt = 0; attempt < max_attempts && static_cast<int>(bases.size()) < count;
         ++attempt) {
        ImageBuffer img = base_candidate(size, mix_seed(seed, 0xBA5Eull * 131 + attempt));
        if (margins_clean(img, 0.03) && probes_ok(img)) bases.push_back(std::move(img));
    }
    if (static_cast<int>(bases.size()) < count) {
        throw std::runtime_error("builtin_bases: rejection sampling failed to find enough clean bases");
    }
    return bases;
}

std::vector<CorpusItem> make_corpus(const std::vector<ImageBuffer>& bases, int n_per_class,
                                    std::uint64_t seed, int threads) {
    if (bases.empty()) throw std::invalid_argument("make_corpus: no base images");
    if (n_per_class < 0) throw std::invalid_argument("make_corpus: negative n_per_class");

    const hints::HintThresholds th;
    for (std::size_t b = 0; b < bases.size(); ++b) {
        const auto margins = planner::severity_scores(hints::extract_hints(bases[b]), th);
        for (const auto& [task, margin] : margins) {
            if (margin > 0.0) {
                std::ostringstream os;
                os << "make_corpus: base " << b << " is not clean: rule '"
                   << planner::task_name(task) << "' fires with margin " << margin;
                throw std::invalid_argument(os.str());
            }
        }
    }

    const std::size_t total = static_cast<std::size_t>(n_per_class) * planner::kTaskOrder.size();
    std::vector<CorpusItem> corpus(total);
    parallel_for(total, threads, [&](std::size_t index) {
        const planner::TaskToken task =
            planner::kTaskOrder[index / static_cast<std::size_t>(n_per_class)];
        const std::uint64_t item_seed = mix_seed(seed, index);
        Rng rng(item_seed);
        const ImageBuffer& base = bases[rng.uniform_int(static_cast<int>(bases.size()))];
        CorpusItem& item = corpus[index];
        item.task = task;
        item.spec = sample_spec(task, rng, mix_seed(item_seed, 0xD15Cull));
        item.image = apply(base, item.spec);
    });
    return corpus;
}

std::string spec_to_json(const DegradationSpec& spec) {
    nlohmann::json j;
    j["kind"] = planner::task_name(spec.kind);
    j["seed"] = spec.seed;
    j["params"] = spec.params;
    return j.dump();
}

DegradationSpec spec_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    DegradationSpec spec;
    spec.kind = planner::task_from_name(j.at("kind").get<std::string>());
    spec.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [key, value] : j.at("params").items()) {
        spec.params[key] = value.get<double>();
    }
    return spec;
}

}  // namespace freqband::degrade
