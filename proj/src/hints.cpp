#include "freqband/hints.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "freqband/imgstats.hpp"

#include <json.hpp>

namespace freqband::hints {

namespace {

using imgstats::RadialSpectrum;

constexpr double kHistFloor = 1e-12;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct OrientationStats {
    double line_score = 0.0;
    double anisotropy = 0.0;
    bool degenerate = false;
};

OrientationStats orientation_stats(const std::vector<double>& h) {
    OrientationStats s;
    const double total = std::accumulate(h.begin(), h.end(), 0.0);
    if (total < kHistFloor) {
        s.degenerate = true;
        return s;
    }
    const double mx = *std::max_element(h.begin(), h.end());
    const double mean = total / static_cast<double>(h.size());
    s.line_score = mx / total;
    s.anisotropy = (mx - mean) / mean;
    return s;
}

// low = (0, 0.10], mid = (0.10, 0.30], outer = (0.30, 0.50]
RadialSpectrum standard_spectrum(const GrayImage& g) {
    return imgstats::radial_power_spectrum(
        g, {{0.0, kAnnulusLowHi}, {kAnnulusLowHi, kAnnulusMidHi}, {kAnnulusMidHi, kAnnulusOuterHi}});
}

double capped_ratio(double num, double den, std::vector<std::string>* flags,
                    const char* cap_flag) {
    double ratio = num / (den + kSpectrumEps);
    if (den < kSpectrumEps * kSpectrumEps && flags) flags->push_back(cap_flag);
    if (ratio > kFreqRatioCap) ratio = kFreqRatioCap;
    return ratio;
}

// Everything the cue extractors share; computed once per image.
struct Workspace {
    GrayImage gray;
    imgstats::SobelResult sobel;
    std::vector<double> hist;
    RadialSpectrum spectrum;
};

Workspace make_workspace(const GrayImage& g) {
    Workspace w;
    w.gray = g;
    w.sobel = imgstats::sobel_gradients(g);
    w.hist = imgstats::orientation_histogram(w.sobel.gx, w.sobel.gy, w.sobel.magnitude,
                                             kOrientationBins);
    w.spectrum = standard_spectrum(g);
    return w;
}

RainCues rain_from(const Workspace& w, std::vector<std::string>* flags) {
    RainCues c;
    const OrientationStats os = orientation_stats(w.hist);
    if (!os.degenerate) {
        c.line_score = os.line_score;
        c.anisotropy = os.anisotropy;
    }
    c.freq_ratio = capped_ratio(w.spectrum.bins[1].mean_power, w.spectrum.bins[0].mean_power,
                                flags, "freq_ratio_capped");
    return c;
}

SnowCues snow_from(const GrayImage& g, const Workspace& w) {
    SnowCues c;
    GrayImage mask(g.height, g.width);
    for (std::size_t i = 0; i < g.size(); ++i) {
        mask.data[i] = g.data[i] > kSnowLumaThreshold ? 1.0 : 0.0;
    }
    for (std::size_t area : imgstats::connected_components(mask)) {
        if (area >= kBlobAreaMin && area <= kBlobAreaMax) ++c.small_blobs;
    }
    const OrientationStats os = orientation_stats(w.hist);
    c.snow_anisotropy = os.degenerate ? 0.0 : os.anisotropy;
    return c;
}

NoiseCues noise_from(const ImageBuffer& img, const Workspace& w) {
    NoiseCues c;
    const GrayImage& g = w.gray;
    const GrayImage& m = w.sobel.magnitude;

    const double q25 = imgstats::quantile(m.data, 0.25);
    std::vector<std::size_t> flat;
    flat.reserve(m.size() / 4 + 1);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.data[i] < q25) flat.push_back(i);
    }
    if (flat.empty()) {
        c.flat_mask_empty = true;
        flat.resize(m.size());
        std::iota(flat.begin(), flat.end(), std::size_t{0});
    }

    const GrayImage local_mean = imgstats::box_mean(g, 3);
    std::vector<double> residual(flat.size());
    for (std::size_t k = 0; k < flat.size(); ++k) {
        residual[k] = g.data[flat[k]] - local_mean.data[flat[k]];
    }
    const double med = imgstats::quantile(residual, 0.5);
    std::vector<double> absdev(flat.size());
    for (std::size_t k = 0; k < flat.size(); ++k) absdev[k] = std::abs(residual[k] - med);
    c.noise_mad = imgstats::quantile(absdev, 0.5);

    GrayImage y, cb, cr;
    imgstats::ycbcr_planes(img, y, cb, cr);
    auto masked_std = [&flat](const GrayImage& plane) {
        double mean = 0.0;
        for (std::size_t i : flat) mean += plane.data[i];
        mean /= static_cast<double>(flat.size());
        double var = 0.0;
        for (std::size_t i : flat) {
            const double d = plane.data[i] - mean;
            var += d * d;
        }
        return std::sqrt(var / static_cast<double>(flat.size()));
    };
    c.chroma_std = 0.5 * (masked_std(cb) + masked_std(cr));
    c.noise_score = noise_score_from(c.noise_mad, c.chroma_std);
    return c;
}

BlurCues blur_from(const Workspace& w, std::vector<std::string>* flags) {
    BlurCues c;
    c.lap_var = imgstats::variance_of(imgstats::laplacian(w.gray));
    c.hf_energy = capped_ratio(w.spectrum.bins[2].mean_power, w.spectrum.bins[0].mean_power,
                               flags, "hf_energy_capped");
    const GrayImage smoothed = imgstats::gaussian_blur(w.gray, 1.0);
    const imgstats::SobelResult sm = imgstats::sobel_gradients(smoothed);
    c.grad95 = imgstats::quantile(sm.magnitude.data, 0.95);
    return c;
}

HazeCues haze_from(const ImageBuffer& img, const GrayImage& y) {
    HazeCues c;
    c.dark_mean = imgstats::mean_of(imgstats::dark_channel(img));
    c.sat_mean = imgstats::mean_of(imgstats::hsv_saturation(img));

    // symmetric halves; middle row excluded when the height is odd
    const int half = y.height / 2;
    double top = 0.0, bot = 0.0;
    for (int r = 0; r < half; ++r) {
        for (int x = 0; x < y.width; ++x) {
            top += y.at(r, x);
            bot += y.at(y.height - half + r, x);
        }
    }
    const double count = static_cast<double>(half) * y.width;
    c.depth_grad = (top - bot) / count;
    c.haze_score = haze_score_from(c.dark_mean, c.sat_mean, c.depth_grad);
    return c;
}

ExposureCues exposure_from(const GrayImage& y) {
    ExposureCues c;
    c.mean_y = imgstats::mean_of(y);
    c.p50_y = imgstats::quantile(y.data, 0.5);
    return c;
}

ImageBuffer replicate_gray(const ImageBuffer& img) {
    ImageBuffer rgb(img.height, img.width, 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = img.at(y, x, 0);
            rgb.at(y, x, 0) = v;
            rgb.at(y, x, 1) = v;
            rgb.at(y, x, 2) = v;
        }
    }
    return rgb;
}

}  // namespace

double noise_score_from(double noise_mad, double chroma_std) {
    return 0.6 * logistic(50.0 * (noise_mad - 0.0050)) +
           0.4 * logistic(50.0 * (chroma_std - 0.0095));
}

double haze_score_from(double dark_mean, double sat_mean, double depth_grad) {
    return 0.4 * logistic(7.0 * (dark_mean - 0.33)) +
           0.3 * logistic(7.0 * (0.30 - sat_mean)) +
           0.3 * logistic(8.0 * (depth_grad - 0.03));
}

RainCues rain_cues(const GrayImage& g) {
    validate(g);
    const Workspace w = make_workspace(g);
    return rain_from(w, nullptr);
}

SnowCues snow_cues(const GrayImage& g) {
    validate(g);
    const Workspace w = make_workspace(g);
    return snow_from(g, w);
}

NoiseCues noise_cues(const ImageBuffer& img) {
    validate(img);
    const ImageBuffer& rgb = img;
    const Workspace w = make_workspace(imgstats::to_gray(rgb));
    return noise_from(rgb, w);
}

BlurCues blur_cues(const GrayImage& g) {
    validate(g);
    const Workspace w = make_workspace(g);
    return blur_from(w, nullptr);
}

HazeCues haze_cues(const ImageBuffer& img) {
    validate(img);
    if (img.channels != 3) {
        throw std::invalid_argument("haze_cues: 3-channel image required (chroma cues)");
    }
    return haze_from(img, imgstats::to_gray(img));
}

ExposureCues exposure_cues(const ImageBuffer& img) {
    validate(img);
    return exposure_from(imgstats::to_gray(img));
}

DegradationHints extract_hints(const ImageBuffer& img) {
    validate(img);
    DegradationHints h;

    ImageBuffer rgb;
    if (img.channels == 1) {
        rgb = replicate_gray(img);
        h.flags.push_back("gray_replicated");
    } else {
        rgb = img;
    }

    const Workspace w = make_workspace(imgstats::to_gray(rgb));

    const RainCues rain = rain_from(w, &h.flags);
    h.line_score = rain.line_score;
    h.anisotropy = rain.anisotropy;
    h.freq_ratio = rain.freq_ratio;

    const SnowCues snow = snow_from(w.gray, w);
    h.small_blobs = snow.small_blobs;
    h.snow_anisotropy = snow.snow_anisotropy;

    const NoiseCues noise = noise_from(rgb, w);
    h.noise_mad = noise.noise_mad;
    h.chroma_std = noise.chroma_std;
    h.noise_score = noise.noise_score;
    if (noise.flat_mask_empty) h.flags.push_back("flat_mask_empty");

    const BlurCues blur = blur_from(w, &h.flags);
    h.lap_var = blur.lap_var;
    h.hf_energy = blur.hf_energy;
    h.grad95 = blur.grad95;

    const HazeCues haze = haze_from(rgb, w.gray);
    h.dark_mean = haze.dark_mean;
    h.sat_mean = haze.sat_mean;
    h.depth_grad = haze.depth_grad;
    h.haze_score = haze.haze_score;

    const ExposureCues expo = exposure_from(w.gray);
    h.mean_y = expo.mean_y;
    h.p50_y = expo.p50_y;

    h.height = img.height;
    h.width = img.width;
    return h;
}

std::string hints_to_json(const DegradationHints& h) {
    nlohmann::json j;
    j["line_score"] = h.line_score;
    j["anisotropy"] = h.anisotropy;
    j["freq_ratio"] = h.freq_ratio;
    j["small_blobs"] = h.small_blobs;
    j["snow_anisotropy"] = h.snow_anisotropy;
    j["noise_mad"] = h.noise_mad;
    j["chroma_std"] = h.chroma_std;
    j["noise_score"] = h.noise_score;
    j["lap_var"] = h.lap_var;
    j["hf_energy"] = h.hf_energy;
    j["grad95"] = h.grad95;
    j["dark_mean"] = h.dark_mean;
    j["sat_mean"] = h.sat_mean;
    j["depth_grad"] = h.depth_grad;
    j["haze_score"] = h.haze_score;
    j["mean_y"] = h.mean_y;
    j["p50_y"] = h.p50_y;
    j["height"] = h.height;
    j["width"] = h.width;
    j["flags"] = h.flags;
    return j.dump();
}

}  // namespace freqband::hints
