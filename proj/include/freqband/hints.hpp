#ifndef FREQBAND_HINTS_HPP
#define FREQBAND_HINTS_HPP

#include <string>
#include <vector>

#include "freqband/image.hpp"

// Label-free low-level feature pool: one deterministic pass over the image,
// no labels, no learned components. Cue families cover rain, snow, noise,
// blur, haze and exposure, plus the raster size for resolution triggers.

namespace freqband::hints {

struct DegradationHints {
    // rain
    double line_score = 0.0;
    double anisotropy = 0.0;
    double freq_ratio = 0.0;
    // snow
    std::size_t small_blobs = 0;
    double snow_anisotropy = 0.0;
    // noise
    double noise_mad = 0.0;
    double chroma_std = 0.0;
    double noise_score = 0.0;
    // blur
    double lap_var = 0.0;
    double hf_energy = 0.0;
    double grad95 = 0.0;
    // haze
    double dark_mean = 0.0;
    double sat_mean = 0.0;
    double depth_grad = 0.0;
    double haze_score = 0.0;
    // exposure
    double mean_y = 0.0;
    double p50_y = 0.0;

    int height = 0;
    int width = 0;

    std::vector<std::string> flags;  // degenerate-input markers
};

// One named threshold per disambiguation rule; defaults below are the
// recommended values and must not drift.
struct HintThresholds {
    double line_score_min = 0.16;
    double anisotropy_min = 0.40;
    double freq_ratio_min = 1.05;
    double small_blobs_min = 25.0;
    double snow_anisotropy_max = 0.42;
    double noise_score_min = 0.45;
    double grad95_max = 0.17;
    double lap_var_max = 0.27;
    double hf_energy_max = 0.052;
    double haze_score_min = 0.50;
    double depth_grad_min = 0.03;
    double mean_y_max = 0.32;
    double p50_max = 0.26;
    double sr_min_side = 256.0;
};

// Fixed extraction constants (the recommended thresholds assume these).
inline constexpr int kOrientationBins = 36;
inline constexpr double kAnnulusLowHi = 0.10;   // low/inner = (0, 0.10]
inline constexpr double kAnnulusMidHi = 0.30;   // mid = (0.10, 0.30]
inline constexpr double kAnnulusOuterHi = 0.50; // outer = (0.30, 0.50]
inline constexpr double kSpectrumEps = 1e-8;
inline constexpr double kFreqRatioCap = 1e4;
inline constexpr double kSnowLumaThreshold = 0.78;
inline constexpr std::size_t kBlobAreaMin = 3;
inline constexpr std::size_t kBlobAreaMax = 200;

struct RainCues {
    double line_score = 0.0;
    double anisotropy = 0.0;
    double freq_ratio = 0.0;
};

struct SnowCues {
    std::size_t small_blobs = 0;
    double snow_anisotropy = 0.0;
};

struct NoiseCues {
    double noise_mad = 0.0;
    double chroma_std = 0.0;
    double noise_score = 0.0;
    bool flat_mask_empty = false;
};

struct BlurCues {
    double lap_var = 0.0;
    double hf_energy = 0.0;
    double grad95 = 0.0;
};

struct HazeCues {
    double dark_mean = 0.0;
    double sat_mean = 0.0;
    double depth_grad = 0.0;
    double haze_score = 0.0;
};

struct ExposureCues {
    double mean_y = 0.0;
    double p50_y = 0.0;
};

RainCues rain_cues(const GrayImage& g);
SnowCues snow_cues(const GrayImage& g);
NoiseCues noise_cues(const ImageBuffer& img);
BlurCues blur_cues(const GrayImage& g);
HazeCues haze_cues(const ImageBuffer& img);  // 3-channel input required
ExposureCues exposure_cues(const ImageBuffer& img);

// Closed-form sigmoid composites; kept callable on raw inputs so scores can
// be cross-checked without an image.
double noise_score_from(double noise_mad, double chroma_std);
double haze_score_from(double dark_mean, double sat_mean, double depth_grad);

// Populates every field in a single deterministic pass. Grayscale input gets
// chroma-dependent cues computed on a replicated-channel image and flagged.
DegradationHints extract_hints(const ImageBuffer& img);

// Flat JSON object with exactly the hint field names plus a "flags" array.
std::string hints_to_json(const DegradationHints& h);

}  // namespace freqband::hints

#endif
