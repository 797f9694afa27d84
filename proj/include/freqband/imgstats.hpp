#ifndef FREQBAND_IMGSTATS_HPP
#define FREQBAND_IMGSTATS_HPP

#include <utility>
#include <vector>

#include "freqband/image.hpp"

// Foundational image numerics: color transforms, gradients, filters,
// quantiles, connected components and radial power spectra. All functions
// are pure; everything uses edge-replicate padding so constant images map
// to constant images exactly.

namespace freqband::imgstats {

struct SobelResult {
    GrayImage gx;
    GrayImage gy;
    GrayImage magnitude;
};

struct SpectrumBin {
    double radius_low = 0.0;
    double radius_high = 0.0;
    double mean_power = 0.0;
    std::size_t sample_count = 0;
    bool empty = false;  // no frequency sample fell inside the annulus
};

// Radial average of the 2-D power spectrum. Radii are fractions of the
// sampling rate, r = sqrt((u/H)^2 + (v/W)^2), analysed over the Nyquist
// disc r <= 0.5; the DC term is removed by mean subtraction beforehand.
// normalization carries the total AC power inside the disc, so annuli
// covering (0, 0.5] satisfy Parseval against it.
struct RadialSpectrum {
    std::vector<SpectrumBin> bins;
    double normalization = 0.0;
};

// BT.601 luma; channels==1 passes through.
GrayImage to_gray(const ImageBuffer& img);

// Full-range BT.601 Y/Cb/Cr planes (Cb, Cr centered on 0.5).
void ycbcr_planes(const ImageBuffer& img, GrayImage& y, GrayImage& cb, GrayImage& cr);

// Per-pixel HSV saturation (hexcone model); 3-channel input required.
GrayImage hsv_saturation(const ImageBuffer& img);

// Per-pixel min over channels.
GrayImage dark_channel(const ImageBuffer& img);

// 3x3 Sobel with edge-replicate padding, raw (unnormalized) response.
SobelResult sobel_gradients(const GrayImage& g);

// Gradient orientations mod pi, binned uniformly over [0, pi), each pixel
// weighted by its magnitude. Returns raw bin masses.
std::vector<double> orientation_histogram(const GrayImage& gx, const GrayImage& gy,
                                          const GrayImage& magnitude, int num_bins);

// Linear-interpolation quantile on the sorted copy. Empty input throws.
double quantile(std::vector<double> values, double q);

// Population mean / variance over a raster.
double mean_of(const GrayImage& g);
double variance_of(const GrayImage& g);

// Areas of 8-connected components of a {0,1} mask.
std::vector<std::size_t> connected_components(const GrayImage& mask);

// annuli: non-overlapping (r_lo, r_hi] pairs with radii in [0, 0.5].
RadialSpectrum radial_power_spectrum(const GrayImage& g,
                                     const std::vector<std::pair<double, double>>& annuli);

GrayImage box_mean(const GrayImage& g, int k);

// 5-point kernel [[0,1,0],[1,-4,1],[0,1,0]].
GrayImage laplacian(const GrayImage& g);

// Truncated Gaussian, radius = ceil(3*sigma), taps renormalized.
GrayImage gaussian_blur(const GrayImage& g, double sigma);

}  // namespace freqband::imgstats

#endif
