#ifndef FREQBAND_IMAGE_HPP
#define FREQBAND_IMAGE_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace freqband {

// H x W (x3) raster, values in [0,1], row-major, channel-interleaved.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    int channels = 0;  // 1 or 3
    std::vector<double> data;

    ImageBuffer() = default;
    ImageBuffer(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, fill) {}

    double& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height) * width;
    }
};

// Single-channel real raster, row-major.
struct GrayImage {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int y, int x) {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    double at(int y, int x) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t size() const { return data.size(); }
};

// Throws std::invalid_argument when the buffer violates its invariants
// (finite values in [0,1], size >= 8x8, channels 1 or 3).
void validate(const ImageBuffer& img);
void validate(const GrayImage& g);

}  // namespace freqband

#endif
