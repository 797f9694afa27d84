#include "freqband/image.hpp"

#include <cmath>
#include <string>

namespace freqband {

void validate(const ImageBuffer& img) {
    if (img.channels != 1 && img.channels != 3) {
        throw std::invalid_argument("ImageBuffer: channels must be 1 or 3, got " +
                                    std::to_string(img.channels));
    }
    if (img.height < 8 || img.width < 8) {
        throw std::invalid_argument("ImageBuffer: size must be at least 8x8, got " +
                                    std::to_string(img.height) + "x" + std::to_string(img.width));
    }
    const std::size_t expected =
        static_cast<std::size_t>(img.height) * img.width * img.channels;
    if (img.data.size() != expected) {
        throw std::invalid_argument("ImageBuffer: data length does not match dimensions");
    }
    for (double v : img.data) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw std::invalid_argument("ImageBuffer: values must be finite and in [0,1]");
        }
    }
}

void validate(const GrayImage& g) {
    if (g.height <= 0 || g.width <= 0) {
        throw std::invalid_argument("GrayImage: empty image");
    }
    if (g.data.size() != static_cast<std::size_t>(g.height) * g.width) {
        throw std::invalid_argument("GrayImage: data length does not match dimensions");
    }
    for (double v : g.data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("GrayImage: values must be finite");
        }
    }
}

}  // namespace freqband
