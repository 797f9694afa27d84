#include "freqband/imgstats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace freqband::imgstats {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Applies a zero-sum 3x3 stencil in center-relative form so constant
// images map to exactly zero.
GrayImage conv3_zero_sum(const GrayImage& g, const double (&k)[3][3]) {
    GrayImage out(g.height, g.width);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const double c = g.at(y, x);
            double acc = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = clampi(y + dy, 0, g.height - 1);
                for (int dx = -1; dx <= 1; ++dx) {
                    const double w = k[dy + 1][dx + 1];
                    if (w == 0.0) continue;
                    const int xx = clampi(x + dx, 0, g.width - 1);
                    acc += w * (g.at(yy, xx) - c);
                }
            }
            out.at(y, x) = acc;
        }
    }
    return out;
}

// Separable 1-D pass with replicate padding; taps sum to 1. The
// center-relative form keeps constant rows/columns bit-exact.
void pass_1d(const GrayImage& in, GrayImage& out, const std::vector<double>& taps,
             bool along_x) {
    const int radius = static_cast<int>(taps.size()) / 2;
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            const double c = in.at(y, x);
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                const int yy = along_x ? y : clampi(y + t, 0, in.height - 1);
                const int xx = along_x ? clampi(x + t, 0, in.width - 1) : x;
                acc += taps[t + radius] * (in.at(yy, xx) - c);
            }
            out.at(y, x) = c + acc;
        }
    }
}

std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

GrayImage to_gray(const ImageBuffer& img) {
    validate(img);
    GrayImage g(img.height, img.width);
    if (img.channels == 1) {
        g.data = img.data;
        return g;
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            g.at(y, x) = 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) +
                         0.114 * img.at(y, x, 2);
        }
    }
    return g;
}

void ycbcr_planes(const ImageBuffer& img, GrayImage& y, GrayImage& cb, GrayImage& cr) {
    validate(img);
    y = GrayImage(img.height, img.width);
    cb = GrayImage(img.height, img.width);
    cr = GrayImage(img.height, img.width);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double R = img.at(r, c, 0);
            const double G = img.channels == 3 ? img.at(r, c, 1) : R;
            const double B = img.channels == 3 ? img.at(r, c, 2) : R;
            const double luma = 0.299 * R + 0.587 * G + 0.114 * B;
            y.at(r, c) = luma;
            cb.at(r, c) = 0.5 + (B - luma) / 1.772;
            cr.at(r, c) = 0.5 + (R - luma) / 1.402;
        }
    }
}

GrayImage hsv_saturation(const ImageBuffer& img) {
    validate(img);
    if (img.channels != 3) {
        throw std::invalid_argument("hsv_saturation: 3-channel image required");
    }
    GrayImage s(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double mx = std::max({img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)});
            const double mn = std::min({img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)});
            s.at(y, x) = mx > 0.0 ? (mx - mn) / mx : 0.0;
        }
    }
    return s;
}

GrayImage dark_channel(const ImageBuffer& img) {
    validate(img);
    GrayImage d(img.height, img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double mn = img.at(y, x, 0);
            for (int c = 1; c < img.channels; ++c) mn = std::min(mn, img.at(y, x, c));
            d.at(y, x) = mn;
        }
    }
    return d;
}

SobelResult sobel_gradients(const GrayImage& g) {
    validate(g);
    static const double kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    static const double ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    SobelResult r;
    r.gx = conv3_zero_sum(g, kx);
    r.gy = conv3_zero_sum(g, ky);
    r.magnitude = GrayImage(g.height, g.width);
    for (std::size_t i = 0; i < g.size(); ++i) {
        r.magnitude.data[i] = std::hypot(r.gx.data[i], r.gy.data[i]);
    }
    return r;
}

std::vector<double> orientation_histogram(const GrayImage& gx, const GrayImage& gy,
                                          const GrayImage& magnitude, int num_bins) {
    if (num_bins < 2) throw std::invalid_argument("orientation_histogram: num_bins must be >= 2");
    if (gx.size() != gy.size() || gx.size() != magnitude.size()) {
        throw std::invalid_argument("orientation_histogram: shape mismatch");
    }
    std::vector<double> h(static_cast<std::size_t>(num_bins), 0.0);
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double m = magnitude.data[i];
        if (m == 0.0) continue;
        double theta = std::fmod(std::atan2(gy.data[i], gx.data[i]), M_PI);
        if (theta < 0.0) theta += M_PI;
        int bin = static_cast<int>(theta / M_PI * num_bins);
        if (bin >= num_bins) bin = num_bins - 1;
        h[bin] += m;
    }
    return h;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q must be in [0,1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double mean_of(const GrayImage& g) {
    return std::accumulate(g.data.begin(), g.data.end(), 0.0) /
           static_cast<double>(g.size());
}

double variance_of(const GrayImage& g) {
    const double mu = mean_of(g);
    double acc = 0.0;
    for (double v : g.data) acc += (v - mu) * (v - mu);
    return acc / static_cast<double>(g.size());
}

std::vector<std::size_t> connected_components(const GrayImage& mask) {
    validate(mask);
    for (double v : mask.data) {
        if (v != 0.0 && v != 1.0) {
            throw std::invalid_argument("connected_components: mask values must be 0 or 1");
        }
    }
    const int h = mask.height, w = mask.width;
    std::vector<char> seen(mask.size(), 0);
    std::vector<std::size_t> areas;
    std::vector<std::pair<int, int>> stack;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const std::size_t i0 = static_cast<std::size_t>(y0) * w + x0;
            if (mask.data[i0] == 0.0 || seen[i0]) continue;
            std::size_t area = 0;
            seen[i0] = 1;
            stack.push_back({y0, x0});
            while (!stack.empty()) {
                auto [y, x] = stack.back();
                stack.pop_back();
                ++area;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dy == 0 && dx == 0) continue;
                        const int yy = y + dy, xx = x + dx;
                        if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                        const std::size_t ii = static_cast<std::size_t>(yy) * w + xx;
                        if (mask.data[ii] == 1.0 && !seen[ii]) {
                            seen[ii] = 1;
                            stack.push_back({yy, xx});
                        }
                    }
                }
            }
            areas.push_back(area);
        }
    }
    return areas;
}

RadialSpectrum radial_power_spectrum(const GrayImage& g,
                                     const std::vector<std::pair<double, double>>& annuli) {
    validate(g);
    for (std::size_t a = 0; a < annuli.size(); ++a) {
        const auto [lo, hi] = annuli[a];
        if (!(lo >= 0.0 && hi <= 0.5 && lo < hi)) {
            throw std::invalid_argument("radial_power_spectrum: annulus radii must satisfy 0 <= lo < hi <= 0.5");
        }
        for (std::size_t b = a + 1; b < annuli.size(); ++b) {
            const auto [lo2, hi2] = annuli[b];
            if (std::max(lo, lo2) < std::min(hi, hi2)) {
                throw std::invalid_argument("radial_power_spectrum: annuli overlap");
            }
        }
    }

    const int h = g.height, w = g.width;
    const std::size_t n = g.size();
    const double mu = mean_of(g);

    std::vector<std::complex<double>> in(n), out(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = g.data[i] - mu;

    {
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(fftw_plan_mutex());
            plan = fftw_plan_dft_2d(h, w, reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_FORWARD, FFTW_ESTIMATE);
        }
        fftw_execute(plan);
        {
            std::lock_guard<std::mutex> lock(fftw_plan_mutex());
            fftw_destroy_plan(plan);
        }
    }

    RadialSpectrum spec;
    spec.bins.resize(annuli.size());
    std::vector<double> power_sum(annuli.size(), 0.0);
    std::vector<std::size_t> counts(annuli.size(), 0);

    for (int u = 0; u < h; ++u) {
        const int su = u <= h / 2 ? u : u - h;
        const double fu = static_cast<double>(su) / h;
        for (int v = 0; v < w; ++v) {
            const int sv = v <= w / 2 ? v : v - w;
            const double fv = static_cast<double>(sv) / w;
            const double r = std::sqrt(fu * fu + fv * fv);
            if (r == 0.0 || r > 0.5) continue;  // DC out, Nyquist disc only
            const double p = std::norm(out[static_cast<std::size_t>(u) * w + v]);
            spec.normalization += p;
            for (std::size_t a = 0; a < annuli.size(); ++a) {
                if (r > annuli[a].first && r <= annuli[a].second) {
                    power_sum[a] += p;
                    ++counts[a];
                    break;
                }
            }
        }
    }

    for (std::size_t a = 0; a < annuli.size(); ++a) {
        spec.bins[a].radius_low = annuli[a].first;
        spec.bins[a].radius_high = annuli[a].second;
        spec.bins[a].sample_count = counts[a];
        spec.bins[a].empty = counts[a] == 0;
        spec.bins[a].mean_power = counts[a] ? power_sum[a] / static_cast<double>(counts[a]) : 0.0;
    }
    return spec;
}

GrayImage box_mean(const GrayImage& g, int k) {
    validate(g);
    if (k < 1 || k % 2 == 0) throw std::invalid_argument("box_mean: window must be odd and positive");
    const std::vector<double> taps(static_cast<std::size_t>(k), 1.0 / k);
    GrayImage tmp(g.height, g.width), out(g.height, g.width);
    pass_1d(g, tmp, taps, true);
    pass_1d(tmp, out, taps, false);
    return out;
}

GrayImage laplacian(const GrayImage& g) {
    validate(g);
    static const double k[3][3] = {{0, 1, 0}, {1, -4, 1}, {0, 1, 0}};
    return conv3_zero_sum(g, k);
}

GrayImage gaussian_blur(const GrayImage& g, double sigma) {
    validate(g);
    if (sigma <= 0.0) return g;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        taps[t + radius] = std::exp(-0.5 * (t / sigma) * (t / sigma));
        sum += taps[t + radius];
    }
    for (double& v : taps) v /= sum;
    GrayImage tmp(g.height, g.width), out(g.height, g.width);
    pass_1d(g, tmp, taps, true);
    pass_1d(tmp, out, taps, false);
    return out;
}

}  // namespace freqband::imgstats
