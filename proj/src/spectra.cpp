#include "freqband/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace freqband::spectra {

double FrequencyResponse::operator()(double omega) const {
    const double w = std::abs(omega);
    switch (kind) {
        case OperatorKind::kIdentity: return 1.0;
        case OperatorKind::kGaussianBlur: return std::exp(-0.5 * (p0 * w) * (p0 * w));
        case OperatorKind::kIdealLowpass: return w <= p0 ? 1.0 : 0.0;
        case OperatorKind::kMaskBand: return (w >= p0 && w <= p1) ? 0.0 : 1.0;
    }
    return 1.0;
}

FrequencyResponse identity_op() { return {OperatorKind::kIdentity, 0.0, 0.0}; }

FrequencyResponse gaussian_blur_op(double scale) {
    if (scale < 0.0) throw std::invalid_argument("gaussian_blur operator: scale must be >= 0");
    return {OperatorKind::kGaussianBlur, scale, 0.0};
}

FrequencyResponse ideal_lowpass_op(double cutoff) {
    if (cutoff < 0.0) throw std::invalid_argument("ideal_lowpass operator: cutoff must be >= 0");
    return {OperatorKind::kIdealLowpass, cutoff, 0.0};
}

FrequencyResponse mask_band_op(double lo, double hi) {
    if (!(lo >= 0.0 && lo < hi)) {
        throw std::invalid_argument("mask_band operator: need 0 <= lo < hi");
    }
    return {OperatorKind::kMaskBand, lo, hi};
}

FrequencyResponse parse_operator(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string part;
        while (std::getline(ss, part, ':')) args.push_back(std::stod(part));
    }
    if (name == "identity" && args.empty()) return identity_op();
    if (name == "gaussian_blur" && args.size() == 1) return gaussian_blur_op(args[0]);
    if (name == "ideal_lowpass" && args.size() == 1) return ideal_lowpass_op(args[0]);
    if (name == "mask_band" && args.size() == 2) return mask_band_op(args[0], args[1]);
    throw std::invalid_argument("unknown operator spec: " + text);
}

std::string operator_name(const FrequencyResponse& op) {
    std::ostringstream os;
    switch (op.kind) {
        case OperatorKind::kIdentity: return "identity";
        case OperatorKind::kGaussianBlur: os << "gaussian_blur:" << op.p0; break;
        case OperatorKind::kIdealLowpass: os << "ideal_lowpass:" << op.p0; break;
        case OperatorKind::kMaskBand: os << "mask_band:" << op.p0 << ":" << op.p1; break;
    }
    return os.str();
}

double s_xx(double omega_norm, const SpectralConfig& cfg) {
    if (cfg.kappa <= 0.0) throw std::invalid_argument("SpectralConfig: kappa must be > 0");
    return std::pow(std::max(std::abs(omega_norm), cfg.omega_floor), -cfg.kappa);
}

double xi_lg(double omega_norm, const SpectralConfig& cfg, bool* dc_flag) {
    if (cfg.sigma_eta <= 0.0) throw std::invalid_argument("SpectralConfig: sigma_eta must be > 0");
    if (dc_flag) *dc_flag = false;
    if (omega_norm == 0.0) {  // the power-law prior diverges at DC
        if (dc_flag) *dc_flag = true;
        return 0.0;
    }
    const double h = cfg.h_hat(omega_norm);
    const double h2 = h * h;
    return h2 / (cfg.sigma_eta * cfg.sigma_eta + h2 * s_xx(omega_norm, cfg));
}

double fm_weight(double omega_norm, double xi, double sigma_t) {
    const double w2 = omega_norm * omega_norm;
    return w2 * std::exp(-sigma_t * sigma_t * w2) * xi;
}

std::pair<double, double> tv_accumulation(const std::vector<double>& eps) {
    double prod = 1.0, sum = 0.0;
    for (double e : eps) {
        if (e < 0.0 || e > 1.0) {
            throw std::invalid_argument("tv_accumulation: deviations must lie in [0,1]");
        }
        prod *= 1.0 - e;
        sum += e;
    }
    return {1.0 - prod, sum};
}

void DiscreteDist1D::validate() const {
    if (support.size() != masses.size() || support.empty()) {
        throw std::invalid_argument("DiscreteDist1D: support/mass size mismatch or empty");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (i > 0 && !(support[i] > support[i - 1])) {
            throw std::invalid_argument("DiscreteDist1D: support must be strictly increasing");
        }
        if (masses[i] < 0.0) throw std::invalid_argument("DiscreteDist1D: negative mass");
        sum += masses[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("DiscreteDist1D: masses must sum to 1");
    }
}

double w1_distance(const DiscreteDist1D& p, const DiscreteDist1D& q) {
    p.validate();
    q.validate();
    std::set<double> merged(p.support.begin(), p.support.end());
    merged.insert(q.support.begin(), q.support.end());
    const std::vector<double> grid(merged.begin(), merged.end());

    auto cdf_at = [](const DiscreteDist1D& d, double x) {
        double c = 0.0;
        for (std::size_t i = 0; i < d.support.size() && d.support[i] <= x; ++i) c += d.masses[i];
        return c;
    };

    double w1 = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        w1 += std::abs(cdf_at(p, grid[i]) - cdf_at(q, grid[i])) * (grid[i + 1] - grid[i]);
    }
    return w1;
}

TubeBoundResult tube_bound_check(const DiscreteDist1D& p, const DiscreteDist1D& q,
                                 const std::vector<double>& manifold, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("tube_bound_check: alpha must be > 0");
    if (manifold.empty()) throw std::invalid_argument("tube_bound_check: empty manifold");
    TubeBoundResult r;
    r.w1 = w1_distance(p, q);
    for (std::size_t i = 0; i < q.support.size(); ++i) {
        double dist = std::abs(q.support[i] - manifold[0]);
        for (double m : manifold) dist = std::min(dist, std::abs(q.support[i] - m));
        if (dist > alpha) r.mass_outside += q.masses[i];
    }
    r.lower_bound = alpha * r.mass_outside;
    r.holds = r.w1 >= r.lower_bound - 1e-12;
    return r;
}

std::vector<SpectraRow> tabulate(const std::vector<double>& omegas, const SpectralConfig& cfg) {
    std::vector<SpectraRow> rows;
    rows.reserve(omegas.size());
    for (double w : omegas) {
        SpectraRow row;
        row.omega = w;
        row.h_hat = cfg.h_hat(w);
        row.xi = xi_lg(w, cfg);
        row.w_tilde = fm_weight(w, row.xi, cfg.sigma_t);
        rows.push_back(row);
    }
    return rows;
}

std::string rows_to_csv(const std::vector<SpectraRow>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "omega,h_hat,xi,w_tilde\n";
    for (const SpectraRow& r : rows) {
        os << r.omega << "," << r.h_hat << "," << r.xi << "," << r.w_tilde << "\n";
    }
    return os.str();
}

}  // namespace freqband::spectra
