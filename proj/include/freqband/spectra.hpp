#ifndef FREQBAND_SPECTRA_HPP
#define FREQBAND_SPECTRA_HPP

#include <string>
#include <utility>
#include <vector>

// Numerical demonstrators for the spectral-bias theory: the posterior
// information weight of a linear-Gaussian degradation, the flow-matching
// spectral weight and its frequency biases, the total-variation
// accumulation bound, and the Wasserstein-1 tube bound on 1-D discrete
// distributions.

namespace freqband::spectra {

enum class OperatorKind { kIdentity, kGaussianBlur, kIdealLowpass, kMaskBand };

// |H(omega)| for the bundled shift-invariant operators; all lie in [0,1].
struct FrequencyResponse {
    OperatorKind kind = OperatorKind::kIdentity;
    double p0 = 0.0;  // blur scale, lowpass cutoff, or band lower edge
    double p1 = 0.0;  // band upper edge

    double operator()(double omega) const;
};

FrequencyResponse identity_op();
FrequencyResponse gaussian_blur_op(double scale);
FrequencyResponse ideal_lowpass_op(double cutoff);
FrequencyResponse mask_band_op(double lo, double hi);  // response 0 on [lo,hi]

// Parses "identity", "gaussian_blur:S", "ideal_lowpass:C", "mask_band:LO:HI".
FrequencyResponse parse_operator(const std::string& text);
std::string operator_name(const FrequencyResponse& op);

struct SpectralConfig {
    double kappa = 2.0;       // prior spectrum decay exponent, > 0
    double sigma_eta = 0.1;   // measurement noise, > 0
    double sigma_t = 1.0;     // smoothing scale, >= 0
    FrequencyResponse h_hat;  // forward-operator frequency response
    double omega_floor = 1.0 / 1024.0;  // tabulation floor against the DC pole
};

// Prior power spectrum ||omega||^-kappa with the configured floor.
double s_xx(double omega_norm, const SpectralConfig& cfg);

// |H|^2 / (sigma_eta^2 + |H|^2 S_xx). Zero frequency is defined as 0 and
// reported through the optional flag.
double xi_lg(double omega_norm, const SpectralConfig& cfg, bool* dc_flag = nullptr);

// omega^2 * exp(-sigma_t^2 omega^2) * xi
double fm_weight(double omega_norm, double xi, double sigma_t);

// (1 - prod(1 - eps_t), sum eps_t); inputs must lie in [0,1].
std::pair<double, double> tv_accumulation(const std::vector<double>& eps);

struct DiscreteDist1D {
    std::vector<double> support;  // strictly increasing
    std::vector<double> masses;   // non-negative, sum to 1 within 1e-12

    void validate() const;
};

// Exact 1-D Wasserstein-1 via CDF-difference integration over the merged
// support.
double w1_distance(const DiscreteDist1D& p, const DiscreteDist1D& q);

struct TubeBoundResult {
    double w1 = 0.0;
    double mass_outside = 0.0;  // q-mass strictly outside the alpha-tube
    double lower_bound = 0.0;   // alpha * mass_outside
    bool holds = false;
};

// Checks W1(p, q) >= alpha * (q-mass outside the alpha-neighborhood of the
// manifold points).
TubeBoundResult tube_bound_check(const DiscreteDist1D& p, const DiscreteDist1D& q,
                                 const std::vector<double>& manifold, double alpha);

struct SpectraRow {
    double omega = 0.0;
    double h_hat = 0.0;
    double xi = 0.0;
    double w_tilde = 0.0;
};

// Tabulates (omega, h_hat, xi, w_tilde) over the grid.
std::vector<SpectraRow> tabulate(const std::vector<double>& omegas, const SpectralConfig& cfg);

// CSV with header "omega,h_hat,xi,w_tilde".
std::string rows_to_csv(const std::vector<SpectraRow>& rows);

}  // namespace freqband::spectra

#endif
