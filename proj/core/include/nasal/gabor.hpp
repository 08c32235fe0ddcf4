#pragma once

#include "nasal/depth_grid.hpp"

#include <complex>
#include <vector>

namespace nasal {

/// Frequency-domain Gabor filter bank in the Manjunath style: center
/// frequencies geometrically spaced in [omega_low, omega_high] (normalized to
/// Nyquist = 1), orientations uniform over [0, pi), per-scale Gaussian widths
/// chosen for half-peak tangency between neighbors. Every kernel has its DC
/// coefficient forced to exactly zero.
struct GaborBankParams {
    int scales = 4;
    int orientations = 4;
    double omega_low = 0.05;
    double omega_high = 0.7;
    // Width multipliers; 1.0 = half-peak tangency.
    double radial_overlap = 1.0;
    double angular_overlap = 1.0;
    // Low-confidence dilation radius, in units of the spatial envelope sigma.
    double confidence_radius_sigma = 1.0;
};

class GaborBank {
public:
    GaborBank(Eigen::Index rows, Eigen::Index cols, const GaborBankParams& params);

    int scales() const { return params_.scales; }
    int orientations() const { return params_.orientations; }
    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    const GaborBankParams& params() const { return params_; }

    /// Center frequency of scale s (0-based), Nyquist units.
    double center_frequency(int s) const;
    /// Geometric spacing ratio between consecutive scale center frequencies.
    double scale_ratio() const;
    /// Spatial envelope sigma of scale s, in pixels.
    double spatial_sigma(int s) const;

    /// Frequency-domain kernel, row-major rows x cols, unshifted FFT layout.
    const std::vector<double>& kernel(int s, int o) const {
        return kernels_[static_cast<std::size_t>(s * params_.orientations + o)];
    }

private:
    Eigen::Index rows_, cols_;
    GaborBankParams params_;
    std::vector<std::vector<double>> kernels_;
    std::vector<double> sigma_u_;  // radial width per scale, Nyquist units
};

/// Per-scale orientation-max magnitude responses plus validity/confidence.
struct GaborScaleMaps {
    std::vector<Eigen::MatrixXd> ngm;      // scales x (rows x cols), >= 0
    std::vector<MaskMatrix> confident;     // valid and far enough from holes
    MaskMatrix valid;                      // copy of the input mask
};

/// Complex filter response of one kernel (pre-modulus), for linearity checks
/// and probes. Input values are used as-is (no mean removal).
std::vector<std::complex<double>> filter_complex(const Eigen::MatrixXd& values,
                                                 const GaborBank& bank, int s, int o);

/// The orientation-max pipeline: subtract the valid-region mean, zero-fill
/// invalid pixels, filter with every kernel, and keep per scale the pixelwise
/// maximum magnitude over orientations. Pixels within one confidence radius of
/// an invalid pixel or the grid border are flagged low-confidence per scale.
GaborScaleMaps filter_scale_max(const DepthGrid& grid, const GaborBank& bank);

}  // namespace nasal
