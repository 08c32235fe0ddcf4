#include "nasal/gabor.hpp"

#include "nasal/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace nasal {

namespace {

// FFTW planning is not thread safe; executions on distinct buffers are.
std::mutex fftw_mutex;

struct FftwBuffer {
    fftw_complex* data;
    explicit FftwBuffer(std::size_t n) {
        data = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// Forward/inverse 2D DFT with deterministic FFTW_ESTIMATE plans.
void dft2d(fftw_complex* in, fftw_complex* out, int rows, int cols, int sign) {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_plan plan = fftw_plan_dft_2d(rows, cols, in, out, sign, FFTW_ESTIMATE);
    if (!plan) throw Error("FFTW plan creation failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

// Signed normalized frequency of DFT bin k (Nyquist = 1).
double bin_frequency(Eigen::Index k, Eigen::Index n) {
    auto kk = static_cast<double>(k <= n / 2 ? k : k - n);
    return 2.0 * kk / static_cast<double>(n);
}

}  // namespace

GaborBank::GaborBank(Eigen::Index rows, Eigen::Index cols, const GaborBankParams& params)
    : rows_(rows), cols_(cols), params_(params) {
    if (params.scales < 1 || params.orientations < 1)
        throw Error("Gabor bank needs at least one scale and orientation");
    if (!(params.omega_low > 0.0 && params.omega_low < params.omega_high && params.omega_high <= 1.0))
        throw Error("Gabor bank requires 0 < omega_low < omega_high <= 1");
    if (rows < 4 || cols < 4) throw Error("Gabor bank grid too small");

    const double a = scale_ratio();
    const double sqrt2ln2 = std::sqrt(2.0 * std::log(2.0));
    sigma_u_.resize(static_cast<std::size_t>(params.scales));
    kernels_.reserve(static_cast<std::size_t>(params.scales * params.orientations));

    for (int s = 0; s < params.scales; ++s) {
        double f = center_frequency(s);
        // Half-peak tangency radially between adjacent scales and angularly
        // between adjacent orientations.
        double su = params.scales > 1 ? (a - 1.0) * f / ((a + 1.0) * sqrt2ln2) : 0.25 * f;
        su *= params.radial_overlap;
        double sv = std::tan(M_PI / (2.0 * params.orientations)) * f / sqrt2ln2;
        sv *= params.angular_overlap;
        sigma_u_[static_cast<std::size_t>(s)] = su;

        for (int o = 0; o < params.orientations; ++o) {
            double theta = M_PI * static_cast<double>(o) / params.orientations;
            double ct = std::cos(theta), st = std::sin(theta);
            std::vector<double> kernel(static_cast<std::size_t>(rows * cols));
            for (Eigen::Index r = 0; r < rows; ++r) {
                double fy = bin_frequency(r, rows);
                for (Eigen::Index c = 0; c < cols; ++c) {
                    double fx = bin_frequency(c, cols);
                    // Rotate into the filter frame; single analytic lobe.
                    double u = fx * ct + fy * st;
                    double v = -fx * st + fy * ct;
                    double du = (u - f) / su;
                    double dv = v / sv;
                    kernel[static_cast<std::size_t>(r * cols + c)] =
                        std::exp(-0.5 * (du * du + dv * dv));
                }
            }
            kernel[0] = 0.0;  // DC removed exactly
            kernels_.push_back(std::move(kernel));
        }
    }
}

double GaborBank::center_frequency(int s) const {
    if (params_.scales == 1) return params_.omega_high;
    return params_.omega_low * std::pow(scale_ratio(), s);
}

double GaborBank::scale_ratio() const {
    if (params_.scales == 1) return 1.0;
    return std::pow(params_.omega_high / params_.omega_low,
                    1.0 / static_cast<double>(params_.scales - 1));
}

double GaborBank::spatial_sigma(int s) const {
    // Frequency-domain sigma in cycles/sample is sigma_u/2; the Gaussian pair
    // g(x) = exp(-x^2 / 2 sx^2) <-> G(f) = exp(-f^2 / 2 sf^2) has sx = 1/(2 pi sf).
    double sf = sigma_u_[static_cast<std::size_t>(s)] / 2.0;
    return 1.0 / (2.0 * M_PI * sf);
}

std::vector<std::complex<double>> filter_complex(const Eigen::MatrixXd& values,
                                                 const GaborBank& bank, int s, int o) {
    const auto rows = bank.rows();
    const auto cols = bank.cols();
    if (values.rows() != rows || values.cols() != cols)
        throw Error("filter_complex: dimensions do not match the bank");
    const std::size_t n = static_cast<std::size_t>(rows * cols);

    FftwBuffer in(n), freq(n), out(n);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            auto i = static_cast<std::size_t>(r * cols + c);
            in.data[i][0] = values(r, c);
            in.data[i][1] = 0.0;
        }
    dft2d(in.data, freq.data, static_cast<int>(rows), static_cast<int>(cols), FFTW_FORWARD);

    const auto& kernel = bank.kernel(s, o);
    for (std::size_t i = 0; i < n; ++i) {
        freq.data[i][0] *= kernel[i];
        freq.data[i][1] *= kernel[i];
    }
    dft2d(freq.data, out.data, static_cast<int>(rows), static_cast<int>(cols), FFTW_BACKWARD);

    std::vector<std::complex<double>> result(n);
    const double norm = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        result[i] = std::complex<double>(out.data[i][0] * norm, out.data[i][1] * norm);
    return result;
}

GaborScaleMaps filter_scale_max(const DepthGrid& grid, const GaborBank& bank) {
    const auto rows = grid.rows();
    const auto cols = grid.cols();
    if (rows != bank.rows() || cols != bank.cols())
        throw Error("filter_scale_max: grid does not match the bank dimensions");

    // Subtract the valid mean, zero-fill holes.
    double mean = 0.0;
    long count = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (grid.mask(r, c)) {
                mean += grid.nz(r, c);
                ++count;
            }
    if (count == 0) throw DegenerateInputError("filter_scale_max: empty grid");
    mean /= static_cast<double>(count);

    Eigen::MatrixXd filled = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (grid.mask(r, c)) filled(r, c) = grid.nz(r, c) - mean;

    GaborScaleMaps maps;
    maps.valid = grid.mask;
    maps.ngm.reserve(static_cast<std::size_t>(bank.scales()));
    maps.confident.reserve(static_cast<std::size_t>(bank.scales()));

    for (int s = 0; s < bank.scales(); ++s) {
        Eigen::MatrixXd ngm = Eigen::MatrixXd::Zero(rows, cols);
        for (int o = 0; o < bank.orientations(); ++o) {
            auto response = filter_complex(filled, bank, s, o);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) {
                    double m = std::abs(response[static_cast<std::size_t>(r * cols + c)]);
                    if (m > ngm(r, c)) ngm(r, c) = m;
                }
        }
        maps.ngm.push_back(std::move(ngm));

        // Low confidence within one envelope radius of a hole or the border.
        auto radius = static_cast<Eigen::Index>(
            std::ceil(bank.spatial_sigma(s) * bank.params().confidence_radius_sigma));
        MaskMatrix conf = MaskMatrix::Zero(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                if (!grid.mask(r, c)) continue;
                bool ok = r >= radius && r + radius < rows && c >= radius && c + radius < cols;
                for (Eigen::Index dr = -radius; ok && dr <= radius; ++dr)
                    for (Eigen::Index dc = -radius; ok && dc <= radius; ++dc)
                        if (dr * dr + dc * dc <= radius * radius && !grid.mask(r + dr, c + dc))
                            ok = false;
                conf(r, c) = ok ? 1 : 0;
            }
        }
        maps.confident.push_back(std::move(conf));
    }
    return maps;
}

}  // namespace nasal
