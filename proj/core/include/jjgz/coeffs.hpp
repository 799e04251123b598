#pragma once

#include "jjgz/bvp.hpp"
#include "jjgz/params.hpp"
#include "jjgz/waveform.hpp"

#include <cstdint>
#include <iosfwd>

namespace jjgz {

enum class NoiseMethod { quadrature, monte_carlo };

const char* to_string(NoiseMethod m) noexcept;

/// Parameters of the Gaussian propagator, in units where the common
/// prefactor is q. Only K1, Q1 and C enter the gray-zone width.
struct PropagatorCoeffs {
    double K1 = 0.0, K2 = 0.0, N = 0.0, L = 0.0, Q1 = 0.0, Q2 = 0.0;
    double A = 0.0, B = 0.0, C = 0.0;
    double mc_error_A = 0.0, mc_error_B = 0.0, mc_error_C = 0.0;
    NoiseMethod method = NoiseMethod::quadrature;
};

struct BilinearCoeffs {
    double K1 = 0.0, K2 = 0.0, N = 0.0, L = 0.0, Q1 = 0.0, Q2 = 0.0;
};

/// Trapezoidal quadrature of the bilinear coefficient integrals over the
/// grid nodes of `sol`. Contract error if `sol` and `w` disagree on the
/// interval.
BilinearCoeffs compute_bilinear(const BvpSolution& sol, const Waveform& w, const DimensionlessParams& p);

/// nu coth(nu / (2 theta)); equals nu at theta = 0 and tends to 2 theta as
/// nu -> 0.
double coth_kernel(double nu, double theta);

enum class NoiseKernel {
    quantum,    // nu coth(nu / 2 theta)
    classical,  // white-noise substitute 2 theta
};

struct NoiseCoeffs {
    double A = 0.0, B = 0.0, C = 0.0;
    double error_A = 0.0, error_B = 0.0, error_C = 0.0;
    std::size_t panels = 0;        // quadrature only
    std::size_t evaluations = 0;
    double chi2_dof = 0.0;         // Monte Carlo only, worst of the three
};

struct NoiseQuadratureOptions {
    double rel_tol = 1e-6;
    std::size_t max_panels = 20000;
    NoiseKernel kernel = NoiseKernel::quantum;
    /// Drive the error control by C alone. A and B are still estimated; B
    /// oscillates in nu with the distance between b1 and b2 and can dominate
    /// the cost on long drives.
    bool c_only = false;
};

/// Separable reduction: cos(nu(t - s)) factorizes, so each double time
/// integral becomes a combination of cosine and sine transforms of b1, b2
/// evaluated exactly for the cubic Hermite interpolants, leaving a 1-D nu
/// integral over [0, omega_cut] done by adaptive Gauss-Kronrod panels.
NoiseCoeffs compute_noise_quadrature(const BvpSolution& sol, const DimensionlessParams& p,
                                     const NoiseQuadratureOptions& options = {});

/// Samples the nu integrand of A, B, C on a uniform nu grid (debug output).
void write_noise_integrand_csv(std::ostream& out, const BvpSolution& sol, const DimensionlessParams& p,
                               std::size_t n_points, NoiseKernel kernel = NoiseKernel::quantum);

struct McConfig {
    std::size_t sample_budget = 1'000'000;  // evaluations per coefficient
    std::size_t n_adapt_iterations = 8;
    std::size_t stratification_bins = 16;   // strata per axis (upper bound)
    std::size_t importance_bins = 64;       // adaptive grid bins per axis
    std::uint64_t rng_seed = 0x5eed'1234ULL;
    std::size_t workers = 0;                // 0: hardware concurrency
    NoiseKernel kernel = NoiseKernel::quantum;
};

/// Boundary between the direct low-frequency form and the twice integrated
/// by parts high-frequency form of the Monte Carlo integrand, in units of
/// omega_p, and the share of the budget spent below it.
inline constexpr double low_band_limit = 1.1;
inline constexpr double low_band_share = 0.5;

/// VEGAS-style 3-D Monte Carlo over (nu, t, s) in [0, omega_cut] x [0, t_end]^2.
/// Reproducible for a fixed seed and independent of the worker count.
NoiseCoeffs compute_noise_vegas(const BvpSolution& sol, const DimensionlessParams& p, const McConfig& cfg);

struct CoefficientOptions {
    NoiseMethod method = NoiseMethod::quadrature;
    NoiseQuadratureOptions quadrature;
    McConfig monte_carlo;
};

PropagatorCoeffs compute_coefficients(const BvpSolution& sol, const Waveform& w, const DimensionlessParams& p,
                                      const CoefficientOptions& options = {});

/// A >= 0, C >= 0, |B| <= 2 sqrt(AC) (with a relative slack for round-off),
/// all finite.
bool satisfies_invariants(const PropagatorCoeffs& c, double slack = 1e-9);

} // namespace jjgz
