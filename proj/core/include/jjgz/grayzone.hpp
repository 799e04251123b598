#pragma once

#include "jjgz/coeffs.hpp"
#include "jjgz/params.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace jjgz {

/// Gaussian state of the junction before the drive, in scaled time.
struct InitialState {
    double phi_var = 0.0;      // <phi^2>
    double phi_dot_var = 0.0;  // <(d phi / d t)^2>
};

/// Undamped oscillator in equilibrium at curvature mu_initial:
/// <phi^2> = coth(sqrt(mu)/(2 theta)) / (4 q sqrt(mu)), <phi_dot^2> = mu <phi^2>.
InitialState initial_thermal_state(const DimensionlessParams& p);

enum class GrayZoneVariant { full, asymptotic };

const char* to_string(GrayZoneVariant v) noexcept;

struct GrayZoneResult {
    double delta_ix_over_ic = 0.0;
    std::optional<double> delta_ix;  // amperes, when the critical current is known
    GrayZoneVariant variant = GrayZoneVariant::full;
    double error = 0.0;              // one-sigma, Monte Carlo only

    double C = 0.0, Q1 = 0.0, K1 = 0.0;
    double mc_error_C = 0.0;
    std::optional<bool> plateau_ok;
    std::vector<std::string> warnings;
};

/// Width including the initial-state terms:
///   2 sqrt(pi) sqrt(C + 4 K1^2 <phi^2> + (q/sqrt(beta_c))^2 <phi_dot^2>) / |K1/mu_i + Q1|.
/// The sign of the gain depends on the orientation of the basis functions
/// and is irrelevant to the width. Regime error when the gain vanishes.
GrayZoneResult gray_zone_full(const PropagatorCoeffs& c, const InitialState& s, const DimensionlessParams& p);

/// Long-duration limit 2 sqrt(pi) sqrt(C) / |Q1|.
GrayZoneResult gray_zone_asymptotic(const PropagatorCoeffs& c);

/// Probability of switching for a normalized input current x = Ix/Ic:
/// Phi(-sqrt(2 pi) x / width), Phi the standard normal CDF. Decreasing in
/// x, one half at x = 0, slope -1/width there.
double switching_probability(const PropagatorCoeffs& c, const InitialState& s, const DimensionlessParams& p,
                             double ix_over_ic);

/// Same, for a precomputed width.
double switching_probability(double width, double ix_over_ic);

struct PlateauCheck {
    double spread = 0.0;  // (max - min) / max |value| over the last half
    bool ok = false;      // spread < 0.5 %
};

inline constexpr double plateau_tolerance = 5e-3;

/// Series of (duration, width) with increasing durations; at least three
/// points, otherwise a contract error.
PlateauCheck check_plateau(std::span<const std::pair<double, double>> series);

} // namespace jjgz
