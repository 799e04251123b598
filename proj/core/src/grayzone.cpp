#include "jjgz/grayzone.hpp"

#include "jjgz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace jjgz {

namespace {

const double two_sqrt_pi = 2.0 * std::sqrt(std::numbers::pi);

void require_finite(const PropagatorCoeffs& c)
{
    for (double v : {c.K1, c.Q1, c.C})
        if (!std::isfinite(v))
            throw Error(ErrorKind::contract, "grayzone", "propagator coefficients must be finite");
    if (c.C < 0.0)
        throw Error(ErrorKind::contract, "grayzone", "noise coefficient C must be non-negative");
}

GrayZoneResult with_diagnostics(const PropagatorCoeffs& c, GrayZoneVariant v)
{
    GrayZoneResult r;
    r.variant = v;
    r.C = c.C;
    r.Q1 = c.Q1;
    r.K1 = c.K1;
    r.mc_error_C = c.mc_error_C;
    return r;
}

} // namespace

const char* to_string(GrayZoneVariant v) noexcept
{
    return v == GrayZoneVariant::full ? "full" : "asymptotic";
}

InitialState initial_thermal_state(const DimensionlessParams& p)
{
    if (!(p.mu_initial > 0.0))
        throw Error(ErrorKind::domain, "grayzone", "initial curvature must be positive");
    const double w = std::sqrt(p.mu_initial);
    // coth(w / 2 theta), with coth -> 1 at theta = 0.
    const double coth = p.theta > 0.0 ? coth_kernel(w, p.theta) / w : 1.0;
    InitialState s;
    s.phi_var = coth / (4.0 * p.q * w);
    s.phi_dot_var = p.mu_initial * s.phi_var;
    return s;
}

GrayZoneResult gray_zone_full(const PropagatorCoeffs& c, const InitialState& s, const DimensionlessParams& p)
{
    require_finite(c);
    const double gain = c.K1 / p.mu_initial + c.Q1;
    if (!(std::abs(gain) > 0.0) || !std::isfinite(gain))
        throw Error(ErrorKind::regime, "grayzone", "no deterministic switching gain; waveform or duration invalid",
                    "check that the drive inverts the curvature and settles afterwards");
    const double velocity_scale = p.q / std::sqrt(p.beta_c);
    const double variance = c.C + 4.0 * c.K1 * c.K1 * s.phi_var + velocity_scale * velocity_scale * s.phi_dot_var;
    GrayZoneResult r = with_diagnostics(c, GrayZoneVariant::full);
    r.delta_ix_over_ic = two_sqrt_pi * std::sqrt(variance) / std::abs(gain);
    if (c.method == NoiseMethod::monte_carlo && variance > 0.0)
        r.error = r.delta_ix_over_ic * 0.5 * c.mc_error_C / variance;
    return r;
}

GrayZoneResult gray_zone_asymptotic(const PropagatorCoeffs& c)
{
    require_finite(c);
    if (!(std::abs(c.Q1) > 0.0))
        throw Error(ErrorKind::regime, "grayzone", "no deterministic switching gain; waveform or duration invalid",
                    "check that the drive inverts the curvature and settles afterwards");
    GrayZoneResult r = with_diagnostics(c, GrayZoneVariant::asymptotic);
    r.delta_ix_over_ic = two_sqrt_pi * std::sqrt(c.C) / std::abs(c.Q1);
    if (c.method == NoiseMethod::monte_carlo && c.C > 0.0)
        r.error = r.delta_ix_over_ic * 0.5 * c.mc_error_C / c.C;
    return r;
}

double switching_probability(double width, double ix_over_ic)
{
    if (!(width > 0.0) || !std::isfinite(width))
        throw Error(ErrorKind::domain, "grayzone", "gray-zone width must be positive and finite");
    const double z = -std::sqrt(2.0 * std::numbers::pi) * ix_over_ic / width;
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double switching_probability(const PropagatorCoeffs& c, const InitialState& s, const DimensionlessParams& p,
                             double ix_over_ic)
{
    return switching_probability(gray_zone_full(c, s, p).delta_ix_over_ic, ix_over_ic);
}

PlateauCheck check_plateau(std::span<const std::pair<double, double>> series)
{
    if (series.size() < 3)
        throw Error(ErrorKind::contract, "grayzone", "plateau check needs at least three durations");
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].first > series[i - 1].first))
            throw Error(ErrorKind::contract, "grayzone", "plateau durations must increase");
    const auto tail = series.subspan(series.size() / 2);
    double lo = tail.front().second, hi = lo, scale = 0.0;
    for (const auto& [d, v] : tail) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        scale = std::max(scale, std::abs(v));
    }
    PlateauCheck out;
    out.spread = scale > 0.0 ? (hi - lo) / scale : 0.0;
    out.ok = out.spread < plateau_tolerance;
    return out;
}

} // namespace jjgz
