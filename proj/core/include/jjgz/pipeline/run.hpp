#pragma once

#include "jjgz/coeffs.hpp"
#include "jjgz/grayzone.hpp"
#include "jjgz/ic_temperature.hpp"
#include "jjgz/params.hpp"
#include "jjgz/waveform.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jjgz {

/// Built-in drive or a waveform table. Unset times take the defaults for
/// the current beta_c: the switch after lead_time(beta_c), then
/// settle_margin(beta_c) of settling. A duration without a switch time
/// centres the switch.
struct WaveformSpec {
    WaveformKind kind = WaveformKind::instantaneous_step;
    std::optional<double> duration;
    std::optional<double> switch_time;
    double ramp_width = 1.0;
    std::optional<double> mu_final;  // defaults to -mu_initial
    std::string table_path;
    std::optional<TableColumn> table_column;
};

enum class SweepAxis { temperature, beta_c, duration, lambda };

const char* to_string(SweepAxis axis) noexcept;

struct SweepSpec {
    SweepAxis axis = SweepAxis::temperature;
    std::vector<double> values;
};

enum class OutputFormat { csv, json };

struct RunConfig {
    /// When set, the dimensionless block is derived from it and ampere
    /// values are reported.
    std::optional<PhysicalParams> physical;
    DimensionlessParams dimensionless;
    WaveformSpec waveform;
    std::optional<double> lambda;  // source inductance; unset means none
    std::optional<SweepSpec> sweep;
    CoefficientOptions coefficients;
    GrayZoneVariant variant = GrayZoneVariant::full;
    bool plateau_check = true;
    std::optional<double> max_step;
    bool richardson = true;
    IcTemperatureModel ic_model = ConstantIc{};
    std::size_t workers = 0;  // sweep rows in flight; 0: hardware concurrency
    OutputFormat format = OutputFormat::csv;
    std::string output_path;
    std::vector<double> ix_values;  // probability curve abscissae (Ix/Ic)

    /// Configuration error for contradictory or incomplete settings.
    void validate() const;
};

struct SweepRow {
    std::string axis = "none";
    double value = 0.0;
    double delta_ix_over_ic = 0.0;
    std::optional<double> delta_ix_amperes;
    double err = 0.0;
    std::optional<bool> plateau_ok;
    double C = 0.0, Q1 = 0.0, K1 = 0.0;
    std::string status = "ok";  // "ok" or "<error kind>: <message>"
    std::vector<std::string> warnings;

    bool ok() const { return status == "ok"; }
};

/// Everything the pipeline computed for one point.
struct PointResult {
    DimensionlessParams params;
    Waveform waveform;
    BvpSolution bvp;
    PropagatorCoeffs coeffs;
    GrayZoneResult gray_zone;
    InitialState initial;
    std::optional<double> critical_current;  // A, after any Ic(T) scaling
};

/// Parameters and waveform for the configuration, before any solving.
DimensionlessParams resolve_params(const RunConfig& cfg, std::optional<double>* critical_current = nullptr);
Waveform build_waveform(const RunConfig& cfg, const DimensionlessParams& p);

/// model -> bvp -> coeffs -> grayzone for one point, without the plateau
/// check. Regime error when the drive has no sign inversion.
PointResult evaluate_point(const RunConfig& cfg);

/// evaluate_point plus, unless disabled, the plateau check over the
/// durations D, 2D, 4D (quadrature noise, full variant).
SweepRow run_single(const RunConfig& cfg);

/// Copy of `cfg` with one sweep axis set to `value`.
RunConfig at_sweep_value(const RunConfig& cfg, SweepAxis axis, double value);

/// One row per sweep value in ascending order. Row failures are recorded
/// in the status column; the rows do not depend on the worker count.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);

/// (Ix/Ic, switching probability) over cfg.ix_values.
std::vector<std::pair<double, double>> probability_curve(const RunConfig& cfg, double* width = nullptr);

} // namespace jjgz
