#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jjgz {

enum class WaveformKind { instantaneous_step, tanh_ramp, piecewise_linear_table };

enum class TableColumn { mu, phi_e };

const char* to_string(WaveformKind kind) noexcept;

/// Drive curvature mu(t) = cos(phi_e(t)/2) on [0, t_end], time in units of
/// 1/omega_p. Immutable; all transformations return new waveforms.
class Waveform {
public:
    /// mu jumps from mu_initial to mu_final at t_inv. At t_inv itself the
    /// value is the left one.
    static Waveform step(double mu_initial, double mu_final, double t_inv, double t_end);

    /// mu(t) = (mi + mf)/2 - (mi - mf)/2 tanh((t - center)/width).
    static Waveform tanh_ramp(double mu_initial, double mu_final, double center, double width, double t_end);

    /// Piecewise-linear table; end values are held outside the sampled range.
    /// t_end defaults to the last sample time.
    static Waveform table(std::vector<double> times, std::vector<double> mu, std::optional<double> t_end = {});

    WaveformKind kind() const noexcept { return kind_; }
    double t_end() const noexcept { return t_end_; }

    /// Throws a domain error for t outside [0, t_end].
    double operator()(double t) const;

    double mu_initial() const { return (*this)(0.0); }
    double mu_final() const { return (*this)(t_end_); }

    /// Average of the one-sided limits. Equals operator() except at the jump
    /// of a step, where it is (mu_initial + mu_final)/2.
    double node_value(double t) const;

    /// Location of the discontinuity of a step waveform.
    std::optional<double> jump_time() const;

    /// Constant added by inductive renormalization (zero otherwise).
    double offset() const noexcept { return offset_; }
    bool renormalized() const noexcept { return offset_ != 0.0; }

    /// mu(0) > 0 and mu(t_end) < 0: the drive inverts the potential curvature.
    bool has_sign_inversion() const;

    /// Prepends `pre` time units holding mu(0) and appends `post` units
    /// holding mu(t_end).
    Waveform extended(double pre, double post) const;

    /// Same drive with total duration `duration`. Parametric waveforms are
    /// rescaled (switching instant moves proportionally, ramp width kept);
    /// tables are padded symmetrically and cannot shrink.
    Waveform with_duration(double duration) const;

    /// Adds a constant to mu.
    Waveform shifted(double delta_mu) const;

    // Parameters, for reporting.
    double switch_time() const noexcept { return switch_time_; }  // t_inv or ramp center
    double ramp_width() const noexcept { return width_; }
    const std::vector<double>& table_times() const noexcept { return times_; }
    const std::vector<double>& table_values() const noexcept { return values_; }

private:
    Waveform() = default;
    double base(double t) const;

    WaveformKind kind_ = WaveformKind::instantaneous_step;
    double t_end_ = 0.0;
    double mu_i_ = 1.0;
    double mu_f_ = -1.0;
    double switch_time_ = 0.0;
    double width_ = 0.0;
    double offset_ = 0.0;
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Reads the waveform CSV format: optional '#' comment lines, a header
/// `t,mu` or `t,phi_e`, then comma separated rows. phi_e columns are mapped
/// through mu = cos(phi_e/2). When `expected` is set the header must match.
Waveform load_waveform_table(std::istream& in, std::optional<TableColumn> expected = {});
Waveform load_waveform_table_file(const std::string& path, std::optional<TableColumn> expected = {});

/// Smallest t with mu(t) = 0, to 1e-10 relative to t_end.
double inversion_time(const Waveform& w);

/// mu -> mu + 1/(2 lambda) for a source inductance lambda = 2 pi L Ic / Phi0.
/// An infinite lambda is the identity.
Waveform renormalize_inductance(const Waveform& w, double lambda);

/// Ten reciprocal bandwidths, 10 max(sqrt(beta_c), 2/sqrt(beta_c)): the
/// minimum time needed after the inversion.
double settle_margin(double beta_c);

/// Time allowed before the inversion for the initial state to be forgotten:
/// 20 max(sqrt(beta_c), 1/sqrt(beta_c)).
double lead_time(double beta_c);

/// Step from +mu_i to -mu_i with the default lead time and settle margin.
Waveform default_step(double beta_c, double mu_initial = 1.0);

} // namespace jjgz
