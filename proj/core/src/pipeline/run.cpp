#include "jjgz/pipeline/run.hpp"

#include "jjgz/bvp.hpp"
#include "jjgz/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace jjgz {

namespace {

[[noreturn]] void config_error(const std::string& what, const std::string& hint = {})
{
    throw Error(ErrorKind::configuration, "cli", what, hint);
}

std::string error_status(ErrorKind kind, const std::string& module, const std::string& what)
{
    std::ostringstream s;
    s << to_string(kind) << " in " << module << ": " << what;
    return s.str();
}

struct Point {
    DimensionlessParams params;
    std::optional<double> critical_current;
};

PointResult evaluate(const RunConfig& cfg, const Point& point, const Waveform& w, const CoefficientOptions& coeffs)
{
    PointResult r{point.params, w, {}, {}, {}, {}, point.critical_current};
    // An inductive source shifts the initial curvature too.
    r.params.mu_initial = w.mu_initial();
    r.params.validate(w.renormalized());

    const Grid grid = make_grid(w, r.params.beta_c, cfg.max_step);
    r.bvp = solve_all(w, grid, r.params.beta_c, BvpOptions{cfg.richardson});
    r.coeffs = compute_coefficients(r.bvp, w, r.params, coeffs);
    r.initial = initial_thermal_state(r.params);
    r.gray_zone = cfg.variant == GrayZoneVariant::full ? gray_zone_full(r.coeffs, r.initial, r.params)
                                                       : gray_zone_asymptotic(r.coeffs);
    if (r.critical_current)
        r.gray_zone.delta_ix = r.gray_zone.delta_ix_over_ic * *r.critical_current;

    auto& warn = r.gray_zone.warnings;
    for (auto& m : r.params.warnings())
        warn.push_back(std::move(m));
    for (auto& m : grid_warnings(grid, r.params.beta_c))
        warn.push_back(std::move(m));
    const double t_inv = inversion_time(w);
    if (w.t_end() - t_inv < settle_margin(r.params.beta_c))
        warn.push_back("the drive settles for less than ten reciprocal bandwidths after the inversion; "
                       "the width may still depend on the duration");
    return r;
}

// Only C, Q1 and K1 enter the width, so the noise integral is controlled on C.
CoefficientOptions pipeline_coefficients(const RunConfig& cfg)
{
    CoefficientOptions o = cfg.coefficients;
    o.quadrature.c_only = true;
    return o;
}

} // namespace

const char* to_string(SweepAxis axis) noexcept
{
    switch (axis) {
    case SweepAxis::temperature: return "temperature";
    case SweepAxis::beta_c: return "beta_c";
    case SweepAxis::duration: return "duration";
    case SweepAxis::lambda: return "lambda";
    }
    return "none";
}

void RunConfig::validate() const
{
    if (physical)
        physical->validate();
    else
        dimensionless.validate();
    if (sweep) {
        if (sweep->values.empty())
            config_error("sweep values must not be empty");
        for (double v : sweep->values)
            if (!std::isfinite(v))
                config_error("sweep values must be finite");
    }
    if (lambda && !(*lambda > 0.0))
        config_error("lambda must be positive");
    if (max_step && !(*max_step > 0.0))
        config_error("max_step must be positive");
    if (waveform.kind == WaveformKind::piecewise_linear_table && waveform.table_path.empty())
        config_error("a table waveform needs a file path", "set waveform.table");
    if (waveform.duration && !(*waveform.duration > 0.0))
        config_error("waveform duration must be positive");
    if (waveform.switch_time && !(*waveform.switch_time > 0.0))
        config_error("waveform switch time must be positive");
    if (waveform.kind == WaveformKind::tanh_ramp && !(waveform.ramp_width > 0.0))
        config_error("ramp width must be positive");
    for (double x : ix_values)
        if (!std::isfinite(x))
            config_error("probability curve abscissae must be finite");
}

DimensionlessParams resolve_params(const RunConfig& cfg, std::optional<double>* critical_current)
{
    DimensionlessParams p;
    std::optional<double> ic;
    if (cfg.physical) {
        const PhysicalParams& phys = *cfg.physical;
        p = to_dimensionless(phys);
        p.mu_initial = cfg.dimensionless.mu_initial;
        // Ic(T) changes the classicality and the ampere scale only.
        const double scale = ic_scale(cfg.ic_model, phys.temperature);
        p.q *= scale;
        ic = phys.critical_current * scale;
    } else {
        p = cfg.dimensionless;
    }
    p.validate();
    if (critical_current)
        *critical_current = ic;
    return p;
}

Waveform build_waveform(const RunConfig& cfg, const DimensionlessParams& p)
{
    const WaveformSpec& spec = cfg.waveform;
    const double mu_i = p.mu_initial;
    const double mu_f = spec.mu_final.value_or(-mu_i);
    const double lead = lead_time(p.beta_c);
    const double margin = settle_margin(p.beta_c);

    Waveform w = Waveform::step(1.0, -1.0, 1.0, 2.0);
    switch (spec.kind) {
    case WaveformKind::instantaneous_step:
    case WaveformKind::tanh_ramp: {
        const double ramp = spec.kind == WaveformKind::tanh_ramp ? 3.0 * spec.ramp_width : 0.0;
        double sw = lead + ramp;
        double d = sw + ramp + margin;
        if (spec.duration && spec.switch_time) {
            sw = *spec.switch_time;
            d = *spec.duration;
        } else if (spec.duration) {
            d = *spec.duration;
            sw = 0.5 * d;
        } else if (spec.switch_time) {
            sw = *spec.switch_time;
            d = sw + ramp + margin;
        }
        if (!(sw < d))
            config_error("the switch must happen before the end of the drive");
        w = spec.kind == WaveformKind::instantaneous_step ? Waveform::step(mu_i, mu_f, sw, d)
                                                          : Waveform::tanh_ramp(mu_i, mu_f, sw, spec.ramp_width, d);
        break;
    }
    case WaveformKind::piecewise_linear_table: {
        w = load_waveform_table_file(spec.table_path, spec.table_column);
        if (spec.duration)
            w = w.with_duration(*spec.duration);
        if (std::abs(w.mu_initial() - mu_i) > 1e-9 * std::max(1.0, std::abs(mu_i))) {
            std::ostringstream msg;
            msg << "waveform table starts at mu = " << w.mu_initial() << " but mu_initial is " << mu_i;
            throw Error(ErrorKind::ingestion, "model", msg.str(), "set mu_initial to the first table value");
        }
        break;
    }
    }

    if (cfg.lambda)
        w = renormalize_inductance(w, *cfg.lambda);
    if (!w.has_sign_inversion())
        throw Error(ErrorKind::regime, "model", "no instability: the drive never inverts the potential curvature",
                    "an inductive source needs lambda > 1/(2|mu_final|)");
    return w;
}

PointResult evaluate_point(const RunConfig& cfg)
{
    Point point;
    point.params = resolve_params(cfg, &point.critical_current);
    const Waveform w = build_waveform(cfg, point.params);
    return evaluate(cfg, point, w, pipeline_coefficients(cfg));
}

SweepRow run_single(const RunConfig& cfg)
{
    Point point;
    point.params = resolve_params(cfg, &point.critical_current);
    const Waveform w = build_waveform(cfg, point.params);
    const CoefficientOptions coeffs = pipeline_coefficients(cfg);
    const PointResult r = evaluate(cfg, point, w, coeffs);

    SweepRow row;
    const GrayZoneResult& gz = r.gray_zone;
    row.delta_ix_over_ic = gz.delta_ix_over_ic;
    row.delta_ix_amperes = gz.delta_ix;
    row.err = gz.error;
    row.C = gz.C;
    row.Q1 = gz.Q1;
    row.K1 = gz.K1;
    row.warnings = gz.warnings;

    if (cfg.plateau_check) {
        CoefficientOptions quad = coeffs;
        quad.method = NoiseMethod::quadrature;
        const double d = w.t_end();
        std::vector<std::pair<double, double>> series;
        series.emplace_back(d, coeffs.method == NoiseMethod::quadrature
                                   ? gz.delta_ix_over_ic
                                   : evaluate(cfg, point, w, quad).gray_zone.delta_ix_over_ic);
        for (double factor : {2.0, 4.0})
            series.emplace_back(factor * d,
                                evaluate(cfg, point, w.with_duration(factor * d), quad).gray_zone.delta_ix_over_ic);
        const PlateauCheck pc = check_plateau(series);
        row.plateau_ok = pc.ok;
        if (!pc.ok) {
            std::ostringstream msg;
            msg << "width changes by " << 100.0 * pc.spread << "% when the drive is lengthened";
            row.warnings.push_back(msg.str());
        }
    }
    return row;
}

RunConfig at_sweep_value(const RunConfig& cfg, SweepAxis axis, double value)
{
    RunConfig c = cfg;
    c.sweep.reset();
    switch (axis) {
    case SweepAxis::temperature:
        if (c.physical)
            c.physical->temperature = value;
        else
            c.dimensionless.theta = value;
        break;
    case SweepAxis::beta_c:
        if (c.physical) {
            c.physical->beta_c = value;
            c.physical->shunt_resistance.reset();
        } else {
            c.dimensionless.beta_c = value;
        }
        break;
    case SweepAxis::duration:
        c.waveform.duration = value;
        break;
    case SweepAxis::lambda:
        c.lambda = value;
        break;
    }
    return c;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg)
{
    if (!cfg.sweep)
        config_error("no sweep axis configured", "add a 'sweep' block to the configuration");
    if (cfg.sweep->values.size() < 2)
        config_error("a sweep needs at least two values");
    cfg.validate();

    const SweepAxis axis = cfg.sweep->axis;
    std::vector<double> values = cfg.sweep->values;
    std::sort(values.begin(), values.end());

    std::vector<SweepRow> rows(values.size());
    auto run_row = [&](std::size_t i) {
        SweepRow& row = rows[i];
        try {
            row = run_single(at_sweep_value(cfg, axis, values[i]));
        } catch (const Error& e) {
            row = SweepRow{};
            row.status = error_status(e.kind(), e.module(), e.what());
        } catch (const std::exception& e) {
            row = SweepRow{};
            row.status = error_status(ErrorKind::numerical, "cli", e.what());
        }
        row.axis = to_string(axis);
        row.value = values[i];
    };

    std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, values.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i)
            run_row(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < workers; ++k)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < values.size(); i = next++)
                    run_row(i);
            });
    }
    return rows;
}

std::vector<std::pair<double, double>> probability_curve(const RunConfig& cfg, double* width)
{
    RunConfig c = cfg;
    c.variant = GrayZoneVariant::full;
    const PointResult r = evaluate_point(c);
    const double dx = r.gray_zone.delta_ix_over_ic;
    if (width)
        *width = dx;
    std::vector<std::pair<double, double>> curve;
    curve.reserve(cfg.ix_values.size());
    for (double x : cfg.ix_values)
        curve.emplace_back(x, switching_probability(dx, x));
    return curve;
}

} // namespace jjgz
