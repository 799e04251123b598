#include "jjgz/bvp.hpp"
#include "jjgz/errors.hpp"
#include "jjgz/pipeline/config.hpp"
#include "jjgz/pipeline/output.hpp"
#include "jjgz/pipeline/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace {

struct CommonOptions {
    std::string config;
    std::string method;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    std::string dump_bvp;
    bool no_plateau = false;
    std::size_t workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_dump)
{
    cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--method", o.method, "noise integration: quadrature or mc");
    cmd->add_option("--seed", o.seed, "Monte Carlo seed");
    cmd->add_option("--out", o.out, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "csv or json");
    if (with_dump)
        cmd->add_option("--dump-bvp", o.dump_bvp, "write the basis functions to this CSV file");
}

jjgz::RunConfig load(const CommonOptions& o)
{
    jjgz::RunConfig cfg = o.config.empty() ? jjgz::RunConfig{} : jjgz::load_run_config(o.config);
    if (!o.method.empty())
        cfg.coefficients.method = jjgz::parse_method(o.method);
    if (o.seed)
        cfg.coefficients.monte_carlo.rng_seed = *o.seed;
    if (!o.format.empty())
        cfg.format = jjgz::parse_format(o.format);
    if (!o.out.empty())
        cfg.output_path = o.out;
    if (o.no_plateau)
        cfg.plateau_check = false;
    if (o.workers)
        cfg.workers = o.workers;
    cfg.validate();
    return cfg;
}

template <class Write>
void emit(const jjgz::RunConfig& cfg, Write&& write)
{
    if (cfg.output_path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream f(cfg.output_path);
    if (!f)
        throw jjgz::Error(jjgz::ErrorKind::configuration, "cli", "cannot write '" + cfg.output_path + "'");
    write(f);
}

void dump_bvp(const jjgz::RunConfig& cfg, const std::string& path)
{
    const jjgz::PointResult r = jjgz::evaluate_point(cfg);
    std::ofstream f(path);
    if (!f)
        throw jjgz::Error(jjgz::ErrorKind::configuration, "cli", "cannot write '" + path + "'");
    jjgz::write_bvp_csv(f, r.bvp);
}

void report_warnings(const jjgz::SweepRow& row, bool in_sweep)
{
    for (const auto& w : row.warnings) {
        std::cerr << "jjgz: warning";
        if (in_sweep)
            std::cerr << " (" << row.axis << " = " << row.value << ")";
        std::cerr << ": " << w << '\n';
    }
}

int cmd_gray_zone(const CommonOptions& o)
{
    const jjgz::RunConfig cfg = load(o);
    if (!o.dump_bvp.empty())
        dump_bvp(cfg, o.dump_bvp);
    const std::vector<jjgz::SweepRow> rows{jjgz::run_single(cfg)};
    report_warnings(rows.front(), false);
    emit(cfg, [&](std::ostream& out) {
        if (cfg.format == jjgz::OutputFormat::json)
            jjgz::write_rows_json(out, rows);
        else
            jjgz::write_rows_csv(out, rows);
    });
    return 0;
}

int cmd_sweep(const CommonOptions& o)
{
    const jjgz::RunConfig cfg = load(o);
    if (!o.dump_bvp.empty())
        dump_bvp(jjgz::at_sweep_value(cfg, cfg.sweep ? cfg.sweep->axis : jjgz::SweepAxis::temperature,
                                      cfg.sweep && !cfg.sweep->values.empty() ? cfg.sweep->values.front() : 0.0),
                 o.dump_bvp);
    const std::vector<jjgz::SweepRow> rows = jjgz::run_sweep(cfg);
    std::size_t good = 0;
    for (const auto& r : rows) {
        report_warnings(r, true);
        if (r.ok())
            ++good;
        else
            std::cerr << "jjgz: row " << r.axis << " = " << r.value << " failed: " << r.status << '\n';
    }
    emit(cfg, [&](std::ostream& out) {
        if (cfg.format == jjgz::OutputFormat::json)
            jjgz::write_rows_json(out, rows);
        else
            jjgz::write_rows_csv(out, rows);
    });
    return good > 0 ? 0 : 3;
}

int cmd_prob_curve(const CommonOptions& o)
{
    jjgz::RunConfig cfg = load(o);
    double width = 0.0;
    if (cfg.ix_values.empty()) {
        // Default abscissae: three widths either side of zero.
        jjgz::probability_curve(cfg, &width);
        for (int i = -30; i <= 30; ++i)
            cfg.ix_values.push_back(0.1 * i * width);
    }
    const auto curve = jjgz::probability_curve(cfg, &width);
    emit(cfg, [&](std::ostream& out) {
        if (cfg.format == jjgz::OutputFormat::json)
            jjgz::write_probability_json(out, curve, width);
        else
            jjgz::write_probability_csv(out, curve);
    });
    return 0;
}

int cmd_waveform_info(const CommonOptions& o)
{
    const jjgz::RunConfig cfg = load(o);
    const jjgz::DimensionlessParams p = jjgz::resolve_params(cfg);
    const jjgz::Waveform w = jjgz::build_waveform(cfg, p);
    const jjgz::Grid grid = jjgz::make_grid(w, p.beta_c, cfg.max_step);
    const double t_inv = jjgz::inversion_time(w);
    emit(cfg, [&](std::ostream& out) {
        out << std::setprecision(10);
        out << "kind: " << jjgz::to_string(w.kind()) << '\n'
            << "duration: " << w.t_end() << '\n'
            << "mu_initial: " << w.mu_initial() << '\n'
            << "mu_final: " << w.mu_final() << '\n'
            << "inversion_time: " << t_inv << '\n'
            << "time_after_inversion: " << w.t_end() - t_inv << '\n'
            << "recommended_settle_time: " << jjgz::settle_margin(p.beta_c) << '\n'
            << "renormalization_offset: " << w.offset() << '\n'
            << "grid_steps: " << grid.n_steps << '\n'
            << "grid_step: " << grid.step() << '\n';
    });
    for (const auto& m : jjgz::grid_warnings(grid, p.beta_c))
        std::cerr << "jjgz: warning: " << m << '\n';
    if (w.t_end() - t_inv < jjgz::settle_margin(p.beta_c))
        std::cerr << "jjgz: warning: the drive settles for less than ten reciprocal bandwidths after the inversion\n";
    if (!o.dump_bvp.empty())
        dump_bvp(cfg, o.dump_bvp);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gray-zone width of a Josephson balanced comparator"};
    app.require_subcommand(1);

    CommonOptions gz, sw, pc, wi;
    auto* gray = app.add_subcommand("gray-zone", "gray-zone width at a single operating point");
    add_common(gray, gz, true);
    gray->add_flag("--no-plateau", gz.no_plateau, "skip the duration plateau check");

    auto* sweep = app.add_subcommand("sweep", "gray-zone width along a sweep axis");
    add_common(sweep, sw, true);
    sweep->add_flag("--no-plateau", sw.no_plateau, "skip the duration plateau check");
    sweep->add_option("--workers", sw.workers, "rows computed concurrently");

    auto* prob = app.add_subcommand("prob-curve", "switching probability versus input current");
    add_common(prob, pc, false);

    auto* info = app.add_subcommand("waveform-info", "describe the drive waveform and grid");
    add_common(info, wi, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gray)
            return cmd_gray_zone(gz);
        if (*sweep)
            return cmd_sweep(sw);
        if (*prob)
            return cmd_prob_curve(pc);
        return cmd_waveform_info(wi);
    } catch (const jjgz::Error& e) {
        std::cerr << "jjgz: " << jjgz::to_string(e.kind()) << " in " << e.module() << ": " << e.what() << '\n';
        if (!e.hint().empty())
            std::cerr << "  hint: " << e.hint() << '\n';
        return jjgz::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "jjgz: internal error: " << e.what() << '\n';
        return 3;
    }
}
