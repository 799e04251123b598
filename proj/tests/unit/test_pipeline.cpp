#include "jjgz/errors.hpp"
#include "jjgz/ic_temperature.hpp"
#include "jjgz/pipeline/config.hpp"
#include "jjgz/pipeline/output.hpp"
#include "jjgz/pipeline/run.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace jjgz;

namespace {

const std::string data_dir = JJGZ_TEST_DATA;

ErrorKind kind_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::contract;
}

RunConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_run_config(in);
}

RunConfig quick()
{
    RunConfig c;
    c.plateau_check = false;
    c.workers = 1;
    return c;
}

// Independent evaluation of the interpolated-gap Ic(T) ratio.
long double ab_ratio(long double t, long double tc, long double t_ref)
{
    const long double kb = 1.380649e-23L;
    const long double gap0 = 1.764L * kb * tc;
    auto ic = [&](long double temp) {
        const long double gap = gap0 * std::tanh(1.74L * std::sqrt(tc / temp - 1.0L));
        return gap * std::tanh(gap / (2.0L * kb * temp));
    };
    return ic(t) / ic(t_ref);
}

} // namespace

TEST(Config, ParsesFullDocument)
{
    const RunConfig c = parse(R"({
        "dimensionless": {"beta_c": 2.0, "q": 300, "theta": 0.4, "omega_cut": 60},
        "waveform": {"kind": "tanh_ramp", "ramp_width": 2.0, "duration": 90},
        "lambda": 3.0,
        "sweep": {"axis": "beta_c", "range": {"start": 0.1, "stop": 10, "count": 3, "log": true}},
        "method": "mc",
        "monte_carlo": {"sample_budget": 20000, "seed": 17, "workers": 2},
        "quadrature": {"rel_tol": 1e-7, "kernel": "classical"},
        "variant": "asymptotic",
        "plateau_check": false,
        "max_step": 0.005,
        "ic_temperature_model": {"kind": "ambegaokar_baratoff", "critical_temperature": 9.0},
        "output": {"format": "json", "path": "out.json"},
        "ix_values": [-0.1, 0, 0.1]
    })");
    EXPECT_EQ(c.dimensionless.beta_c, 2.0);
    EXPECT_EQ(c.dimensionless.q, 300.0);
    EXPECT_EQ(c.dimensionless.omega_cut, 60.0);
    EXPECT_EQ(c.waveform.kind, WaveformKind::tanh_ramp);
    EXPECT_EQ(*c.waveform.duration, 90.0);
    EXPECT_EQ(*c.lambda, 3.0);
    ASSERT_TRUE(c.sweep);
    EXPECT_EQ(c.sweep->axis, SweepAxis::beta_c);
    ASSERT_EQ(c.sweep->values.size(), 3u);
    EXPECT_NEAR(c.sweep->values[1], 1.0, 1e-12);
    EXPECT_EQ(c.coefficients.method, NoiseMethod::monte_carlo);
    EXPECT_EQ(c.coefficients.monte_carlo.sample_budget, 20000u);
    EXPECT_EQ(c.coefficients.monte_carlo.rng_seed, 17u);
    EXPECT_EQ(c.coefficients.monte_carlo.kernel, NoiseKernel::classical);
    EXPECT_EQ(c.coefficients.quadrature.rel_tol, 1e-7);
    EXPECT_EQ(c.variant, GrayZoneVariant::asymptotic);
    EXPECT_FALSE(c.plateau_check);
    EXPECT_EQ(*c.max_step, 0.005);
    ASSERT_TRUE(std::holds_alternative<AmbegaokarBaratoff>(c.ic_model));
    EXPECT_EQ(std::get<AmbegaokarBaratoff>(c.ic_model).critical_temperature, 9.0);
    EXPECT_EQ(c.format, OutputFormat::json);
    EXPECT_EQ(c.ix_values.size(), 3u);
}

TEST(Config, PhysicalBlock)
{
    const RunConfig c = parse(R"({"physical": {"critical_current": 145e-6, "omega_p_inv_ps": 1.1,
                                               "beta_c": 1, "temperature": 4.2}})");
    ASSERT_TRUE(c.physical);
    const DimensionlessParams p = resolve_params(c);
    EXPECT_NEAR(p.q, 497.8, 0.1);
    EXPECT_NEAR(p.theta, 0.605, 1e-3);
}

TEST(Config, Rejections)
{
    for (const char* text : {
             R"({"dimensionles": {}})",
             R"({"dimensionless": {"betac": 1}})",
             R"({"dimensionless": {"q": "big"}})",
             R"({"method": "simpson"})",
             R"({"sweep": {"axis": "temperature"}})",
             R"({"sweep": {"axis": "temperature", "values": [1], "range": {"start": 0, "stop": 1, "count": 2}}})",
             R"({"sweep": {"axis": "voltage", "values": [1, 2]}})",
             R"({"physical": {"critical_current": 1e-4, "omega_p_inv_ps": 1, "beta_c": 1},
                 "dimensionless": {"q": 10}})",
             R"({"physical": {"critical_current": 1e-4, "beta_c": 1}})",
             R"({"lambda": -1})",
             R"({"plateau_check": "yes"})",
             R"({"waveform": {"kind": "table"}})",
             R"({"monte_carlo": {"seed": -4}})",
             R"({not json)",
         })
        EXPECT_EQ(kind_of([&] { parse(text); }), ErrorKind::configuration) << text;
    EXPECT_EQ(kind_of([] { load_run_config("/nonexistent/run.json"); }), ErrorKind::configuration);
}

TEST(Config, MethodAndFormatNames)
{
    EXPECT_EQ(parse_method("quadrature"), NoiseMethod::quadrature);
    EXPECT_EQ(parse_method("mc"), NoiseMethod::monte_carlo);
    EXPECT_EQ(parse_method("monte_carlo"), NoiseMethod::monte_carlo);
    EXPECT_EQ(parse_format("json"), OutputFormat::json);
    EXPECT_THROW(parse_format("xml"), Error);
}

TEST(Config, TablePathResolvedAgainstConfigDirectory)
{
    const RunConfig c = load_run_config(data_dir + "/table_run.json");
    EXPECT_EQ(c.waveform.table_path, data_dir + "/ramp_phi.csv");
    const Waveform w = build_waveform(c, resolve_params(c));
    EXPECT_NEAR(w(0.0), 1.0, 1e-12);
    EXPECT_NEAR(w.mu_final(), -0.5, 1e-6);
    const SweepRow row = run_single(c);
    EXPECT_TRUE(row.ok());
    EXPECT_GT(row.delta_ix_over_ic, 0.0);
}

TEST(Config, TableStartMismatchIsIngestionError)
{
    RunConfig c = load_run_config(data_dir + "/table_run.json");
    c.dimensionless.mu_initial = 0.8;
    EXPECT_EQ(kind_of([&] { build_waveform(c, resolve_params(c)); }), ErrorKind::ingestion);
}

TEST(Pipeline, DefaultPointRegression)
{
    RunConfig c;
    const SweepRow row = run_single(c);
    EXPECT_NEAR(row.delta_ix_over_ic, 0.05563853046335842, 1e-12);
    ASSERT_TRUE(row.plateau_ok);
    EXPECT_TRUE(*row.plateau_ok);
    EXPECT_EQ(row.err, 0.0);
    EXPECT_FALSE(row.delta_ix_amperes);
}

TEST(Pipeline, AsymptoticVariantCloseToFull)
{
    RunConfig c = quick();
    const double full = run_single(c).delta_ix_over_ic;
    c.variant = GrayZoneVariant::asymptotic;
    EXPECT_NEAR(run_single(c).delta_ix_over_ic / full, 1.0, 1e-2);
}

TEST(Pipeline, HotterIsWider)
{
    RunConfig c = quick();
    const double cold = run_single(c).delta_ix_over_ic;
    c.dimensionless.theta = 10.0;
    EXPECT_GT(run_single(c).delta_ix_over_ic, cold);
}

TEST(Pipeline, SmallInductanceIsRegimeError)
{
    RunConfig c = quick();
    c.lambda = 0.4;
    EXPECT_EQ(kind_of([&] { run_single(c); }), ErrorKind::regime);
    c.lambda = 2.0;
    EXPECT_NO_THROW(run_single(c));
}

TEST(Pipeline, AmpereColumnFromPhysicalConfig)
{
    RunConfig c = quick();
    PhysicalParams p;
    p.critical_current = 145e-6;
    p.plasma_frequency = 1.0 / 1.1e-12;
    p.beta_c = 1.0;
    p.temperature = 2.0;
    c.physical = p;
    const SweepRow row = run_single(c);
    ASSERT_TRUE(row.delta_ix_amperes);
    EXPECT_DOUBLE_EQ(*row.delta_ix_amperes, row.delta_ix_over_ic * 145e-6);
}

TEST(Sweep, SortedRowsAndIsolatedFailures)
{
    RunConfig c = quick();
    c.sweep = SweepSpec{SweepAxis::lambda, {5.0, 0.4, 2.0}};
    const std::vector<SweepRow> rows = run_sweep(c);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].value, 0.4);
    EXPECT_EQ(rows[1].value, 2.0);
    EXPECT_EQ(rows[2].value, 5.0);
    EXPECT_EQ(rows[0].status.rfind("regime error", 0), 0u) << rows[0].status;
    EXPECT_TRUE(rows[1].ok());
    EXPECT_TRUE(rows[2].ok());
    for (const SweepRow& r : rows)
        EXPECT_EQ(r.axis, "lambda");
}

TEST(Sweep, WorkerCountDoesNotChangeRows)
{
    RunConfig c = quick();
    c.sweep = SweepSpec{SweepAxis::temperature, {0.0, 1.0, 3.0}};
    c.workers = 1;
    const auto serial = run_sweep(c);
    c.workers = 3;
    const auto parallel = run_sweep(c);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].delta_ix_over_ic, parallel[i].delta_ix_over_ic);
        EXPECT_EQ(serial[i].C, parallel[i].C);
    }
    EXPECT_LT(serial[0].delta_ix_over_ic, serial[2].delta_ix_over_ic);
}

TEST(Sweep, MonteCarloRowsCarryErrors)
{
    RunConfig c = quick();
    c.coefficients.method = NoiseMethod::monte_carlo;
    c.coefficients.monte_carlo.sample_budget = 30'000;
    c.coefficients.monte_carlo.workers = 1;
    c.sweep = SweepSpec{SweepAxis::beta_c, {0.5, 2.0}};
    for (const SweepRow& r : run_sweep(c)) {
        EXPECT_TRUE(r.ok()) << r.status;
        EXPECT_GT(r.err, 0.0);
    }
    c.coefficients.method = NoiseMethod::quadrature;
    for (const SweepRow& r : run_sweep(c))
        EXPECT_EQ(r.err, 0.0);
}

TEST(Sweep, NeedsAnAxis)
{
    EXPECT_EQ(kind_of([] { run_sweep(quick()); }), ErrorKind::configuration);
}

TEST(Probability, CurveIsConsistentWithWidth)
{
    RunConfig c = quick();
    const double h = 1e-5;
    c.ix_values = {-0.05, -h, 0.0, h, 0.05};
    double width = 0.0;
    const auto curve = probability_curve(c, &width);
    ASSERT_EQ(curve.size(), 5u);
    EXPECT_DOUBLE_EQ(curve[2].second, 0.5);
    EXPECT_NEAR(curve[0].second + curve[4].second, 1.0, 1e-12);
    const double slope = (curve[3].second - curve[1].second) / (2.0 * h);
    EXPECT_NEAR(-1.0 / slope, width, 1e-4 * width);
}

TEST(Output, CsvHeaderAndEmptyFields)
{
    SweepRow ok;
    ok.axis = "temperature";
    ok.value = 1.5;
    ok.delta_ix_over_ic = 0.1;
    ok.plateau_ok = true;
    SweepRow failed;
    failed.axis = "temperature";
    failed.value = 2.0;
    failed.status = "regime error: a, b";
    const std::vector<SweepRow> rows{ok, failed};
    std::ostringstream out;
    write_rows_csv(out, rows);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, sweep_csv_header);
    std::getline(in, line);
    EXPECT_EQ(line, "temperature,1.5,0.10000000000000001,,0,true,0,0,0,ok");
    std::getline(in, line);
    EXPECT_EQ(line, "temperature,2,0,,0,,0,0,0,\"regime error: a, b\"");
}

TEST(Output, JsonRoundTripIsExact)
{
    SweepRow a;
    a.axis = "beta_c";
    a.value = 0.1;
    a.delta_ix_over_ic = 1.0 / 3.0;
    a.delta_ix_amperes = 4.83e-6 / 7.0;
    a.err = 1e-17;
    a.plateau_ok = false;
    a.C = 2.0e11 / 3.0;
    a.Q1 = -2.855e7 / 9.0;
    a.K1 = -115.28591201269927;
    a.warnings = {"w1"};
    SweepRow b;
    b.status = "numerical error: x";
    const std::vector<SweepRow> rows{a, b};
    std::stringstream io;
    write_rows_json(io, rows);
    const std::vector<SweepRow> back = read_rows_json(io);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].axis, a.axis);
    EXPECT_EQ(back[0].value, a.value);
    EXPECT_EQ(back[0].delta_ix_over_ic, a.delta_ix_over_ic);
    EXPECT_EQ(back[0].delta_ix_amperes, a.delta_ix_amperes);
    EXPECT_EQ(back[0].err, a.err);
    EXPECT_EQ(back[0].plateau_ok, a.plateau_ok);
    EXPECT_EQ(back[0].C, a.C);
    EXPECT_EQ(back[0].Q1, a.Q1);
    EXPECT_EQ(back[0].K1, a.K1);
    EXPECT_EQ(back[1].status, b.status);
    EXPECT_FALSE(back[1].delta_ix_amperes);
    EXPECT_FALSE(back[1].plateau_ok);
}

TEST(Output, ProbabilityCsv)
{
    const std::vector<std::pair<double, double>> curve{{-0.1, 0.9}, {0.0, 0.5}};
    std::ostringstream out;
    write_probability_csv(out, curve);
    EXPECT_EQ(out.str(), "ix_over_ic,p\n-0.10000000000000001,0.90000000000000002\n0,0.5\n");
}

TEST(IcTemperature, ConstantModel)
{
    EXPECT_EQ(ic_scale(ConstantIc{}, 1.0), 1.0);
    EXPECT_EQ(ic_scale(ConstantIc{}, 50.0), 1.0);
}

TEST(IcTemperature, InterpolatedGapModelMatchesOracle)
{
    const AmbegaokarBaratoff m;
    EXPECT_DOUBLE_EQ(ic_scale(m, 4.2), 1.0);
    for (double t : {0.5, 1.5, 3.0, 6.0, 9.0})
        EXPECT_NEAR(ic_scale(m, t), static_cast<double>(ab_ratio(t, 9.2L, 4.2L)), 1e-12) << t;
    EXPECT_GT(ic_scale(m, 0.01), 1.0);
    EXPECT_LT(ic_scale(m, 8.0), 1.0);
    EXPECT_EQ(kind_of([&] { ic_scale(m, 9.2); }), ErrorKind::domain);
    EXPECT_EQ(kind_of([&] { ic_scale(m, -1.0); }), ErrorKind::domain);
}

TEST(IcTemperature, ScalesQAndAmperes)
{
    RunConfig c = quick();
    PhysicalParams p;
    p.critical_current = 145e-6;
    p.plasma_frequency = 1.0 / 1.1e-12;
    p.beta_c = 1.0;
    p.temperature = 1.5;
    c.physical = p;
    const double q_constant = resolve_params(c).q;
    c.ic_model = AmbegaokarBaratoff{};
    std::optional<double> ic;
    const double q_scaled = resolve_params(c, &ic).q;
    const double ratio = static_cast<double>(ab_ratio(1.5L, 9.2L, 4.2L));
    EXPECT_NEAR(q_scaled / q_constant, ratio, 1e-12);
    ASSERT_TRUE(ic);
    EXPECT_NEAR(*ic, 145e-6 * ratio, 1e-18);
}
