#include "jjgz/pipeline/config.hpp"

#include "jjgz/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

namespace jjgz {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& what, const std::string& hint = {})
{
    throw Error(ErrorKind::configuration, "cli", what, hint);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!obj.is_object())
        config_error("'" + where + "' must be a JSON object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            config_error("unknown key '" + item.key() + "' in '" + where + "'");
}

double number(const json& obj, const char* key, const std::string& where)
{
    const json& v = obj.at(key);
    if (!v.is_number())
        config_error("'" + where + "." + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d))
        config_error("'" + where + "." + key + "' must be finite");
    return d;
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key) || obj.at(key).is_null())
        return std::nullopt;
    return number(obj, key, where);
}

std::size_t count(const json& obj, const char* key, const std::string& where)
{
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        config_error("'" + where + "." + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::string text(const json& obj, const char* key, const std::string& where)
{
    const json& v = obj.at(key);
    if (!v.is_string())
        config_error("'" + where + "." + key + "' must be a string");
    return v.get<std::string>();
}

NoiseKernel parse_kernel(const std::string& name)
{
    if (name == "quantum")
        return NoiseKernel::quantum;
    if (name == "classical")
        return NoiseKernel::classical;
    config_error("unknown noise kernel '" + name + "'", "use 'quantum' or 'classical'");
}

// Either an explicit list or {start, stop, count, log}.
std::vector<double> parse_values(const json& node, const std::string& where)
{
    std::vector<double> out;
    if (node.is_array()) {
        for (const json& v : node) {
            if (!v.is_number())
                config_error("'" + where + "' entries must be numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    allow_keys(node, where, {"start", "stop", "count", "log"});
    const double a = number(node, "start", where);
    const double b = number(node, "stop", where);
    const std::size_t n = count(node, "count", where);
    const bool log = node.contains("log") && node.at("log").get<bool>();
    if (n < 1)
        config_error("'" + where + ".count' must be at least 1");
    if (log && !(a > 0.0 && b > 0.0))
        config_error("logarithmic ranges need positive end points");
    for (std::size_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out.push_back(log ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a));
    }
    return out;
}

PhysicalParams parse_physical(const json& node)
{
    const std::string where = "physical";
    allow_keys(node, where,
               {"critical_current", "shunt_resistance", "capacitance", "plasma_frequency", "omega_p_inv_ps", "beta_c",
                "temperature", "cutoff_multiplier"});
    PhysicalParams p;
    p.critical_current = number(node, "critical_current", where);
    p.shunt_resistance = optional_number(node, "shunt_resistance", where);
    p.capacitance = optional_number(node, "capacitance", where);
    p.plasma_frequency = optional_number(node, "plasma_frequency", where);
    if (auto inv = optional_number(node, "omega_p_inv_ps", where)) {
        if (p.plasma_frequency)
            config_error("give only one of 'plasma_frequency' and 'omega_p_inv_ps'");
        if (!(*inv > 0.0))
            config_error("'physical.omega_p_inv_ps' must be positive");
        p.plasma_frequency = 1.0 / (*inv * 1e-12);
    }
    p.beta_c = optional_number(node, "beta_c", where);
    p.temperature = optional_number(node, "temperature", where).value_or(0.0);
    p.cutoff_multiplier = optional_number(node, "cutoff_multiplier", where).value_or(50.0);
    return p;
}

DimensionlessParams parse_dimensionless(const json& node)
{
    const std::string where = "dimensionless";
    allow_keys(node, where, {"beta_c", "q", "theta", "omega_cut", "mu_initial"});
    DimensionlessParams p;
    p.beta_c = optional_number(node, "beta_c", where).value_or(p.beta_c);
    p.q = optional_number(node, "q", where).value_or(p.q);
    p.theta = optional_number(node, "theta", where).value_or(p.theta);
    p.omega_cut = optional_number(node, "omega_cut", where).value_or(p.omega_cut);
    p.mu_initial = optional_number(node, "mu_initial", where).value_or(p.mu_initial);
    return p;
}

WaveformSpec parse_waveform(const json& node, const std::string& base_dir)
{
    const std::string where = "waveform";
    allow_keys(node, where, {"kind", "duration", "switch_time", "ramp_width", "mu_final", "table", "column"});
    WaveformSpec w;
    const std::string kind = node.contains("kind") ? text(node, "kind", where) : "step";
    if (kind == "step")
        w.kind = WaveformKind::instantaneous_step;
    else if (kind == "tanh_ramp")
        w.kind = WaveformKind::tanh_ramp;
    else if (kind == "table")
        w.kind = WaveformKind::piecewise_linear_table;
    else
        config_error("unknown waveform kind '" + kind + "'", "use 'step', 'tanh_ramp' or 'table'");
    w.duration = optional_number(node, "duration", where);
    w.switch_time = optional_number(node, "switch_time", where);
    w.ramp_width = optional_number(node, "ramp_width", where).value_or(w.ramp_width);
    w.mu_final = optional_number(node, "mu_final", where);
    if (node.contains("table")) {
        std::filesystem::path path = text(node, "table", where);
        if (path.is_relative() && !base_dir.empty())
            path = std::filesystem::path(base_dir) / path;
        w.table_path = path.string();
    }
    if (node.contains("column")) {
        const std::string col = text(node, "column", where);
        if (col == "mu")
            w.table_column = TableColumn::mu;
        else if (col == "phi_e")
            w.table_column = TableColumn::phi_e;
        else
            config_error("unknown table column '" + col + "'", "use 'mu' or 'phi_e'");
    }
    return w;
}

IcTemperatureModel parse_ic_model(const json& node)
{
    if (node.is_string()) {
        const std::string name = node.get<std::string>();
        if (name == "constant")
            return ConstantIc{};
        if (name == "ambegaokar_baratoff")
            return AmbegaokarBaratoff{};
        config_error("unknown Ic(T) model '" + name + "'", "use 'constant' or 'ambegaokar_baratoff'");
    }
    const std::string where = "ic_temperature_model";
    allow_keys(node, where, {"kind", "critical_temperature", "gap_zero_mev", "reference_temperature"});
    const std::string kind = text(node, "kind", where);
    if (kind == "constant")
        return ConstantIc{};
    if (kind != "ambegaokar_baratoff")
        config_error("unknown Ic(T) model '" + kind + "'", "use 'constant' or 'ambegaokar_baratoff'");
    AmbegaokarBaratoff m;
    m.critical_temperature = optional_number(node, "critical_temperature", where).value_or(m.critical_temperature);
    m.reference_temperature = optional_number(node, "reference_temperature", where).value_or(m.reference_temperature);
    if (auto mev = optional_number(node, "gap_zero_mev", where))
        m.gap_zero = *mev * 1e-3 * constants::elementary_charge;
    return m;
}

} // namespace

NoiseMethod parse_method(const std::string& name)
{
    if (name == "quadrature")
        return NoiseMethod::quadrature;
    if (name == "mc" || name == "monte_carlo")
        return NoiseMethod::monte_carlo;
    config_error("unknown method '" + name + "'", "use 'quadrature' or 'mc'");
}

OutputFormat parse_format(const std::string& name)
{
    if (name == "csv")
        return OutputFormat::csv;
    if (name == "json")
        return OutputFormat::json;
    config_error("unknown output format '" + name + "'", "use 'csv' or 'json'");
}

RunConfig parse_run_config(std::istream& in, const std::string& base_dir)
{
    json root;
    try {
        root = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        config_error(std::string("configuration is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    try {
        allow_keys(root, "config",
                   {"physical", "dimensionless", "waveform", "lambda", "sweep", "method", "quadrature", "monte_carlo",
                    "variant", "plateau_check", "max_step", "richardson", "ic_temperature_model", "workers", "output",
                    "ix_values"});
        if (root.contains("physical"))
            cfg.physical = parse_physical(root.at("physical"));
        if (root.contains("dimensionless")) {
            cfg.dimensionless = parse_dimensionless(root.at("dimensionless"));
            if (cfg.physical) {
                const json& d = root.at("dimensionless");
                if (d.size() != (d.contains("mu_initial") ? 1u : 0u))
                    config_error("with a 'physical' block only 'dimensionless.mu_initial' may be set",
                                 "remove the other dimensionless entries");
            }
        }
        if (root.contains("waveform"))
            cfg.waveform = parse_waveform(root.at("waveform"), base_dir);
        cfg.lambda = optional_number(root, "lambda", "config");
        if (root.contains("sweep")) {
            const json& s = root.at("sweep");
            allow_keys(s, "sweep", {"axis", "values", "range"});
            SweepSpec spec;
            const std::string axis = text(s, "axis", "sweep");
            if (axis == "temperature")
                spec.axis = SweepAxis::temperature;
            else if (axis == "beta_c")
                spec.axis = SweepAxis::beta_c;
            else if (axis == "duration")
                spec.axis = SweepAxis::duration;
            else if (axis == "lambda")
                spec.axis = SweepAxis::lambda;
            else
                config_error("unknown sweep axis '" + axis + "'", "use temperature, beta_c, duration or lambda");
            if (s.contains("values") == s.contains("range"))
                config_error("a sweep needs exactly one of 'values' and 'range'");
            spec.values = parse_values(s.contains("values") ? s.at("values") : s.at("range"), "sweep");
            cfg.sweep = std::move(spec);
        }
        if (root.contains("method"))
            cfg.coefficients.method = parse_method(text(root, "method", "config"));
        if (root.contains("quadrature")) {
            const json& q = root.at("quadrature");
            allow_keys(q, "quadrature", {"rel_tol", "max_panels", "kernel"});
            auto& o = cfg.coefficients.quadrature;
            o.rel_tol = optional_number(q, "rel_tol", "quadrature").value_or(o.rel_tol);
            if (q.contains("max_panels"))
                o.max_panels = count(q, "max_panels", "quadrature");
            if (q.contains("kernel"))
                o.kernel = parse_kernel(text(q, "kernel", "quadrature"));
            cfg.coefficients.monte_carlo.kernel = o.kernel;
        }
        if (root.contains("monte_carlo")) {
            const json& m = root.at("monte_carlo");
            const std::string where = "monte_carlo";
            allow_keys(m, where,
                       {"sample_budget", "n_adapt_iterations", "stratification_bins", "importance_bins", "seed",
                        "workers"});
            auto& o = cfg.coefficients.monte_carlo;
            if (m.contains("sample_budget"))
                o.sample_budget = count(m, "sample_budget", where);
            if (m.contains("n_adapt_iterations"))
                o.n_adapt_iterations = count(m, "n_adapt_iterations", where);
            if (m.contains("stratification_bins"))
                o.stratification_bins = count(m, "stratification_bins", where);
            if (m.contains("importance_bins"))
                o.importance_bins = count(m, "importance_bins", where);
            if (m.contains("seed")) {
                if (!m.at("seed").is_number_unsigned())
                    config_error("'monte_carlo.seed' must be an unsigned integer");
                o.rng_seed = m.at("seed").get<std::uint64_t>();
            }
            if (m.contains("workers"))
                o.workers = count(m, "workers", where);
        }
        if (root.contains("variant")) {
            const std::string v = text(root, "variant", "config");
            if (v == "full")
                cfg.variant = GrayZoneVariant::full;
            else if (v == "asymptotic")
                cfg.variant = GrayZoneVariant::asymptotic;
            else
                config_error("unknown variant '" + v + "'", "use 'full' or 'asymptotic'");
        }
        if (root.contains("plateau_check"))
            cfg.plateau_check = root.at("plateau_check").get<bool>();
        cfg.max_step = optional_number(root, "max_step", "config");
        if (root.contains("richardson"))
            cfg.richardson = root.at("richardson").get<bool>();
        if (root.contains("ic_temperature_model"))
            cfg.ic_model = parse_ic_model(root.at("ic_temperature_model"));
        if (root.contains("workers"))
            cfg.workers = count(root, "workers", "config");
        if (root.contains("output")) {
            const json& o = root.at("output");
            allow_keys(o, "output", {"format", "path"});
            if (o.contains("format"))
                cfg.format = parse_format(text(o, "format", "output"));
            if (o.contains("path"))
                cfg.output_path = text(o, "path", "output");
        }
        if (root.contains("ix_values"))
            cfg.ix_values = parse_values(root.at("ix_values"), "ix_values");
    } catch (const json::exception& e) {
        config_error(std::string("malformed configuration: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        config_error("cannot open configuration file '" + path + "'");
    return parse_run_config(in, std::filesystem::path(path).parent_path().string());
}

} // namespace jjgz
