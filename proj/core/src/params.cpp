#include "jjgz/params.hpp"

#include "jjgz/errors.hpp"

#include <cmath>
#include <sstream>

namespace jjgz {

namespace {

[[noreturn]] void config_error(const std::string& what, const std::string& hint = {})
{
    throw Error(ErrorKind::configuration, "model", what, hint);
}

bool positive(const std::optional<double>& v) { return v && std::isfinite(*v) && *v > 0.0; }

} // namespace

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::ingestion: return "ingestion error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::contract: return "contract error";
    case ErrorKind::numerical: return "numerical error";
    case ErrorKind::regime: return "regime error";
    }
    return "error";
}

void PhysicalParams::validate() const
{
    if (!(std::isfinite(critical_current) && critical_current > 0.0))
        config_error("critical current must be positive");
    if (!(std::isfinite(temperature) && temperature >= 0.0))
        config_error("temperature must be non-negative");
    if (capacitance.has_value() == plasma_frequency.has_value())
        config_error("exactly one of capacitance and plasma frequency must be given",
                     "set either 'capacitance' or 'omega_p_inv_ps'");
    if (capacitance && !positive(capacitance))
        config_error("capacitance must be positive");
    if (plasma_frequency && !positive(plasma_frequency))
        config_error("plasma frequency must be positive");
    if (!shunt_resistance && !beta_c)
        config_error("either shunt resistance or beta_c must be given");
    if (shunt_resistance && beta_c)
        config_error("shunt resistance and beta_c are contradictory; give only one");
    if (shunt_resistance && !positive(shunt_resistance))
        config_error("shunt resistance must be positive");
    if (beta_c && !positive(beta_c))
        config_error("beta_c must be positive");
    if (!(std::isfinite(cutoff_multiplier) && cutoff_multiplier > 0.0))
        config_error("cutoff multiplier must be positive");
}

double PhysicalParams::omega_p() const
{
    if (plasma_frequency)
        return *plasma_frequency;
    // omega_p^2 = 2 e Ic / (hbar C)
    return std::sqrt(2.0 * constants::elementary_charge * critical_current / (constants::hbar * *capacitance));
}

double PhysicalParams::omega_c() const
{
    if (shunt_resistance)
        return 2.0 * constants::elementary_charge * critical_current * *shunt_resistance / constants::hbar;
    return std::sqrt(*beta_c) * omega_p();
}

double PhysicalParams::stewart_mccumber() const
{
    if (beta_c)
        return *beta_c;
    const double ratio = omega_c() / omega_p();
    return ratio * ratio;
}

DimensionlessParams to_dimensionless(const PhysicalParams& p)
{
    p.validate();
    const double wp = p.omega_p();
    DimensionlessParams d;
    d.beta_c = p.stewart_mccumber();
    d.q = p.critical_current / (2.0 * constants::elementary_charge * wp);
    d.theta = constants::boltzmann * p.temperature / (constants::hbar * wp);
    d.omega_cut = p.cutoff_multiplier;
    d.mu_initial = 1.0;
    return d;
}

double DimensionlessParams::damping() const { return 1.0 / std::sqrt(beta_c); }

void DimensionlessParams::validate(bool allow_mu_above_one) const
{
    if (!(std::isfinite(beta_c) && beta_c > 0.0))
        config_error("beta_c must be positive and finite");
    if (!(std::isfinite(q) && q > 0.0))
        config_error("q must be positive and finite");
    if (!(std::isfinite(theta) && theta >= 0.0))
        config_error("theta must be non-negative and finite");
    if (!(std::isfinite(omega_cut) && omega_cut >= 10.0))
        config_error("omega_cut must be at least 10", "the bath cutoff should be 50 plasma frequencies");
    if (!(std::isfinite(mu_initial) && mu_initial > 0.0))
        config_error("mu_initial must be positive");
    if (!allow_mu_above_one && mu_initial > 1.0)
        config_error("mu_initial must not exceed one");
}

std::vector<std::string> DimensionlessParams::warnings() const
{
    std::vector<std::string> out;
    auto fmt = [](double v) {
        std::ostringstream s;
        s << v;
        return s.str();
    };
    if (1.0 / q > 0.1)
        out.push_back("1/q = " + fmt(1.0 / q) + " is not small: quantum current scale comparable to Ic");
    if (theta / q > 0.1)
        out.push_back("theta/q = " + fmt(theta / q) + " is not small: thermal current scale comparable to Ic");
    if (omega_cut < 50.0)
        out.push_back("omega_cut = " + fmt(omega_cut) + " below the recommended 50");
    return out;
}

} // namespace jjgz
