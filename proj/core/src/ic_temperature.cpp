#include "jjgz/ic_temperature.hpp"

#include "jjgz/errors.hpp"
#include "jjgz/params.hpp"

#include <cmath>

namespace jjgz {

double AmbegaokarBaratoff::gap(double temperature) const
{
    const double delta0 = gap_zero > 0.0 ? gap_zero : 1.764 * constants::boltzmann * critical_temperature;
    if (temperature <= 0.0)
        return delta0;
    return delta0 * std::tanh(1.74 * std::sqrt(critical_temperature / temperature - 1.0));
}

namespace {

double ab_current(const AmbegaokarBaratoff& m, double temperature)
{
    const double d = m.gap(temperature);
    if (temperature <= 0.0)
        return d;
    return d * std::tanh(d / (2.0 * constants::boltzmann * temperature));
}

} // namespace

double ic_scale(const IcTemperatureModel& model, double temperature)
{
    if (std::holds_alternative<ConstantIc>(model))
        return 1.0;
    const auto& m = std::get<AmbegaokarBaratoff>(model);
    if (!(m.critical_temperature > 0.0))
        throw Error(ErrorKind::configuration, "cli", "critical temperature must be positive");
    if (!(temperature >= 0.0) || temperature >= m.critical_temperature)
        throw Error(ErrorKind::domain, "cli", "temperature must lie in [0, Tc) for the Ambegaokar-Baratoff model",
                    "use the constant Ic model above Tc");
    if (!(m.reference_temperature > 0.0) || m.reference_temperature >= m.critical_temperature)
        throw Error(ErrorKind::domain, "cli", "reference temperature must lie in (0, Tc)");
    return ab_current(m, temperature) / ab_current(m, m.reference_temperature);
}

} // namespace jjgz
