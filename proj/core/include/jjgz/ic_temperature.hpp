#pragma once

#include <variant>

namespace jjgz {

/// Critical current independent of temperature.
struct ConstantIc {};

/// Ambegaokar-Baratoff Ic(T) ~ Delta(T) tanh(Delta(T) / 2 k_B T) with the
/// interpolated BCS gap Delta(T) = Delta0 tanh(1.74 sqrt(Tc/T - 1)).
struct AmbegaokarBaratoff {
    double critical_temperature = 9.2;  // K (niobium)
    double gap_zero = 0.0;              // J; zero selects the weak-coupling 1.764 k_B Tc
    double reference_temperature = 4.2; // K, where the configured Ic was measured

    double gap(double temperature) const;
};

using IcTemperatureModel = std::variant<ConstantIc, AmbegaokarBaratoff>;

/// Ic(T) / Ic(T_ref). Domain error for T >= Tc, T < 0 or T_ref outside (0, Tc).
double ic_scale(const IcTemperatureModel& model, double temperature);

} // namespace jjgz
