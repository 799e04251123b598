#pragma once

#include <optional>
#include <string>
#include <vector>

namespace jjgz {

/// CODATA 2018 exact values (SI).
namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double hbar = 1.054571817e-34;               // J s
inline constexpr double boltzmann = 1.380649e-23;             // J/K
} // namespace constants

/// Junction parameters in SI units. Exactly one of capacitance and
/// plasma_frequency must be set, and at least one of shunt_resistance and
/// beta_c.
struct PhysicalParams {
    double critical_current = 0.0;             // A
    std::optional<double> shunt_resistance;    // ohm
    std::optional<double> capacitance;         // F
    std::optional<double> plasma_frequency;    // rad/s
    std::optional<double> beta_c;              // given directly instead of R
    double temperature = 0.0;                  // K
    double cutoff_multiplier = 50.0;           // bath cutoff in units of the plasma frequency

    /// Throws a configuration error when the invariants do not hold.
    void validate() const;

    double omega_p() const;
    double omega_c() const;
    double stewart_mccumber() const;
};

/// The complete dimensionless problem statement. Time is measured in units of
/// 1/omega_p, energies in units of hbar*omega_p.
struct DimensionlessParams {
    double beta_c = 1.0;
    double q = 500.0;           // E_J / (hbar omega_p) = Ic / (2 e omega_p)
    double theta = 0.0;         // k_B T / (hbar omega_p)
    double omega_cut = 50.0;    // bath cutoff / omega_p
    double mu_initial = 1.0;

    /// Damping coefficient of the scaled equation of motion, 1/sqrt(beta_c).
    double damping() const;

    /// Hard checks; throws a configuration error. mu_initial above one is
    /// accepted only for inductively renormalized drives.
    void validate(bool allow_mu_above_one = false) const;

    /// Soft regime checks (quantum and thermal current scales small against
    /// Ic, cutoff high enough).
    std::vector<std::string> warnings() const;
};

DimensionlessParams to_dimensionless(const PhysicalParams& p);

} // namespace jjgz
