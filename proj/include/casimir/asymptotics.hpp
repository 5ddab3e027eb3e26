#pragma once

#include <span>
#include <utility>
#include <vector>

namespace casimir {

/// Static permittivities of a plate, or ratios to the medium's static value.
struct StaticPlate {
    double eps_par0;
    double eps_perp0;
};

/// Li_3(z) = sum_{n>=1} z^n / n^3 on [-1, 1]. Throws DomainError for |z| > 1.
double polylog3(double z);

/// High-temperature (zero-frequency only) free energy per unit area,
/// -(k_B T / 32 pi^2 d^2) int_0^{2pi} dphi Li_3(r1(phi) r2(phi + theta)).
double free_energy_high_T(const StaticPlate& plate1, const StaticPlate& plate2, double eps3_0, double d,
                          double theta, double T);

/// -dF/dtheta of free_energy_high_T (Richardson central differences).
double torque_high_T(const StaticPlate& plate1, const StaticPlate& plate2, double eps3_0, double d, double theta,
                     double T);

/// Zero-frequency free energy at several angles on one shared azimuthal grid,
/// in units of k_B T / d^2.
std::vector<double> reduced_energy_high_T(const StaticPlate& plate1, const StaticPlate& plate2, double eps3_0,
                                          std::span<const double> thetas);

/// Torque in units of k_B T / d^2.
double reduced_torque_high_T(const StaticPlate& plate1, const StaticPlate& plate2, double eps3_0, double theta);

/// g(x) = x^2 / (1 - x^2)^2 log(1 - (1 - x)^2 / (1 + x)^2), with g(1) = -1/16.
double low_anisotropy_f(double x);

/// Weak-birefringence torque between identical plates,
/// M = k_B T / (16 pi d^2) g(eps_perp0 / eps3_0) Delta^2 sin(2 theta).
double low_anisotropy_torque(double eps_perp0_over_eps3, double delta, double d, double theta, double T);

struct PowerLawFit {
    double exponent;
    double r_squared;
};

/// Least-squares slope of log|value| against log d. Samples must share one sign.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> samples);

}  // namespace casimir
