#pragma once

#include "casimir/asymptotics.hpp"
#include "casimir/lifshitz.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace casimir {

enum class Axis { separation, twist, temperature, rho_perp, rho_par };

const char* axis_name(Axis axis);  // column label, e.g. "d_um"

/// One or two strictly monotone axes; values of a 2-D grid are stored with the
/// last axis varying fastest.
struct ScanGrid {
    std::vector<Axis> axes;
    std::vector<std::vector<double>> values;  // SI units (m, rad, K) or plain ratios

    std::size_t size() const;
    void validate() const;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct ScanResult {
    ScanGrid grid;
    std::string quantity;  // column label of the value
    std::vector<double> values;
    std::vector<double> est_error;
    std::vector<bool> valid;  // false where the node is undefined (reported, not emitted as a number)
    Metadata metadata;
};

struct ThetaMaxResult {
    double theta_max = 0.0;      // rad, in (0, pi/2)
    double torque_at_max = 0.0;  // N m / m^2
    double est_error = 0.0;
};

/// hbar c / (k_B T).
double thermal_wavelength(double T);

/// Twist angle in (0, pi/2) maximizing |M|. The free energy is even and
/// pi-periodic in theta, so a 33-angle profile on [0, pi/2] determines its
/// cosine series; the maximization runs on that series and the torque at the
/// optimum is re-evaluated directly. Throws DegenerateInputError when |M| stays
/// below its error estimate everywhere.
ThetaMaxResult find_theta_max(const Scenario& scenario, const QuadratureSpec& quad = {});

enum class RatioMode { fixed_theta, max_theta };

/// M(T_hot) / M(T_cold) on a separation grid (T_cold may be 0).
ScanResult thermal_ratio_curve(const Scenario& scenario, const std::vector<double>& d_grid, RatioMode mode,
                               const QuadratureSpec& quad = {}, double T_hot = 300.0, double T_cold = 0.0);

struct SignReversal {
    double d_star = 0.0;  // m
    double torque_below = 0.0;  // torque at the lower end of the final bracket
    double torque_above = 0.0;
    int evaluations = 0;
};

struct Bracket {
    double lo = 0.1e-6;
    double hi = 10e-6;
};

/// Separation where the torque changes sign. The bracket is widened by factors
/// of 2 up to [10 nm, 100 um] before giving up with a BracketError.
SignReversal find_sign_reversal(const Scenario& scenario, Bracket bracket = {}, const QuadratureSpec& quad = {},
                                double d_rel_tol = 1e-4);

enum class Quantity { energy, torque, pressure };

const char* quantity_name(Quantity q, bool femto = false);

ScanResult scan_d(const Scenario& scenario, const std::vector<double>& d_grid, Quantity q,
                  const QuadratureSpec& quad = {});
ScanResult scan_theta(const Scenario& scenario, const std::vector<double>& theta_grid, Quantity q,
                      const QuadratureSpec& quad = {});
ScanResult scan_T(const Scenario& scenario, const std::vector<double>& T_grid, Quantity q,
                  const QuadratureSpec& quad = {});

/// Torque against temperature at fixed d and theta; T_grid must lie in (0, 1000] K.
ScanResult temperature_tuning_curve(const Scenario& scenario, const std::vector<double>& T_grid,
                                    const QuadratureSpec& quad = {});

struct ParamSpaceMap {
    ScanResult theta_max;   // rad
    ScanResult torque_max;  // M_max d^2 / (k_B T), dimensionless
};

/// Zero-frequency map over rho_perp = eps_perp(0)/eps3(0) and
/// rho_par = eps_par(0)/eps3(0) for two identical plates. theta_resolution is
/// the number of profile angles on [0, pi/2] (odd, <= 39).
ParamSpaceMap param_space_map(const std::vector<double>& rho_perp_grid, const std::vector<double>& rho_par_grid,
                              int theta_resolution = 33);

/// Grid helpers. log spacing requires positive endpoints.
std::vector<double> linspace(double start, double stop, int count);
std::vector<double> logspace(double start, double stop, int count);

}  // namespace casimir
