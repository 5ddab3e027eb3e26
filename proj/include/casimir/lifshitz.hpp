#pragma once

#include "casimir/materials.hpp"
#include "casimir/optics.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace casimir {

/// Two uniaxial half-spaces with in-plane optic axes, twisted by theta,
/// separated by an isotropic medium of thickness d at temperature T.
struct Scenario {
    Material plate1;
    Material plate2;
    Medium medium;
    double d = 1e-6;     // m
    double theta = 0.0;  // rad, optic axis of plate 2 relative to plate 1
    double T = 0.0;      // K

    void validate() const;
};

struct QuadratureSpec {
    double rel_tol = 1e-8;
    int phi_points_start = 16;
    double u_cutoff = 60.0;
    int matsubara_consecutive = 3;
    long max_matsubara = 1000000;

    int max_phi_points = 8192;
    double theta_step = 1e-3;   // rad, finite-difference step for the torque
    double d_step_rel = 1e-3;   // relative finite-difference step for the pressure

    void validate() const;
};

struct FreeEnergyResult {
    double value = 0.0;      // J/m^2
    double est_error = 0.0;  // J/m^2
    long n_terms_used = 0;   // Matsubara terms, or xi nodes at T = 0
};

struct TorqueResult {
    double value = 0.0;  // N m per m^2
    double est_error = 0.0;
};

struct PressureResult {
    double value = 0.0;  // N/m^2, negative = attractive
    double est_error = 0.0;
};

/// Plate-2 reflection matrix expressed in the cavity basis shared with plate 1
/// (mirror image through the gap): flips both off-diagonal entries.
ReflectionMatrix facing_basis(const ReflectionMatrix& r);

/// log det(1 - r1 r2 e^{-2 rho3 d}), with propagation = e^{-2 rho3 d}.
/// Throws ReflectionConventionError if the determinant is not positive.
double log_det_round_trip(const ReflectionMatrix& r1, const ReflectionMatrix& r2_facing, double propagation);

/// Round-trip log determinant for the mode (xi, k) whose in-plane wave vector
/// makes angle mode.alpha with the optic axis of plate 1.
double log_det_D(const ModeCoords& mode, const Scenario& scenario);

/// f(xi) = (1 / 4 pi^2) int dphi int dk k log det D, in 1/m^2.
double mode_energy_f(double xi, const Scenario& scenario, const QuadratureSpec& quad = {});

FreeEnergyResult free_energy_finite_T(const Scenario& scenario, const QuadratureSpec& quad = {});
FreeEnergyResult free_energy_zero_T(const Scenario& scenario, const QuadratureSpec& quad = {});
/// Dispatches on scenario.T (T == 0 uses the frequency integral).
FreeEnergyResult free_energy(const Scenario& scenario, const QuadratureSpec& quad = {});

/// M = -dF/dtheta by Richardson-extrapolated central differences.
TorqueResult torque(const Scenario& scenario, const QuadratureSpec& quad = {});

/// P = -dF/dd by the same scheme.
PressureResult pressure(const Scenario& scenario, const QuadratureSpec& quad = {});

/// Free energy at several twist angles, evaluated on shared quadrature nodes so
/// that differences between entries are free of quadrature noise.
struct EnergyProfile {
    std::vector<double> theta;
    std::vector<double> energy;
    std::vector<double> est_error;
};

EnergyProfile free_energy_profile(const Scenario& scenario, std::span<const double> thetas,
                                  const QuadratureSpec& quad = {});

/// Number of worker threads used for internal parallel loops (0 = hardware).
void set_thread_count(int threads);

}  // namespace casimir
