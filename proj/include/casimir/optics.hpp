#pragma once

#include "casimir/materials.hpp"

namespace casimir {

/// One evanescent mode at imaginary frequency.
struct ModeCoords {
    double xi;     // imaginary frequency, rad/s
    double k;      // in-plane wave number, 1/m
    double alpha;  // azimuth of the in-plane wave vector relative to the optic axis, rad
};

/// 2x2 reflection matrix in the (p, s) basis.
///
/// Amplitudes: s is the tangential E component normal to the plane of
/// incidence, p is the tangential H component normal to the plane of incidence
/// scaled by the medium impedance. Isotropic entries reduce to
/// rp = (eps rho3 - eps3 rho) / (eps rho3 + eps3 rho) and rs = (rho3 - rho) / (rho3 + rho).
struct ReflectionMatrix {
    double rpp = 0.0, rps = 0.0;
    double rsp = 0.0, rss = 0.0;

    double spectral_norm() const;
};

struct DecayConstants {
    double rho3;   // medium
    double rho_o;  // ordinary wave in the plate
    double rho_e;  // extraordinary wave in the plate
};

DecayConstants decay_constants(const ModeCoords& mode, double eps_par, double eps_perp, double eps3);

struct FresnelCoefficients {
    double rp;
    double rs;
};

FresnelCoefficients fresnel_isotropic(const ModeCoords& mode, double eps_plate, double eps3);

/// Static (xi = 0) p reflection off a uniaxial plate with in-plane optic axis,
/// r = (eps3 - q) / (eps3 + q), q = eps_perp sqrt(1 + (eps_par/eps_perp - 1) cos^2 alpha).
/// Note the sign: this is minus the xi -> 0 limit of rpp in ReflectionMatrix.
double r_pp_static(double eps_par0, double eps_perp0, double eps3_0, double alpha);

/// Reflection off a uniaxial half-space for permittivities already evaluated at mode.xi.
ReflectionMatrix reflection_matrix_uniaxial(const ModeCoords& mode, double eps_par, double eps_perp, double eps3);

ReflectionMatrix reflection_matrix_uniaxial(const ModeCoords& mode, const Material& plate, double medium_eps3);

namespace detail {
/// Boundary-condition solve without the near-isotropic fallback; exposed for tests.
ReflectionMatrix solve_boundary(const ModeCoords& mode, double eps_par, double eps_perp, double eps3);
}  // namespace detail

}  // namespace casimir
