#include "casimir/optics.hpp"

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace casimir {

namespace {

constexpr double kNearIsotropic = 1e-9;

void check_mode(const ModeCoords& mode) {
    if (!(mode.xi >= 0.0) || !(mode.k >= 0.0)) throw DomainError("mode requires xi >= 0 and k >= 0");
    if (mode.xi == 0.0 && mode.k == 0.0) throw DomainError("mode (xi, k) = (0, 0) is excluded");
}

void check_eps(double eps_par, double eps_perp, double eps3) {
    if (!(eps_par > 0.0) || !(eps_perp > 0.0) || !(eps3 > 0.0))
        throw DomainError("permittivities must be positive");
}

}  // namespace

double ReflectionMatrix::spectral_norm() const {
    Eigen::Matrix2d m;
    m << rpp, rps, rsp, rss;
    return Eigen::JacobiSVD<Eigen::Matrix2d>(m).singularValues()(0);
}

DecayConstants decay_constants(const ModeCoords& mode, double eps_par, double eps_perp, double eps3) {
    check_mode(mode);
    check_eps(eps_par, eps_perp, eps3);
    const double kap0 = mode.xi / PhysicalConstants::c;
    const double kap0_sq = kap0 * kap0, k_sq = mode.k * mode.k;
    const double cos_a = std::cos(mode.alpha);
    return {std::sqrt(eps3 * kap0_sq + k_sq), std::sqrt(eps_perp * kap0_sq + k_sq),
            std::sqrt(eps_par * kap0_sq + k_sq * (1.0 + (eps_par / eps_perp - 1.0) * cos_a * cos_a))};
}

FresnelCoefficients fresnel_isotropic(const ModeCoords& mode, double eps_plate, double eps3) {
    check_mode(mode);
    check_eps(eps_plate, eps_plate, eps3);
    const double kap0 = mode.xi / PhysicalConstants::c;
    const double rho3 = std::sqrt(eps3 * kap0 * kap0 + mode.k * mode.k);
    const double rho = std::sqrt(eps_plate * kap0 * kap0 + mode.k * mode.k);
    return {(eps_plate * rho3 - eps3 * rho) / (eps_plate * rho3 + eps3 * rho), (rho3 - rho) / (rho3 + rho)};
}

double r_pp_static(double eps_par0, double eps_perp0, double eps3_0, double alpha) {
    check_eps(eps_par0, eps_perp0, eps3_0);
    const double c = std::cos(alpha);
    const double q = eps_perp0 * std::sqrt(1.0 + (eps_par0 / eps_perp0 - 1.0) * c * c);
    return (eps3_0 - q) / (eps3_0 + q);
}

namespace detail {

// Fields are written as e^{i k x + lambda z} with the medium at z > 0 and the
// plate at z < 0; with the normal components carrying a factor i, all
// tangential components are real. Rows: E_x, E_y, kap0 h_x, h_y / kap0, where
// h = Z0 H and all wave numbers are scaled by sqrt(k^2 + kap0^2).
ReflectionMatrix solve_boundary(const ModeCoords& mode, double eps_par, double eps_perp, double eps3) {
    const double kap0_si = mode.xi / PhysicalConstants::c;
    const double scale = std::hypot(mode.k, kap0_si);
    const double kap0 = kap0_si / scale, k = mode.k / scale;
    const double kap0_sq = kap0 * kap0, k_sq = k * k;
    const double c = std::cos(mode.alpha), s = std::sin(mode.alpha);

    const double rho3 = std::sqrt(eps3 * kap0_sq + k_sq);
    const double rho_o = std::sqrt(eps_perp * kap0_sq + k_sq);
    const double rho_e = std::sqrt(eps_par * kap0_sq + k_sq * (1.0 + (eps_par / eps_perp - 1.0) * c * c));
    const double p = k_sq + eps_perp * kap0_sq;

    Eigen::Vector4d ord(-s, c, rho_o * c, eps_perp * s / rho_o);
    Eigen::Vector4d ext(c, eps_perp * kap0_sq * s / p, rho_e * eps_perp * kap0_sq * s / p, -rho_e * eps_perp * c / p);
    ord /= ord.cwiseAbs().maxCoeff();
    ext /= ext.cwiseAbs().maxCoeff();

    Eigen::Matrix4d m;
    m.col(0) << rho3 / eps3, 0.0, 0.0, 1.0;  // reflected p
    m.col(1) << 0.0, 1.0, -rho3, 0.0;        // reflected s
    m.col(2) = -ord;
    m.col(3) = -ext;

    Eigen::Matrix<double, 4, 2> rhs;
    rhs.col(0) << rho3 / eps3, 0.0, 0.0, -1.0;  // minus incident p
    rhs.col(1) << 0.0, -1.0, -rho3, 0.0;        // minus incident s

    const Eigen::Matrix<double, 4, 2> x = m.partialPivLu().solve(rhs);

    // p amplitudes above are h_y / kap0; convert to impedance-scaled h_y.
    const double n3 = std::sqrt(eps3);
    return {x(0, 0), x(0, 1) * kap0 / n3, x(1, 0) * n3 / kap0, x(1, 1)};
}

}  // namespace detail

ReflectionMatrix reflection_matrix_uniaxial(const ModeCoords& mode, double eps_par, double eps_perp, double eps3) {
    check_mode(mode);
    check_eps(eps_par, eps_perp, eps3);

    if (mode.xi == 0.0) {
        // electrostatic limit: s decouples with rs = 0, mixing vanishes
        return {-r_pp_static(eps_par, eps_perp, eps3, mode.alpha), 0.0, 0.0, 0.0};
    }

    const double split = eps_par - eps_perp;
    if (std::abs(split) < kNearIsotropic * eps_perp) {
        const auto f = fresnel_isotropic(mode, eps_perp, eps3);
        ReflectionMatrix r{f.rp, 0.0, 0.0, f.rs};
        if (split != 0.0) {
            // first order in (eps_par - eps_perp) around the isotropic point
            const double h = 1e-5 * eps_perp;
            const auto up = detail::solve_boundary(mode, eps_perp + h, eps_perp, eps3);
            const auto dn = detail::solve_boundary(mode, eps_perp - h, eps_perp, eps3);
            const double w = split / (2.0 * h);
            r.rpp += w * (up.rpp - dn.rpp);
            r.rps += w * (up.rps - dn.rps);
            r.rsp += w * (up.rsp - dn.rsp);
            r.rss += w * (up.rss - dn.rss);
        }
        return r;
    }
    return detail::solve_boundary(mode, eps_par, eps_perp, eps3);
}

ReflectionMatrix reflection_matrix_uniaxial(const ModeCoords& mode, const Material& plate, double medium_eps3) {
    check_mode(mode);
    return reflection_matrix_uniaxial(mode, plate.parallel.eval(mode.xi), plate.perpendicular.eval(mode.xi),
                                      medium_eps3);
}

}  // namespace casimir
