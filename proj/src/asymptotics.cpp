#include "casimir/asymptotics.hpp"

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/optics.hpp"
#include "casimir/quadrature.hpp"

#include <array>
#include <cmath>

namespace casimir {

namespace {

double li3_series(double z) {
    double sum = 0.0, power = z;
    for (int n = 1; n < 200; ++n) {
        const double term = power / (double(n) * n * n);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        power *= z;
    }
    return sum;
}

// Li_3(e^mu) = zeta(3) + zeta(2) mu + (3/4 - log(-mu)/2) mu^2 + sum_{k>=3} zeta(3-k) mu^k / k!
double li3_near_one(double z) {
    const double mu = std::log(z);
    if (mu == 0.0) return zeta3;
    // zeta(3 - k) for k = 3..19; even negative arguments vanish
    static constexpr std::array<double, 17> zeta_neg = {
        -0.5,          -1.0 / 12.0, 0.0, 1.0 / 120.0, 0.0, -1.0 / 252.0, 0.0, 1.0 / 240.0, 0.0,
        -1.0 / 132.0,  0.0,         691.0 / 32760.0, 0.0, -1.0 / 12.0, 0.0, 3617.0 / 8160.0, 0.0};
    double sum = zeta3 + (pi * pi / 6.0) * mu + (0.75 - 0.5 * std::log(-mu)) * mu * mu;
    double power = mu * mu, factorial = 2.0;
    for (int k = 3; k < 20; ++k) {
        power *= mu;
        factorial *= k;
        sum += zeta_neg[k - 3] * power / factorial;
    }
    return sum;
}

void check_static(const StaticPlate& p, const char* which) {
    if (!(p.eps_par0 > 0.0) || !(p.eps_perp0 > 0.0))
        throw DomainError(std::string("static permittivities of ") + which + " must be positive");
}

constexpr double kHighTRelTol = 1e-10;
constexpr double kThetaStep = 1e-3;

/// Lanes: I(theta_0) and I(theta_j) - I(theta_0), I = int_0^{2pi} Li3(r1 r2) dphi.
quad::Lanes li3_azimuthal(const StaticPlate& p1, const StaticPlate& p2, double eps3, std::span<const double> thetas) {
    const std::size_t lanes = thetas.size();
    if (lanes == 0 || lanes > quad::kMaxLanes) throw DomainError("high-T energy: bad angle count");
    auto sample = [&](double phi) {
        quad::Lanes out(lanes);
        const double r1 = r_pp_static(p1.eps_par0, p1.eps_perp0, eps3, phi);
        double base = 0.0;
        for (std::size_t j = 0; j < lanes; ++j) {
            const double v = polylog3(r1 * r_pp_static(p2.eps_par0, p2.eps_perp0, eps3, phi + thetas[j]));
            if (j == 0) {
                base = v;
                out[0] = v;
            } else {
                out[j] = v - base;
            }
        }
        return out;
    };
    const quad::Tolerance tol{kHighTRelTol, 1e-15};
    int n = 16;
    quad::Lanes sum(lanes);
    for (int j = 0; j < n; ++j) sum += sample(pi * j / n);
    quad::Lanes estimate = (pi / n) * sum;
    while (true) {
        for (int j = 0; j < n; ++j) sum += sample(pi * (2 * j + 1) / (2 * n));
        n *= 2;
        quad::Lanes refined = (pi / n) * sum;
        const bool done = tol.met(quad::abs_diff(refined, estimate), refined);
        estimate = refined;
        if (done) break;
        if (n >= (1 << 20)) throw ConvergenceError("high-T azimuthal integral did not converge", 0.0);
    }
    return 2.0 * estimate;  // pi-periodic integrand
}

double reduced_prefactor() { return -1.0 / (32.0 * pi * pi); }

}  // namespace

double polylog3(double z) {
    if (!(std::abs(z) <= 1.0)) throw DomainError("polylog3: |z| must be <= 1");
    if (std::abs(z) <= 0.5) return li3_series(z);
    if (z > 0.0) return li3_near_one(z);
    // duplication: Li3(z) + Li3(-z) = Li3(z^2) / 4
    return 0.25 * polylog3(z * z) - li3_near_one(-z);
}

std::vector<double> reduced_energy_high_T(const StaticPlate& plate1, const StaticPlate& plate2, double eps3_0,
                                          std::span<const double> thetas) {
    check_static(plate1, "plate 1");
    check_static(plate2, "plate 2");
    if (!(eps3_0 > 0.0)) throw DomainError("medium static permittivity must be positive");
    const auto lanes = li3_azimuthal(plate1, plate2, eps3_0, thetas);
    std::vector<double> out(thetas.size());
    for (std::size_t j = 0; j < thetas.size(); ++j)
        out[j] = reduced_prefactor() * (j == 0 ? lanes[0] : lanes[0] + lanes[j]);
    return out;
}

double reduced_torque_high_T(const StaticPlate& plate1, const StaticPlate& plate2, double eps3_0, double theta) {
    check_static(plate1, "plate 1");
    check_static(plate2, "plate 2");
    if (!(eps3_0 > 0.0)) throw DomainError("medium static permittivity must be positive");
    const double h = kThetaStep;
    const std::array<double, 5> thetas = {theta, theta + h, theta - h, theta + 0.5 * h, theta - 0.5 * h};
    const auto lanes = li3_azimuthal(plate1, plate2, eps3_0, thetas);
    const double coarse = -reduced_prefactor() * (lanes[1] - lanes[2]) / (2.0 * h);
    const double fine = -reduced_prefactor() * (lanes[3] - lanes[4]) / h;
    return (4.0 * fine - coarse) / 3.0;
}

double free_energy_high_T(const StaticPlate& plate1, const StaticPlate& plate2, double eps3_0, double d,
                          double theta, double T) {
    if (!(d > 0.0) || !(T > 0.0)) throw DomainError("free_energy_high_T requires d > 0 and T > 0");
    const double t[] = {theta};
    return PhysicalConstants::k_B * T / (d * d) * reduced_energy_high_T(plate1, plate2, eps3_0, t)[0];
}

double torque_high_T(const StaticPlate& plate1, const StaticPlate& plate2, double eps3_0, double d, double theta,
                     double T) {
    if (!(d > 0.0) || !(T > 0.0)) throw DomainError("torque_high_T requires d > 0 and T > 0");
    return PhysicalConstants::k_B * T / (d * d) * reduced_torque_high_T(plate1, plate2, eps3_0, theta);
}

double low_anisotropy_f(double x) {
    if (!(x > 0.0)) throw DomainError("low_anisotropy_f: x must be > 0");
    const double e = x - 1.0;
    if (std::abs(e) < 1e-3)
        return -1.0 / 16.0 + e * e * (3.0 / 128.0 + e * (-3.0 / 128.0 + e * 25.0 / 1536.0));
    const double ratio = (1.0 - x) / (1.0 + x);
    const double denom = 1.0 - x * x;
    return x * x / (denom * denom) * std::log1p(-ratio * ratio);
}

double low_anisotropy_torque(double eps_perp0_over_eps3, double delta, double d, double theta, double T) {
    if (!(d > 0.0) || !(T > 0.0)) throw DomainError("low_anisotropy_torque requires d > 0 and T > 0");
    return PhysicalConstants::k_B * T / (16.0 * pi * d * d) * low_anisotropy_f(eps_perp0_over_eps3) * delta * delta *
           std::sin(2.0 * theta);
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 3) throw DomainError("fit_power_law: need at least 3 samples");
    const bool negative = samples.front().second < 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto [d, v] = samples[i];
        if (!(d > 0.0)) throw DomainError("fit_power_law: separations must be positive");
        if (i > 0 && !(d > samples[i - 1].first)) throw DomainError("fit_power_law: d must be strictly increasing");
        if (v == 0.0 || (v < 0.0) != negative)
            throw DomainError("fit_power_law: samples change sign; a power law is undefined across a reversal");
    }
    const double n = static_cast<double>(samples.size());
    double sx = 0, sy = 0;
    for (const auto& [d, v] : samples) {
        sx += std::log(d);
        sy += std::log(std::abs(v));
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [d, v] : samples) {
        const double dx = std::log(d) - mx, dy = std::log(std::abs(v)) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return {slope, r2};
}

}  // namespace casimir
