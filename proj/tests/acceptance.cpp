// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include "casimir/analysis.hpp"
#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace casimir;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

int g_failures = 0;

void report(int id, const char* title, double budget_s, const std::function<Outcome()>& check) {
    const auto t0 = Clock::now();
    Outcome o{false, ""};
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool pass = o.pass;
    if (secs > budget_s) {
        pass = false;
        o.detail += " [over time budget]";
    }
    if (!pass) ++g_failures;
    std::printf("%s criterion %d (%s): %s (%.1f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", id, title,
                o.detail.c_str(), secs, budget_s);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

const MaterialCatalog& db() {
    static const MaterialCatalog catalog = bundled_materials();
    return catalog;
}

Scenario pair(const char* p1, const char* p2, double d, double theta, double T) {
    Scenario s;
    s.plate1 = db().at(p1);
    s.plate2 = db().at(p2);
    s.d = d;
    s.theta = theta;
    s.T = T;
    return s;
}

QuadratureSpec loose() {
    QuadratureSpec q;
    q.rel_tol = 1e-6;
    return q;
}

Outcome ideal_plate() {
    Scenario s;
    s.plate1 = s.plate2 = Material::constant("mirror", 1e6, 1e6);
    s.d = 1e-6;
    const double hbar_c = PhysicalConstants::hbar * PhysicalConstants::c;
    const double e_ideal = -hbar_c * pi * pi / (720.0 * std::pow(s.d, 3));
    const double p_ideal = -hbar_c * pi * pi / (240.0 * std::pow(s.d, 4));
    const auto e = free_energy(s);
    const auto p = pressure(s);
    const double re = e.value / e_ideal, rp = p.value / p_ideal;
    // informational: the finite-permittivity deficit shrinks roughly like log(eps)/sqrt(eps)
    s.plate1 = s.plate2 = Material::constant("mirror", 1e10, 1e10);
    const double re10 = free_energy(s).value / e_ideal;
    return {std::abs(re - 1.0) < 0.01 && std::abs(rp - 1.0) < 0.01,
            fmt("E/E_ideal = %.5f, P/P_ideal = %.5f at eps = 1e6 (need 1 +- 0.01); E/E_ideal = %.5f at eps = 1e10",
                re, rp, re10)};
}

Outcome zero_frequency() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> log_eps(0.0, std::log(200.0));
    std::uniform_real_distribution<double> angle(0.0, pi);
    QuadratureSpec q;
    q.rel_tol = 1e-11;
    const double T = 300.0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        Scenario s;
        const double a1 = std::exp(log_eps(rng)), b1 = std::exp(log_eps(rng));
        const double a2 = std::exp(log_eps(rng)), b2 = std::exp(log_eps(rng));
        const double e3 = 1.0 + std::exp(log_eps(rng)) / 20.0;
        s.plate1 = Material::constant("p1", a1, b1);
        s.plate2 = Material::constant("p2", a2, b2);
        s.medium = Medium(e3);
        s.d = 1e-6 * std::exp(log_eps(rng) / 2.0);
        s.theta = angle(rng);
        s.T = T;
        const double engine = PhysicalConstants::k_B * T * 0.5 * mode_energy_f(0.0, s, q);
        const double closed = free_energy_high_T({a1, b1}, {a2, b2}, e3, s.d, s.theta, T);
        worst = std::max(worst, rel(engine, closed));
    }
    return {worst < 1e-8, fmt("max relative deviation %.2e over 50 draws (need < 1e-8)", worst)};
}

Outcome low_anisotropy() {
    const double d = 10e-6, T = 300.0, theta = pi / 4;
    double err[3];
    const double deltas[3] = {0.1, 0.03, 0.01};
    for (int i = 0; i < 3; ++i) {
        const double dl = deltas[i];
        // rho_perp = 1 in vacuum; eps_par from the anisotropy definition
        const StaticPlate p{(1.0 + dl) / (1.0 - dl), 1.0};
        const double full = torque_high_T(p, p, 1.0, d, theta, T);
        const double approx = low_anisotropy_torque(1.0, dl, d, theta, T);
        err[i] = rel(approx, full);
    }
    // the torque itself is O(Delta^2), so a relative error O(Delta^2) means the
    // formula is exact through that order
    const double s1 = std::log(err[0] / err[1]) / std::log(deltas[0] / deltas[1]);
    const double s2 = std::log(err[1] / err[2]) / std::log(deltas[1] / deltas[2]);
    const bool ok = err[2] < 0.005 && std::abs(s1 - 2.0) < 0.25 && std::abs(s2 - 2.0) < 0.25;
    return {ok, fmt("relative error %.2e / %.2e / %.2e at Delta = 0.1 / 0.03 / 0.01; "
                    "log-log slopes %.3f, %.3f (need 2 +- 0.25)",
                    err[0], err[1], err[2], s1, s2)};
}

Outcome power_laws() {
    const auto q = loose();
    std::vector<std::pair<double, double>> cold, hot;
    for (double d : {30e-6, 50e-6, 80e-6}) cold.push_back({d, torque(pair("BaTiO3", "BaTiO3", d, pi / 4, 0.0), q).value});
    const double lt = thermal_wavelength(300.0);
    for (double f : {5.0, 8.0, 12.0, 20.0})
        hot.push_back({f * lt, torque(pair("BaTiO3", "BaTiO3", f * lt, pi / 4, 300.0), q).value});
    const auto fc = fit_power_law(cold), fh = fit_power_law(hot);
    return {std::abs(fc.exponent + 3.0) <= 0.05 && std::abs(fh.exponent + 2.0) <= 0.05,
            fmt("BaTiO3 pair at pi/4: T=0 exponent %.4f over 30-80 um, 300 K exponent %.4f over 5-20 lambda_T",
                fc.exponent, fh.exponent)};
}

Outcome thermal_wavelength_check() {
    const double l = thermal_wavelength(300.0) * 1e6;
    return {std::abs(l - 7.64) <= 0.01, fmt("lambda_T(300 K) = %.4f um", l)};
}

Outcome symmetry() {
    std::string detail;
    bool ok = true;
    auto check = [&](const char* what, double value, double tol) {
        const bool pass = std::abs(value) <= tol;
        ok = ok && pass;
        detail += fmt("%s %.1e/%.1e%s; ", what, std::abs(value), tol, pass ? "" : " (!)");
    };
    const QuadratureSpec q;
    for (double T : {0.0, 300.0}) {
        const char* tag = T == 0.0 ? "T=0" : "300K";
        auto s = pair("CaCO3", "CaCO3", 0.5e-6, 0.6, T);
        const auto mp = torque(s, q);
        s.theta = -0.6;
        const auto mm = torque(s, q);
        s.theta = 0.6 + pi;
        const auto mpi = torque(s, q);
        s.theta = 0.0;
        const auto m0 = torque(s, q);
        s.theta = pi / 2;
        const auto m90 = torque(s, q);
        const double scale = std::abs(mp.value);
        check(fmt("%s M(0)", tag).c_str(), m0.value / scale, std::max(m0.est_error / scale, 1e-10));
        check(fmt("%s M(pi/2)", tag).c_str(), m90.value / scale, std::max(m90.est_error / scale, 1e-10));
        check(fmt("%s M(-t)+M(t)", tag).c_str(), (mm.value + mp.value) / scale,
              std::max((mm.est_error + mp.est_error) / scale, 1e-10));
        check(fmt("%s M(t+pi)-M(t)", tag).c_str(), (mpi.value - mp.value) / scale,
              std::max((mpi.est_error + mp.est_error) / scale, 1e-10));
    }
    // gauge: flip both off-diagonals of both reflection matrices
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ModeCoords mode{1e15 * u(rng), 1e7 * u(rng) + 1e3, 2 * pi * u(rng)};
        const auto r1 = reflection_matrix_uniaxial(mode, 1.0 + 20 * u(rng), 1.0 + 20 * u(rng), 1.0 + u(rng));
        const auto r2 = facing_basis(reflection_matrix_uniaxial({mode.xi, mode.k, mode.alpha + 1.0},
                                                                1.0 + 20 * u(rng), 1.0 + 20 * u(rng), 1.5));
        const double prop = std::exp(-3.0 * u(rng));
        const double a = log_det_round_trip(r1, r2, prop);
        const double b = log_det_round_trip({r1.rpp, -r1.rps, -r1.rsp, r1.rss}, {r2.rpp, -r2.rps, -r2.rsp, r2.rss}, prop);
        worst = std::max(worst, std::abs(a - b));
    }
    check("gauge", worst, 1e-10);
    return {ok, detail};
}

Outcome quantitative_anchors() {
    const auto q = loose();
    std::string detail;
    bool ok = true;
    // each anchor group has its own 10 minute allowance
    auto lap_start = Clock::now();
    auto lap = [&](const char* what) {
        const double secs = std::chrono::duration<double>(Clock::now() - lap_start).count();
        if (secs > 600.0) ok = false;
        detail += fmt("[%s %.0f s%s] ", what, secs, secs > 600.0 ? " over budget" : "");
        lap_start = Clock::now();
    };
    auto within = [&](const char* what, double value, double target, double tol) {
        const bool pass = std::abs(value / target - 1.0) <= tol;
        ok = ok && pass;
        detail += fmt("%s %.4g vs %.4g (+-%.0f%%)%s; ", what, value, target, tol * 100, pass ? "" : " (!)");
    };

    // crossovers
    const auto xb = find_crossovers(db().at("BaB2O4"));
    const auto xt = find_crossovers(db().at("BaTiO3"));
    const auto xc = find_crossovers(db().at("CaCO3"));
    if (xb.size() != 1 || xt.size() != 1 || xc.size() != 2) {
        ok = false;
        detail += "wrong crossover count; ";
    } else {
        within("BaB2O4 xover", xb[0], 1.51e15, 0.02);
        within("BaTiO3 xover", xt[0], 2.17e16, 0.02);
        within("CaCO3 xover 1", xc[0], 2.69e14, 0.02);
        within("CaCO3 xover 2", xc[1], 2.90e16, 0.02);
    }
    lap("crossovers");

    // thermal ratio minimum for BaTiO3
    const auto grid = logspace(3e-6, 15e-6, 9);
    const auto base = pair("BaTiO3", "BaTiO3", 1e-6, pi / 4, 0.0);
    auto minimum = [](const ScanResult& r) {
        double m = 1e300;
        for (std::size_t i = 0; i < r.values.size(); ++i)
            if (r.valid[i]) m = std::min(m, r.values[i]);
        return m;
    };
    within("ratio min fixed", minimum(thermal_ratio_curve(base, grid, RatioMode::fixed_theta, q)), 0.005, 0.5);
    lap("ratio fixed");
    within("ratio min max-theta", minimum(thermal_ratio_curve(base, grid, RatioMode::max_theta, q)), 0.008, 0.5);
    lap("ratio max-theta");

    // sign reversal
    for (double T : {0.0, 300.0}) {
        const auto r = find_sign_reversal(pair("BaTiO3", "CaCO3", 1e-6, pi / 4, T), {}, q);
        within(T == 0.0 ? "d* T=0 [um]" : "d* 300K [um]", r.d_star * 1e6, T == 0.0 ? 1.17 : 1.87, 0.15);
        lap("reversal");
    }

    // temperature tuning
    const auto tune = temperature_tuning_curve(pair("BaTiO3", "CaCO3", 1.7e-6, pi / 4, 0.0), {100.0, 400.0}, q);
    const double m100 = tune.values[0] * 1e15, m400 = tune.values[1] * 1e15;
    if (!(m100 > 0.0 && m400 < 0.0)) {
        ok = false;
        detail += "no sign change between 100 K and 400 K; ";
    }
    within("M(100K) [fN]", m100, 24.0, 0.3);
    within("M(400K) [fN]", m400, -12.0, 0.3);
    lap("tuning");
    return {ok, detail};
}

Outcome param_map_structure() {
    // log grid whose step is ln(3)/8, so rho_par = 3 rho_perp (Delta = +0.5) sits
    // 8 columns off the diagonal and rho_perp = 1 is the centre node
    const int n = 41;
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = std::pow(3.0, (i - 20) / 8.0);
    const auto map = param_space_map(g, g, 33);
    auto at = [&](const ScanResult& r, int i, int j) { return r.values[std::size_t(i) * n + j]; };
    auto valid = [&](int i, int j) { return bool(map.theta_max.valid[std::size_t(i) * n + j]); };

    bool diag_ok = true;
    for (int i = 0; i < n; ++i) diag_ok = diag_ok && !valid(i, i) && at(map.torque_max, i, i) == 0.0;

    double worst_near = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        worst_near = std::max(worst_near, std::abs(at(map.theta_max, i, i + 1) - pi / 4));
        worst_near = std::max(worst_near, std::abs(at(map.theta_max, i + 1, i) - pi / 4));
    }

    // |M| along Delta = +0.5 (rho_par = 3 rho_perp) and Delta = -0.5 (rho_par = rho_perp / 3)
    int best_pos = -1, best_neg = -1;
    double top_pos = 0.0, top_neg = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i + 8 < n && std::abs(at(map.torque_max, i, i + 8)) > top_pos) {
            top_pos = std::abs(at(map.torque_max, i, i + 8));
            best_pos = i;
        }
        if (i - 8 >= 0 && std::abs(at(map.torque_max, i, i - 8)) > top_neg) {
            top_neg = std::abs(at(map.torque_max, i, i - 8));
            best_neg = i;
        }
    }
    const double rp_pos = g[best_pos], rp_neg = g[best_neg];
    const bool ok = diag_ok && worst_near < 0.02 && rp_pos < 1.0 && rp_neg > 1.0;
    return {ok, fmt("diagonal zero and flagged: %s; max |theta_max - pi/4| next to diagonal %.4f; "
                    "optimal rho_perp %.3f at Delta=+0.5, %.3f at Delta=-0.5",
                    diag_ok ? "yes" : "no", worst_near, rp_pos, rp_neg)};
}

Outcome matsubara_vs_integral() {
    auto s = pair("quartz", "quartz", 100e-9, pi / 4, 0.0);
    const auto e0 = free_energy(s);
    s.T = 1.0;
    const auto e1 = free_energy(s);
    const double r = rel(e1.value, e0.value);
    return {r < 1e-3, fmt("quartz, d = 100 nm: F(1 K)/F(0) - 1 = %.2e with %ld Matsubara terms", e1.value / e0.value - 1.0,
                          e1.n_terms_used)};
}

}  // namespace

int main() {
    report(1, "ideal-plate limit", 10, ideal_plate);
    report(2, "zero-frequency consistency", 60, zero_frequency);
    report(3, "low-anisotropy consistency", 60, low_anisotropy);
    report(4, "power laws", 600, power_laws);
    report(5, "thermal wavelength", 1, thermal_wavelength_check);
    report(6, "symmetry suite", 600, symmetry);
    report(7, "quantitative anchors", 3000, quantitative_anchors);
    report(8, "parameter-space map structure", 300, param_map_structure);
    report(9, "Matsubara sum vs frequency integral", 600, matsubara_vs_integral);
    return g_failures;
}
