#include "field_oracle.hpp"

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/optics.hpp"

#include <doctest.h>

#include <random>

using namespace casimir;

namespace {

constexpr double c0 = PhysicalConstants::c;

oracle::Wave scaled(const ModeCoords& m) {
    const double kap0 = m.xi / c0, s = std::hypot(m.k, kap0);
    return {m.k / s, kap0 / s};
}

double max_entry_diff(const ReflectionMatrix& a, const ReflectionMatrix& b) {
    return std::max({std::abs(a.rpp - b.rpp), std::abs(a.rps - b.rps), std::abs(a.rsp - b.rsp),
                     std::abs(a.rss - b.rss)});
}

struct Draw {
    ModeCoords mode;
    double eps_par, eps_perp, eps3;
};

Draw random_draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double xi = 1e14 * std::pow(10.0, 3.0 * u(rng));
    const double k = (xi / c0) * std::pow(10.0, 4.0 * u(rng) - 2.0);
    Draw d{{xi, k, 2.0 * pi * u(rng)}, 1.0 + 40.0 * u(rng), 1.0 + 40.0 * u(rng), 1.0 + 3.0 * u(rng)};
    if (std::abs(d.eps_par - d.eps_perp) < 1e-3) d.eps_par += 0.5;
    return d;
}

}  // namespace

TEST_CASE("decay constants") {
    const double kap = 1e6;
    const auto dc = decay_constants({kap * c0, 1e6, 0.0}, 4.0, 2.0, 1.0);
    CHECK(dc.rho_e == doctest::Approx(1e6 * std::sqrt(6.0)).epsilon(1e-14));
    CHECK(dc.rho3 == doctest::Approx(1e6 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(dc.rho_o == doctest::Approx(1e6 * std::sqrt(3.0)).epsilon(1e-14));

    const auto iso = decay_constants({kap * c0, 2e6, 0.7}, 5.0, 5.0, 1.0);
    CHECK(iso.rho_o == doctest::Approx(iso.rho_e).epsilon(1e-14));

    const auto st = decay_constants({0.0, 3e6, 0.4}, 9.0, 3.0, 2.0);
    CHECK(st.rho3 == doctest::Approx(3e6));
    CHECK(st.rho_e == doctest::Approx(3e6 * std::sqrt(1.0 + 2.0 * std::cos(0.4) * std::cos(0.4))));

    CHECK_THROWS_AS(decay_constants({0.0, 0.0, 0.0}, 2.0, 2.0, 1.0), DomainError);
}

TEST_CASE("extraordinary decay constant is a root of the wave operator") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto d = random_draw(rng);
        const auto w = scaled(d.mode);
        const double s = std::hypot(d.mode.k, d.mode.xi / c0);
        const auto dc = decay_constants(d.mode, d.eps_par, d.eps_perp, d.eps3);
        const auto roots = oracle::mode_q_squared(w, oracle::uniaxial_tensor(d.eps_par, d.eps_perp, d.mode.alpha));
        const double qe = dc.rho_e / s, qo = dc.rho_o / s;
        const double m1 = std::min(std::abs(roots[0] - qe * qe), std::abs(roots[1] - qe * qe));
        const double m2 = std::min(std::abs(roots[0] - qo * qo), std::abs(roots[1] - qo * qo));
        CHECK(m1 < 1e-9 * qe * qe);
        CHECK(m2 < 1e-9 * qo * qo);
    }
}

TEST_CASE("fresnel coefficients") {
    const ModeCoords m{2e15, 5e6, 0.3};
    const auto same = fresnel_isotropic(m, 2.5, 2.5);
    CHECK(same.rp == doctest::Approx(0.0));
    CHECK(same.rs == doctest::Approx(0.0));
    const auto mirror = fresnel_isotropic(m, 1e14, 1.0);
    CHECK(mirror.rp == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mirror.rs == doctest::Approx(-1.0).epsilon(1e-6));
    const auto st = fresnel_isotropic({0.0, 1e6, 0.0}, 5.0, 2.0);
    CHECK(st.rp == doctest::Approx(3.0 / 7.0));
    CHECK(st.rs == doctest::Approx(0.0));
}

TEST_CASE("static p reflection") {
    CHECK(r_pp_static(2.0, 2.0, 2.0, 0.9) == doctest::Approx(0.0));
    CHECK(r_pp_static(8.0, 3.0, 1.5, pi / 2) == doctest::Approx((1.5 - 3.0) / (1.5 + 3.0)));
    CHECK(r_pp_static(8.0, 2.0, 1.5, 0.0) == doctest::Approx((1.5 - 4.0) / (1.5 + 4.0)));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i)
        CHECK(std::abs(r_pp_static(1.0 + 1e3 * u(rng), 1.0 + 1e3 * u(rng), 1.0 + 10 * u(rng), 7 * u(rng))) < 1.0);
}

TEST_CASE("uniaxial matrix agrees with the brute-force field solve") {
    std::mt19937_64 rng(2024);
    double worst = 0.0, worst_imag = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto d = random_draw(rng);
        const auto r = detail::solve_boundary(d.mode, d.eps_par, d.eps_perp, d.eps3);
        const auto o = oracle::reflection(scaled(d.mode), d.eps_par, d.eps_perp, d.mode.alpha, d.eps3);
        const ReflectionMatrix ref{o(0, 0).real(), o(0, 1).real(), o(1, 0).real(), o(1, 1).real()};
        worst = std::max(worst, max_entry_diff(r, ref));
        worst_imag = std::max({worst_imag, std::abs(o(0, 0).imag()), std::abs(o(0, 1).imag()),
                               std::abs(o(1, 0).imag()), std::abs(o(1, 1).imag())});
    }
    CHECK(worst < 1e-10);
    CHECK(worst_imag < 1e-10);
}

TEST_CASE("isotropic plates reduce to Fresnel") {
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        auto d = random_draw(rng);
        const auto r = reflection_matrix_uniaxial(d.mode, d.eps_perp, d.eps_perp, d.eps3);
        const auto f = fresnel_isotropic(d.mode, d.eps_perp, d.eps3);
        worst = std::max(worst, max_entry_diff(r, {f.rp, 0.0, 0.0, f.rs}));
        // the boundary solve itself, slightly off isotropy, lands on the same values
        const auto near = detail::solve_boundary(d.mode, d.eps_perp * (1 + 1e-7), d.eps_perp, d.eps3);
        CHECK(max_entry_diff(near, {f.rp, 0.0, 0.0, f.rs}) < 1e-6);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("near-isotropic branch is continuous") {
    const ModeCoords m{3e15, 2e7, 0.6};
    const double eps = 4.0;
    const auto inside = reflection_matrix_uniaxial(m, eps * (1 + 0.9e-9), eps, 1.0);
    const auto outside = reflection_matrix_uniaxial(m, eps * (1 + 1.1e-9), eps, 1.0);
    // the exact solve just outside the switch carries roundoff ~ 1e-16 / 1e-9
    CHECK(max_entry_diff(inside, outside) < 1e-10);
}

TEST_CASE("azimuth symmetries") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 300; ++i) {
        const auto d = random_draw(rng);
        auto at = [&](double a) {
            return reflection_matrix_uniaxial({d.mode.xi, d.mode.k, a}, d.eps_par, d.eps_perp, d.eps3);
        };
        const auto r = at(d.mode.alpha), m = at(-d.mode.alpha), p = at(d.mode.alpha + pi);
        CHECK(std::abs(r.rpp - m.rpp) < 1e-12);
        CHECK(std::abs(r.rss - m.rss) < 1e-12);
        CHECK(std::abs(r.rps + m.rps) < 1e-12);
        CHECK(std::abs(r.rsp + m.rsp) < 1e-12);
        CHECK(max_entry_diff(r, p) < 1e-12);
        CHECK(r.spectral_norm() <= 1.0 + 1e-10);
        for (double a : {0.0, pi / 2, pi, 3 * pi / 2}) {
            const auto z = at(a);
            CHECK(std::abs(z.rps) < 1e-14);
            CHECK(std::abs(z.rsp) < 1e-14);
        }
    }
}

TEST_CASE("static limit is approached quadratically") {
    const double eps_par = 12.0, eps_perp = 3.0, eps3 = 1.3, alpha = 0.8, k = 1e7;
    const double target = -r_pp_static(eps_par, eps_perp, eps3, alpha);
    double prev = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double xi = k * c0 * std::pow(10.0, -1.0 - i);
        const auto r = reflection_matrix_uniaxial({xi, k, alpha}, eps_par, eps_perp, eps3);
        const double dev = std::abs(r.rpp - target);
        if (i > 0 && dev > 1e-13) CHECK(prev / dev == doctest::Approx(100.0).epsilon(0.05));
        CHECK(std::abs(r.rss) < 1.0);
        prev = dev;
    }
    const auto zero = reflection_matrix_uniaxial({0.0, k, alpha}, eps_par, eps_perp, eps3);
    CHECK(zero.rpp == doctest::Approx(target).epsilon(1e-15));
    CHECK(zero.rss == 0.0);
    CHECK(zero.rps == 0.0);
}

TEST_CASE("material overload evaluates the oscillator models") {
    const auto mat = Material::constant("x", 6.0, 2.0);
    const ModeCoords m{1e15, 4e6, 0.3};
    CHECK(max_entry_diff(reflection_matrix_uniaxial(m, mat, 1.0), reflection_matrix_uniaxial(m, 6.0, 2.0, 1.0)) == 0.0);
}
