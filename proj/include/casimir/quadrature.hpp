#pragma once

#include "casimir/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <span>
#include <vector>

namespace casimir::quad {

inline constexpr std::size_t kMaxLanes = 40;

/// Fixed-capacity vector of integrand components integrated together on
/// shared nodes. Lane 0 is the reference magnitude; other lanes may carry
/// pointwise differences that vanish by symmetry.
struct Lanes {
    std::array<double, kMaxLanes> v{};
    std::size_t n = 1;

    Lanes() = default;
    explicit Lanes(std::size_t count) : n(count) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    Lanes& operator+=(const Lanes& o) {
        for (std::size_t i = 0; i < n; ++i) v[i] += o.v[i];
        return *this;
    }
    Lanes& operator*=(double a) {
        for (std::size_t i = 0; i < n; ++i) v[i] *= a;
        return *this;
    }
    friend Lanes operator*(double a, Lanes x) { return x *= a; }
    friend Lanes operator+(Lanes x, const Lanes& y) { return x += y; }
};

Lanes abs_diff(const Lanes& a, const Lanes& b);

/// Convergence rule shared by all integrators: lane 0 must satisfy a relative
/// tolerance; difference lanes i>0 satisfy max(rel_tol |I_i|, floor |I_0|).
struct Tolerance {
    double rel_tol = 1e-8;
    double difference_floor = 1e-14;

    bool met(const Lanes& error, const Lanes& value) const;
    /// Largest error / allowed ratio over the lanes (<= 1 means converged).
    double ratio(const Lanes& error, const Lanes& value) const;
};

struct Estimate {
    Lanes value;
    Lanes error;
    std::size_t evaluations = 0;
};

struct GaussKronrod15 {
    static const std::array<double, 8> xgk;
    static const std::array<double, 8> wgk;
    static const std::array<double, 4> wg;
};

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b] with the given initial
/// breakpoints (strictly inside (a, b)). Bisects the panel with the worst
/// error ratio until the Tolerance holds.
/// The integrand has signature Lanes(double). With OnBudget::best_effort an
/// exhausted panel budget returns the current estimate and its error instead
/// of throwing.
enum class OnBudget { raise, best_effort };

template <class F>
Estimate integrate_adaptive(F&& f, double a, double b, std::span<const double> breaks, const Tolerance& tol,
                            std::size_t lanes, std::size_t max_panels = 4000, OnBudget on_budget = OnBudget::raise);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// ---------------------------------------------------------------------------

namespace detail {

struct Panel {
    double a, b;
    Lanes value, error;
    double ratio;  // filled by the driver
    std::size_t order;
};

template <class F>
Panel gk15_panel(F& f, double a, double b, std::size_t lanes) {
    const double center = 0.5 * (a + b), half = 0.5 * (b - a);
    Lanes fc = f(center);
    Lanes gauss(lanes), kronrod(lanes);
    for (std::size_t i = 0; i < lanes; ++i) {
        gauss[i] = GaussKronrod15::wg[3] * fc[i];
        kronrod[i] = GaussKronrod15::wgk[7] * fc[i];
    }
    std::array<Lanes, 7> f_lo, f_hi;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * GaussKronrod15::xgk[j];
        f_lo[j] = f(center - dx);
        f_hi[j] = f(center + dx);
        const Lanes& f1 = f_lo[j];
        const Lanes& f2 = f_hi[j];
        for (std::size_t i = 0; i < lanes; ++i) {
            const double sum = f1[i] + f2[i];
            kronrod[i] += GaussKronrod15::wgk[j] * sum;
            if (j % 2 == 1) gauss[i] += GaussKronrod15::wg[j / 2] * sum;
        }
    }
    // QUADPACK error heuristic: scale |K - G| against the integral of |f - mean|
    Panel p{a, b, Lanes(lanes), Lanes(lanes), 0.0, 0};
    for (std::size_t i = 0; i < lanes; ++i) {
        const double mean = 0.5 * kronrod[i];
        double resasc = GaussKronrod15::wgk[7] * std::abs(fc[i] - mean);
        for (int j = 0; j < 7; ++j) resasc += GaussKronrod15::wgk[j] * (std::abs(f_lo[j][i] - mean) + std::abs(f_hi[j][i] - mean));
        resasc *= std::abs(half);
        double abserr = std::abs((kronrod[i] - gauss[i]) * half);
        if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
        p.value[i] = kronrod[i] * half;
        p.error[i] = abserr;
    }
    return p;
}

}  // namespace detail

template <class F>
Estimate integrate_adaptive(F&& f, double a, double b, std::span<const double> breaks, const Tolerance& tol,
                            std::size_t lanes, std::size_t max_panels, OnBudget on_budget) {
    std::vector<double> edges;
    edges.reserve(breaks.size() + 2);
    edges.push_back(a);
    for (double x : breaks)
        if (x > edges.back() && x < b) edges.push_back(x);
    edges.push_back(b);

    std::vector<detail::Panel> panels;
    std::size_t order = 0, evals = 0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        panels.push_back(detail::gk15_panel(f, edges[i], edges[i + 1], lanes));
        panels.back().order = order++;
        evals += 15;
    }

    auto totals = [&](Lanes& value, Lanes& error) {
        value = Lanes(lanes);
        error = Lanes(lanes);
        for (const auto& p : panels) {
            value += p.value;
            error += p.error;
        }
    };

    Lanes value, error;
    while (true) {
        totals(value, error);
        if (tol.met(error, value)) break;
        if (panels.size() >= max_panels) {
            if (on_budget == OnBudget::best_effort) break;
            double worst = 0.0;
            for (std::size_t i = 0; i < lanes; ++i) worst = std::max(worst, error[i]);
            throw ConvergenceError("adaptive quadrature exceeded panel budget", worst);
        }
        // bisect the panel contributing most to the worst lane
        std::size_t target = 0;
        double best = -1.0;
        for (std::size_t j = 0; j < panels.size(); ++j) {
            const double r = tol.ratio(panels[j].error, value);
            if (r > best) {
                best = r;
                target = j;
            }
        }
        const auto [pa, pb] = std::pair{panels[target].a, panels[target].b};
        const double mid = 0.5 * (pa + pb);
        if (!(mid > pa && mid < pb)) {
            double worst = 0.0;
            for (std::size_t i = 0; i < lanes; ++i) worst = std::max(worst, error[i]);
            throw ConvergenceError("adaptive quadrature reached machine resolution", worst);
        }
        auto left = detail::gk15_panel(f, pa, mid, lanes);
        auto right = detail::gk15_panel(f, mid, pb, lanes);
        evals += 30;
        left.order = order++;
        right.order = order++;
        panels[target] = left;
        panels.push_back(right);
    }
    // deterministic summation in left-to-right order
    std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    totals(value, error);
    return {value, error, evals};
}

}  // namespace casimir::quad
