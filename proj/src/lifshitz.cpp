#include "casimir/lifshitz.hpp"

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <utility>

namespace casimir {

using quad::Estimate;
using quad::Lanes;

void Scenario::validate() const {
    if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("scenario: separation d must be > 0");
    if (!(T >= 0.0) || !std::isfinite(T)) throw DomainError("scenario: temperature must be >= 0");
    if (!std::isfinite(theta)) throw DomainError("scenario: theta must be finite");
}

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) throw DomainError("quadrature: rel_tol must lie in (0, 1e-3]");
    if (phi_points_start < 1 || matsubara_consecutive < 1 || max_matsubara < 1 || max_phi_points < phi_points_start)
        throw DomainError("quadrature: counts must be >= 1");
    if (!(u_cutoff > 0.0)) throw DomainError("quadrature: u_cutoff must be > 0");
    if (!(theta_step > 0.0) || !(d_step_rel > 0.0 && d_step_rel < 0.5))
        throw DomainError("quadrature: finite-difference steps out of range");
}

ReflectionMatrix facing_basis(const ReflectionMatrix& r) { return {r.rpp, -r.rps, -r.rsp, r.rss}; }

double log_det_round_trip(const ReflectionMatrix& r1, const ReflectionMatrix& r2, double propagation) {
    // A = r1 r2 e^{-2 rho3 d};  det(1 - A) = 1 - tr A + det A
    const double a11 = r1.rpp * r2.rpp + r1.rps * r2.rsp;
    const double a22 = r1.rsp * r2.rps + r1.rss * r2.rss;
    const double det1 = r1.rpp * r1.rss - r1.rps * r1.rsp;
    const double det2 = r2.rpp * r2.rss - r2.rps * r2.rsp;
    const double x = -(a11 + a22) * propagation + det1 * det2 * propagation * propagation;
    if (!(x > -1.0)) throw ReflectionConventionError("round-trip determinant is not positive");
    return std::log1p(x);
}

double log_det_D(const ModeCoords& mode, const Scenario& scenario) {
    scenario.validate();
    const double eps3 = scenario.medium.eval(mode.xi);
    const auto r1 = reflection_matrix_uniaxial(mode, scenario.plate1, eps3);
    const auto r2 = reflection_matrix_uniaxial({mode.xi, mode.k, mode.alpha + scenario.theta}, scenario.plate2, eps3);
    const double kap0 = mode.xi / PhysicalConstants::c;
    const double rho3 = std::sqrt(eps3 * kap0 * kap0 + mode.k * mode.k);
    return log_det_round_trip(r1, facing_basis(r2), std::exp(-2.0 * rho3 * scenario.d));
}

// ---------------------------------------------------------------------------

namespace {

std::unique_ptr<tbb::global_control> g_thread_limit;
std::mutex g_thread_mutex;

struct Variant {
    double theta;
    double d;
};

/// Lane j integrates L[a_j] - L[b_j] (or L[a_j] when b_j < 0) pointwise.
struct Plan {
    std::vector<Variant> variants;
    std::vector<std::pair<int, int>> lanes;
};

Plan single_plan(const Scenario& s) { return {{{s.theta, s.d}}, {{0, -1}}}; }

Plan derivative_plan(Variant base, Variant step) {
    auto at = [&](double w) { return Variant{base.theta + w * step.theta, base.d + w * step.d}; };
    return {{base, at(1.0), at(-1.0), at(0.5), at(-0.5)}, {{0, -1}, {1, 2}, {3, 4}}};
}

struct FrequencyPoint {
    double xi;
    double kap0;
    double eps1_par, eps1_perp, eps2_par, eps2_perp, eps3;
};

class Engine {
  public:
    Engine(const Scenario& s, const QuadratureSpec& q, Plan plan)
        : scenario_(s), quad_(q), plan_(std::move(plan)), d_ref_(s.d) {
        s.validate();
        q.validate();
        if (plan_.lanes.size() > quad::kMaxLanes) throw DomainError("too many simultaneous variants");
        d_min_ = d_ref_;
        for (const auto& v : plan_.variants) {
            if (!(v.d > 0.0)) throw DomainError("variant separation must be > 0");
            d_min_ = std::min(d_min_, v.d);
            auto it = std::find(thetas_.begin(), thetas_.end(), v.theta);
            theta_of_variant_.push_back(static_cast<int>(it - thetas_.begin()));
            if (it == thetas_.end()) thetas_.push_back(v.theta);
        }
    }

    std::size_t lanes() const { return plan_.lanes.size(); }

    FrequencyPoint at_frequency(double xi) const {
        return {xi,
                xi / PhysicalConstants::c,
                scenario_.plate1.parallel.eval(xi),
                scenario_.plate1.perpendicular.eval(xi),
                scenario_.plate2.parallel.eval(xi),
                scenario_.plate2.perpendicular.eval(xi),
                scenario_.medium.eval(xi)};
    }

    /// f(xi) lanes in 1/m^2.
    Estimate mode_energy(double xi) const {
        const auto fp = at_frequency(xi);
        // every mode is suppressed by at least e^{-u_min}; same truncation as the k tail
        if (2.0 * d_min_ * std::sqrt(fp.eps3) * fp.kap0 > quad_.u_cutoff) return {Lanes(lanes()), Lanes(lanes()), 0};
        const quad::Tolerance tol{0.3 * quad_.rel_tol, kDifferenceFloor};

        const double prefactor = 2.0 / (4.0 * pi * pi);  // [0, pi) doubled
        std::vector<Estimate> nodes;
        auto evaluate = [&](int count, int stride, int offset, int n) {
            std::vector<Estimate> out(count);
            tbb::parallel_for(0, count, [&](int j) {
                out[j] = u_integral(fp, pi * (offset + stride * j) / n);
            });
            return out;
        };

        int n = quad_.phi_points_start;
        Lanes sum(lanes()), err(lanes());
        std::size_t evals = 0;
        for (const auto& e : evaluate(n, 1, 0, n)) {
            sum += e.value;
            err += e.error;
            evals += e.evaluations;
        }
        Lanes estimate = (pi / n) * sum;
        while (true) {
            if (2 * n > quad_.max_phi_points) {
                double worst = 0.0;
                for (std::size_t i = 0; i < lanes(); ++i) worst = std::max(worst, err[i]);
                throw ConvergenceError("azimuthal quadrature did not converge", worst * prefactor);
            }
            for (const auto& e : evaluate(n, 2, 1, 2 * n)) {
                sum += e.value;
                err += e.error;
                evals += e.evaluations;
            }
            n *= 2;
            Lanes refined = (pi / n) * sum;
            Lanes change = quad::abs_diff(refined, estimate);
            estimate = refined;
            Lanes inner = (pi / n) * err;
            if (tol.met(change, estimate)) {
                Estimate out{prefactor * estimate, prefactor * (change + inner), evals};
                return out;
            }
        }
    }

    Estimate matsubara_sum(long& terms_used) const {
        const double kT = PhysicalConstants::k_B * scenario_.T;
        const double step = 2.0 * pi * kT / PhysicalConstants::hbar;
        const quad::Tolerance tol{quad_.rel_tol, kDifferenceFloor};

        Estimate first = mode_energy(0.0);
        Lanes sum = 0.5 * first.value, err = 0.5 * first.error;
        int quiet = 0;
        long n = 1;
        for (;; ++n) {
            if (n > quad_.max_matsubara) {
                double worst = 0.0;
                for (std::size_t i = 0; i < lanes(); ++i) worst = std::max(worst, err[i]);
                throw ConvergenceError("Matsubara sum exceeded max_matsubara terms", kT * worst);
            }
            const Estimate term = mode_energy(step * n);
            sum += term.value;
            err += term.error;
            Lanes magnitude = quad::abs_diff(term.value, Lanes(lanes()));
            quiet = tol.met(magnitude, sum) ? quiet + 1 : 0;
            if (quiet >= quad_.matsubara_consecutive) {
                err += magnitude;
                break;
            }
        }
        terms_used = n + 1;
        return {kT * sum, kT * err, 0};
    }

    Estimate zero_T_integral(long& nodes_used) const {
        // xi = (c / 2d) tan(pi t / 2) centers the grid on xi_c ~ c/d
        const double scale = PhysicalConstants::c / (2.0 * d_ref_);
        long count = 0;
        auto integrand = [&](double t) {
            ++count;
            const double arg = 0.5 * pi * t;
            const double cosv = std::cos(arg);
            const double xi = scale * std::tan(arg);
            const double jac = scale * 0.5 * pi / (cosv * cosv);
            if (!std::isfinite(xi) || !std::isfinite(jac)) return Lanes(lanes());
            Lanes f = mode_energy(xi).value;
            return jac * f;
        };
        const double breaks[] = {0.1, 0.25, 0.5, 0.75};
        const quad::Tolerance tol{quad_.rel_tol, kDifferenceFloor};
        auto est = quad::integrate_adaptive(integrand, 0.0, 1.0, breaks, tol, lanes());
        nodes_used = count;
        const double pref = PhysicalConstants::hbar / (2.0 * pi);
        return {pref * est.value, pref * est.error, est.evaluations};
    }

  private:
    static constexpr double kDifferenceFloor = 1e-12;
    static constexpr std::size_t kInnerPanels = 200;

    Lanes integrand(const FrequencyPoint& fp, double phi, double u) const {
        const double rho3 = u / (2.0 * d_ref_);
        const double k = std::sqrt(std::max(0.0, rho3 * rho3 - fp.eps3 * fp.kap0 * fp.kap0));
        const auto r1 = reflection_matrix_uniaxial({fp.xi, k, phi}, fp.eps1_par, fp.eps1_perp, fp.eps3);

        std::array<ReflectionMatrix, quad::kMaxLanes> r2;
        for (std::size_t t = 0; t < thetas_.size(); ++t)
            r2[t] = facing_basis(
                reflection_matrix_uniaxial({fp.xi, k, phi + thetas_[t]}, fp.eps2_par, fp.eps2_perp, fp.eps3));

        std::array<double, quad::kMaxLanes> logdet;
        for (std::size_t v = 0; v < plan_.variants.size(); ++v)
            logdet[v] = log_det_round_trip(r1, r2[theta_of_variant_[v]],
                                           std::exp(-u * plan_.variants[v].d / d_ref_));

        const double jac = u / (4.0 * d_ref_ * d_ref_);  // k dk = u du / 4d^2
        Lanes out(lanes());
        for (std::size_t j = 0; j < lanes(); ++j) {
            const auto [a, b] = plan_.lanes[j];
            out[j] = jac * (b < 0 ? logdet[a] : logdet[a] - logdet[b]);
        }
        return out;
    }

    Estimate u_integral(const FrequencyPoint& fp, double phi) const {
        const double u_min = 2.0 * d_ref_ * std::sqrt(fp.eps3) * fp.kap0;
        const double span = quad_.u_cutoff * d_ref_ / d_min_;
        std::array<double, 12> breaks{};
        std::size_t nb = 0;
        for (double w : {1.0, 4.0, 12.0, 30.0}) breaks[nb++] = u_min + w * span / 60.0;
        if (u_min > 1.0)
            for (double w : {1.5, 3.0}) breaks[nb++] = w * u_min;
        std::sort(breaks.begin(), breaks.begin() + nb);
        const quad::Tolerance tol{0.1 * quad_.rel_tol, kDifferenceFloor};
        // roundoff in nearly isotropic far-UV modes can stall the difference lanes;
        // the residual is carried in the error estimate instead
        return quad::integrate_adaptive([&](double u) { return integrand(fp, phi, u); }, u_min, u_min + span,
                                        std::span<const double>(breaks.data(), nb), tol, lanes(), kInnerPanels,
                                        quad::OnBudget::best_effort);
    }

    const Scenario& scenario_;
    QuadratureSpec quad_;
    Plan plan_;
    double d_ref_;
    double d_min_;
    std::vector<double> thetas_;
    std::vector<int> theta_of_variant_;
};

Estimate free_energy_lanes(const Scenario& s, const QuadratureSpec& q, Plan plan, long& terms) {
    Engine engine(s, q, std::move(plan));
    return s.T > 0.0 ? engine.matsubara_sum(terms) : engine.zero_T_integral(terms);
}

struct Derivative {
    double value, est_error;
};

/// -dF/dx from lanes {F, F(x+h)-F(x-h), F(x+h/2)-F(x-h/2)}.
Derivative richardson(const Estimate& e, double h) {
    const double coarse = -e.value[1] / (2.0 * h);
    const double fine = -e.value[2] / h;
    const double value = (4.0 * fine - coarse) / 3.0;
    const double quad_err = (e.error[1] / (2.0 * h) + 4.0 * e.error[2] / h) / 3.0;
    return {value, std::abs(fine - coarse) / 3.0 + quad_err};
}

}  // namespace

void set_thread_count(int threads) {
    std::lock_guard lock(g_thread_mutex);
    g_thread_limit.reset();
    if (threads > 0)
        g_thread_limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                                static_cast<std::size_t>(threads));
}

double mode_energy_f(double xi, const Scenario& scenario, const QuadratureSpec& quad) {
    if (!(xi >= 0.0)) throw DomainError("mode_energy_f: xi must be >= 0");
    Engine engine(scenario, quad, single_plan(scenario));
    return engine.mode_energy(xi).value[0];
}

FreeEnergyResult free_energy_finite_T(const Scenario& scenario, const QuadratureSpec& quad) {
    if (!(scenario.T > 0.0)) throw DomainError("free_energy_finite_T requires T > 0");
    Engine engine(scenario, quad, single_plan(scenario));
    long terms = 0;
    const auto e = engine.matsubara_sum(terms);
    return {e.value[0], e.error[0], terms};
}

FreeEnergyResult free_energy_zero_T(const Scenario& scenario, const QuadratureSpec& quad) {
    Scenario s = scenario;
    s.T = 0.0;
    Engine engine(s, quad, single_plan(s));
    long nodes = 0;
    const auto e = engine.zero_T_integral(nodes);
    return {e.value[0], e.error[0], nodes};
}

FreeEnergyResult free_energy(const Scenario& scenario, const QuadratureSpec& quad) {
    scenario.validate();
    return scenario.T > 0.0 ? free_energy_finite_T(scenario, quad) : free_energy_zero_T(scenario, quad);
}

TorqueResult torque(const Scenario& scenario, const QuadratureSpec& quad) {
    scenario.validate();
    quad.validate();
    const double h = quad.theta_step;
    long terms = 0;
    const auto e = free_energy_lanes(scenario, quad, derivative_plan({scenario.theta, scenario.d}, {h, 0.0}), terms);
    const auto m = richardson(e, h);
    return {m.value, m.est_error};
}

PressureResult pressure(const Scenario& scenario, const QuadratureSpec& quad) {
    scenario.validate();
    quad.validate();
    const double h = quad.d_step_rel * scenario.d;
    long terms = 0;
    const auto e = free_energy_lanes(scenario, quad, derivative_plan({scenario.theta, scenario.d}, {0.0, h}), terms);
    const auto p = richardson(e, h);
    return {p.value, p.est_error};
}

EnergyProfile free_energy_profile(const Scenario& scenario, std::span<const double> thetas,
                                  const QuadratureSpec& quad) {
    scenario.validate();
    if (thetas.empty()) return {};
    if (thetas.size() > quad::kMaxLanes) throw DomainError("free_energy_profile: too many angles");
    Plan plan;
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        plan.variants.push_back({thetas[j], scenario.d});
        plan.lanes.push_back({static_cast<int>(j), j == 0 ? -1 : 0});
    }
    long terms = 0;
    const auto e = free_energy_lanes(scenario, quad, std::move(plan), terms);
    EnergyProfile out;
    out.theta.assign(thetas.begin(), thetas.end());
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        out.energy.push_back(j == 0 ? e.value[0] : e.value[0] + e.value[j]);
        out.est_error.push_back(j == 0 ? e.error[0] : e.error[j]);
    }
    return out;
}

}  // namespace casimir
