#include "casimir/analysis.hpp"

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/version.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <sstream>

namespace casimir {

namespace {

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Metadata base_metadata(const Scenario& s, const QuadratureSpec& q) {
    return {{"engine_version", engine_version},
            {"timestamp", utc_timestamp()},
            {"plate1", s.plate1.name},
            {"plate2", s.plate2.name},
            {"medium", s.medium.is_constant() ? "constant eps3=" + format_number(s.medium.static_value())
                                               : "oscillator eps3(0)=" + format_number(s.medium.static_value())},
            {"d_m", format_number(s.d)},
            {"theta_rad", format_number(s.theta)},
            {"T_K", format_number(s.T)},
            {"rel_tol", format_number(q.rel_tol)},
            {"phi_points_start", std::to_string(q.phi_points_start)},
            {"u_cutoff", format_number(q.u_cutoff)},
            {"matsubara_consecutive", std::to_string(q.matsubara_consecutive)},
            {"max_matsubara", std::to_string(q.max_matsubara)}};
}

/// F(theta) - F(0) = a_0/2 + sum_m a_m cos(2 m theta) from samples at theta_j = j pi / (2K).
struct CosineSeries {
    std::vector<double> a;

    explicit CosineSeries(const std::vector<double>& samples) {
        const std::size_t K = samples.size() - 1;
        a.assign(K + 1, 0.0);
        for (std::size_t m = 0; m <= K; ++m) {
            double sum = 0.0;
            for (std::size_t j = 0; j <= K; ++j) {
                const double w = (j == 0 || j == K) ? 0.5 : 1.0;
                sum += w * samples[j] * std::cos(pi * double(m * j % (2 * K)) / double(K));
            }
            a[m] = 2.0 * sum / double(K);
        }
    }

    /// -dF/dtheta
    double torque(double theta) const {
        const std::size_t K = a.size() - 1;
        double sum = 0.0;
        for (std::size_t m = 1; m <= K; ++m) {
            const double w = m == K ? 0.5 : 1.0;
            sum += w * 2.0 * double(m) * a[m] * std::sin(2.0 * double(m) * theta);
        }
        return sum;
    }

    /// Bound on the torque error induced by sample errors of size `sample_error`.
    double torque_noise(double sample_error) const {
        const double K = double(a.size() - 1);
        return K * (K + 1.0) * 2.0 * sample_error;
    }
};

/// Maximizes |M| of the series on (0, pi/2): coarse scan on the sample nodes,
/// then Brent's method inside the best bracket.
double maximize_series(const CosineSeries& series) {
    const std::size_t K = series.a.size() - 1;
    const double step = 0.5 * pi / double(K);
    std::size_t best = 1;
    double best_value = -1.0;
    // 33-point scan at the nodes, refined by a 4x sub-grid so narrow peaks are not missed
    for (std::size_t j = 1; j < 4 * K; ++j) {
        const double v = std::abs(series.torque(0.25 * step * double(j)));
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    const double lo = std::max(1e-12, 0.25 * step * double(best - 1));
    const double hi = std::min(0.5 * pi - 1e-12, 0.25 * step * double(best + 1));
    const auto r = boost::math::tools::brent_find_minima([&](double t) { return -std::abs(series.torque(t)); },
                                                         lo, hi, 40);
    return r.first;
}

std::vector<double> profile_angles(int count) {
    std::vector<double> t(count);
    for (int j = 0; j < count; ++j) t[j] = 0.5 * pi * double(j) / double(count - 1);
    return t;
}

void require_grid(const std::vector<double>& g, const char* name, bool positive) {
    if (g.size() < 2) throw DomainError(std::string(name) + " grid needs at least 2 nodes");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i]) || (positive && !(g[i] > 0.0)))
            throw DomainError(std::string(name) + " grid values must be finite" + (positive ? " and positive" : ""));
        if (i > 0 && !(g[i] > g[i - 1])) throw DomainError(std::string(name) + " grid must be strictly increasing");
    }
}

struct Value {
    double value, error;
};

Value evaluate(const Scenario& s, Quantity q, const QuadratureSpec& quad) {
    switch (q) {
        case Quantity::energy: {
            const auto r = free_energy(s, quad);
            return {r.value, r.est_error};
        }
        case Quantity::torque: {
            const auto r = torque(s, quad);
            return {r.value, r.est_error};
        }
        case Quantity::pressure: {
            const auto r = pressure(s, quad);
            return {r.value, r.est_error};
        }
    }
    throw DomainError("unknown quantity");
}

template <class Modify>
ScanResult scan_1d(const Scenario& base, Axis axis, const std::vector<double>& grid, Quantity q,
                   const QuadratureSpec& quad, Modify modify) {
    ScanResult out;
    out.grid = {{axis}, {grid}};
    out.quantity = quantity_name(q);
    out.values.assign(grid.size(), 0.0);
    out.est_error.assign(grid.size(), 0.0);
    out.valid.assign(grid.size(), true);
    out.metadata = base_metadata(base, quad);
    tbb::parallel_for(std::size_t{0}, grid.size(), [&](std::size_t i) {
        Scenario s = base;
        modify(s, grid[i]);
        const auto v = evaluate(s, q, quad);
        out.values[i] = v.value;
        out.est_error[i] = v.error;
    });
    return out;
}

}  // namespace

const char* axis_name(Axis axis) {
    switch (axis) {
        case Axis::separation: return "d_um";
        case Axis::twist: return "theta_rad";
        case Axis::temperature: return "T_K";
        case Axis::rho_perp: return "rho_perp";
        case Axis::rho_par: return "rho_par";
    }
    return "?";
}

const char* quantity_name(Quantity q, bool femto) {
    switch (q) {
        case Quantity::energy: return "energy_J_per_m2";
        case Quantity::torque: return femto ? "torque_fNm_per_m2" : "torque_Nm_per_m2";
        case Quantity::pressure: return "pressure_N_per_m2";
    }
    return "?";
}

std::size_t ScanGrid::size() const {
    std::size_t n = values.empty() ? 0 : 1;
    for (const auto& v : values) n *= v.size();
    return n;
}

void ScanGrid::validate() const {
    if (axes.empty() || axes.size() != values.size()) throw DomainError("scan grid: axes and values disagree");
    for (std::size_t i = 0; i < axes.size(); ++i) require_grid(values[i], axis_name(axes[i]), false);
}

double thermal_wavelength(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("thermal_wavelength: T must be > 0");
    return PhysicalConstants::hbar * PhysicalConstants::c / (PhysicalConstants::k_B * T);
}

ThetaMaxResult find_theta_max(const Scenario& scenario, const QuadratureSpec& quad) {
    const auto thetas = profile_angles(33);
    const auto profile = free_energy_profile(scenario, thetas, quad);
    std::vector<double> samples(thetas.size(), 0.0);
    double sample_error = 0.0;
    for (std::size_t j = 1; j < thetas.size(); ++j) {
        samples[j] = profile.energy[j] - profile.energy[0];
        sample_error = std::max(sample_error, profile.est_error[j]);
    }
    const CosineSeries series(samples);
    const double theta = maximize_series(series);
    const double peak = std::abs(series.torque(theta));
    if (!(peak > series.torque_noise(sample_error)) || peak == 0.0)
        throw DegenerateInputError("torque is below the noise floor at every twist angle");

    Scenario s = scenario;
    s.theta = theta;
    const auto m = torque(s, quad);
    if (!(std::abs(m.value) > m.est_error))
        throw DegenerateInputError("torque at the optimum does not exceed its error estimate");
    return {theta, m.value, m.est_error};
}

ScanResult thermal_ratio_curve(const Scenario& scenario, const std::vector<double>& d_grid, RatioMode mode,
                               const QuadratureSpec& quad, double T_hot, double T_cold) {
    require_grid(d_grid, "d", true);
    if (!(T_hot > 0.0) || !(T_cold >= 0.0)) throw DomainError("thermal_ratio_curve: invalid temperatures");
    ScanResult out;
    out.grid = {{Axis::separation}, {d_grid}};
    out.quantity = mode == RatioMode::fixed_theta ? "torque_ratio" : "max_torque_ratio";
    out.values.assign(d_grid.size(), 0.0);
    out.est_error.assign(d_grid.size(), 0.0);
    out.valid.assign(d_grid.size(), true);
    out.metadata = base_metadata(scenario, quad);
    out.metadata.emplace_back("mode", mode == RatioMode::fixed_theta ? "fixed-theta" : "max-theta");
    out.metadata.emplace_back("T_hot_K", format_number(T_hot));
    out.metadata.emplace_back("T_cold_K", format_number(T_cold));

    tbb::parallel_for(std::size_t{0}, d_grid.size(), [&](std::size_t i) {
        Scenario hot = scenario, cold = scenario;
        hot.d = cold.d = d_grid[i];
        hot.T = T_hot;
        cold.T = T_cold;
        Value mh{}, mc{};
        try {
            if (mode == RatioMode::fixed_theta) {
                const auto a = torque(hot, quad), b = torque(cold, quad);
                mh = {a.value, a.est_error};
                mc = {b.value, b.est_error};
            } else {
                const auto a = find_theta_max(hot, quad), b = find_theta_max(cold, quad);
                mh = {a.torque_at_max, a.est_error};
                mc = {b.torque_at_max, b.est_error};
            }
        } catch (const DegenerateInputError&) {
            out.valid[i] = false;
            return;
        }
        if (!(std::abs(mc.value) > mc.error)) {
            out.valid[i] = false;
            return;
        }
        const double ratio = mh.value / mc.value;
        out.values[i] = ratio;
        out.est_error[i] = std::abs(ratio) * (mh.error / std::abs(mh.value) + mc.error / std::abs(mc.value));
    });
    return out;
}

SignReversal find_sign_reversal(const Scenario& scenario, Bracket bracket, const QuadratureSpec& quad,
                                double d_rel_tol) {
    constexpr double kMin = 10e-9, kMax = 100e-6;
    if (!(bracket.lo > 0.0) || !(bracket.hi > bracket.lo)) throw DomainError("sign reversal: invalid bracket");
    if (!(d_rel_tol > 0.0)) throw DomainError("sign reversal: tolerance must be > 0");
    std::map<double, double> cache;  // log d -> torque
    int evaluations = 0;
    auto M = [&](double x) {
        if (auto it = cache.find(x); it != cache.end()) return it->second;
        Scenario s = scenario;
        s.d = std::exp(x);
        const double v = torque(s, quad).value;
        ++evaluations;
        cache.emplace(x, v);
        return v;
    };
    double lo = std::log(bracket.lo), hi = std::log(bracket.hi);
    double f_lo = M(lo), f_hi = M(hi);
    while (std::signbit(f_lo) == std::signbit(f_hi)) {
        const bool can_lo = std::exp(lo) > kMin * (1.0 + 1e-12);
        const bool can_hi = std::exp(hi) < kMax * (1.0 - 1e-12);
        if (!can_lo && !can_hi)
            throw BracketError("torque has the same sign at d = " + format_number(std::exp(lo)) + " m and d = " +
                                   format_number(std::exp(hi)) + " m",
                               f_lo, f_hi);
        if (can_lo) {
            lo = std::max(lo - std::log(2.0), std::log(kMin));
            f_lo = M(lo);
        }
        if (std::signbit(f_lo) != std::signbit(f_hi)) break;
        if (can_hi) {
            hi = std::min(hi + std::log(2.0), std::log(kMax));
            f_hi = M(hi);
        }
    }
    if (f_lo == 0.0) return {std::exp(lo), f_lo, f_lo, evaluations};
    if (f_hi == 0.0) return {std::exp(hi), f_hi, f_hi, evaluations};

    const double log_tol = std::log1p(d_rel_tol);
    std::uintmax_t max_iter = 100;
    const auto root = boost::math::tools::toms748_solve(
        M, lo, hi, f_lo, f_hi, [&](double a, double b) { return std::abs(b - a) <= log_tol; }, max_iter);
    const double a = root.first, b = root.second;
    return {std::exp(0.5 * (a + b)), M(a), M(b), evaluations};
}

ScanResult scan_d(const Scenario& scenario, const std::vector<double>& d_grid, Quantity q,
                  const QuadratureSpec& quad) {
    require_grid(d_grid, "d", true);
    return scan_1d(scenario, Axis::separation, d_grid, q, quad, [](Scenario& s, double v) { s.d = v; });
}

ScanResult scan_theta(const Scenario& scenario, const std::vector<double>& theta_grid, Quantity q,
                      const QuadratureSpec& quad) {
    require_grid(theta_grid, "theta", false);
    return scan_1d(scenario, Axis::twist, theta_grid, q, quad, [](Scenario& s, double v) { s.theta = v; });
}

ScanResult scan_T(const Scenario& scenario, const std::vector<double>& T_grid, Quantity q,
                  const QuadratureSpec& quad) {
    require_grid(T_grid, "T", false);
    if (T_grid.front() < 0.0) throw DomainError("T grid must be >= 0");
    return scan_1d(scenario, Axis::temperature, T_grid, q, quad, [](Scenario& s, double v) { s.T = v; });
}

ScanResult temperature_tuning_curve(const Scenario& scenario, const std::vector<double>& T_grid,
                                    const QuadratureSpec& quad) {
    require_grid(T_grid, "T", true);
    if (T_grid.back() > 1000.0) throw DomainError("temperature tuning grid must lie in (0, 1000] K");
    return scan_T(scenario, T_grid, Quantity::torque, quad);
}

ParamSpaceMap param_space_map(const std::vector<double>& rho_perp_grid, const std::vector<double>& rho_par_grid,
                              int theta_resolution) {
    require_grid(rho_perp_grid, "rho_perp", true);
    require_grid(rho_par_grid, "rho_par", true);
    if (theta_resolution < 5 || theta_resolution % 2 == 0 || theta_resolution > 39)
        throw DomainError("param_space_map: theta_resolution must be odd and in [5, 39]");

    const ScanGrid grid{{Axis::rho_perp, Axis::rho_par}, {rho_perp_grid, rho_par_grid}};
    const std::size_t n_par = rho_par_grid.size();
    const std::size_t n = grid.size();
    ParamSpaceMap out;
    for (ScanResult* r : {&out.theta_max, &out.torque_max}) {
        r->grid = grid;
        r->values.assign(n, 0.0);
        r->est_error.assign(n, 0.0);
        r->valid.assign(n, true);
        r->metadata = {{"engine_version", engine_version},
                       {"timestamp", utc_timestamp()},
                       {"limit", "zero-frequency (high temperature), identical plates, eps3(0) = 1"},
                       {"theta_resolution", std::to_string(theta_resolution)}};
    }
    out.theta_max.quantity = "theta_max_rad";
    out.torque_max.quantity = "torque_max_normalized";
    out.torque_max.metadata.emplace_back("normalization", "M_max d^2 / (k_B T)");

    const auto thetas = profile_angles(theta_resolution);
    tbb::parallel_for(std::size_t{0}, n, [&](std::size_t idx) {
        const double rho_perp = rho_perp_grid[idx / n_par];
        const double rho_par = rho_par_grid[idx % n_par];
        if (std::abs(rho_par - rho_perp) <= 1e-12 * std::max(rho_par, rho_perp)) {
            out.theta_max.valid[idx] = out.torque_max.valid[idx] = false;
            return;
        }
        const StaticPlate plate{rho_par, rho_perp};
        const auto energy = reduced_energy_high_T(plate, plate, 1.0, thetas);
        std::vector<double> samples(energy.size());
        for (std::size_t j = 0; j < energy.size(); ++j) samples[j] = energy[j] - energy[0];
        const CosineSeries series(samples);
        const double noise = series.torque_noise(1e-10 * std::abs(energy[0]));
        const double theta = maximize_series(series);
        const double m = reduced_torque_high_T(plate, plate, 1.0, theta);
        if (!(std::abs(m) > noise)) {
            out.theta_max.valid[idx] = out.torque_max.valid[idx] = false;
            return;
        }
        out.theta_max.values[idx] = theta;
        out.theta_max.est_error[idx] = 1e-8;
        out.torque_max.values[idx] = m;
        out.torque_max.est_error[idx] = noise;
    });
    return out;
}

std::vector<double> linspace(double start, double stop, int count) {
    if (count < 2) throw DomainError("grid count must be >= 2");
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = start + (stop - start) * double(i) / double(count - 1);
    v.back() = stop;
    return v;
}

std::vector<double> logspace(double start, double stop, int count) {
    if (!(start > 0.0) || !(stop > 0.0)) throw DomainError("log grid endpoints must be positive");
    auto v = linspace(std::log(start), std::log(stop), count);
    for (auto& x : v) x = std::exp(x);
    v.front() = start;
    v.back() = stop;
    return v;
}

}  // namespace casimir
