#include "casimir/cli.hpp"

#include "casimir/analysis.hpp"
#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/materials.hpp"
#include "casimir/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string_view>

namespace casimir::cli {

namespace {

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class UnknownMaterial : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid number '" + s + "' in " + what);
    }
}

struct Options {
    std::string plate1, plate2, medium = "1", materials;
    std::string d_um = "1", theta = "0.7853981633974483", T = "0";
    std::string out;
    bool degrees = false, femto = false;
    int threads = 0;
    QuadratureSpec quad;
    // subcommand specific
    std::string quantity = "torque";
    std::string bracket_um;
    std::string rho_perp, rho_par;
    int theta_resolution = 33;
    std::string ratio_mode = "fixed";
    double T_hot = 300.0, T_cold = 0.0;
    std::string material_name;
};

struct Context {
    LoadedMaterials db;
    Options opt;
    std::vector<std::string> args;

    const Material& material(const std::string& name) const {
        if (!db.catalog.contains(name)) {
            std::string list;
            for (const auto& n : db.catalog.names()) list += (list.empty() ? "" : ", ") + n;
            throw UnknownMaterial("unknown material '" + name + "'; available: " + (list.empty() ? "(none)" : list));
        }
        return db.catalog.at(name);
    }

    Medium medium() const {
        const std::string& m = opt.medium;
        if (db.catalog.contains(m)) {
            const auto& mat = db.catalog.at(m);
            if (!(mat.parallel == mat.perpendicular))
                throw UsageError("medium '" + m + "' is anisotropic; the gap medium must be isotropic");
            return Medium(mat.parallel);
        }
        char* end = nullptr;
        const double eps = std::strtod(m.c_str(), &end);
        if (end == m.c_str() || *end != '\0') material(m);  // reports as unknown material
        if (!(eps >= 1.0)) throw UsageError("medium permittivity must be >= 1");
        return Medium(eps);
    }

    double theta_value(double v) const { return opt.degrees ? v * pi / 180.0 : v; }
};

void require_single(const RangeSpec& r, const char* flag) {
    if (r.is_range) throw UsageError(std::string(flag) + " takes a single value for this subcommand");
}

void require_range(const RangeSpec& r, const char* flag) {
    if (!r.is_range) throw UsageError(std::string(flag) + " must be a range start:stop:count[log] for this subcommand");
}

class Writer {
  public:
    Writer(const Context& ctx, std::ostream& fallback) : ctx_(ctx) {
        if (!ctx.opt.out.empty()) {
            file_ = std::make_unique<std::ofstream>(ctx.opt.out);
            if (!*file_) throw UsageError("cannot open output file '" + ctx.opt.out + "'");
            os_ = file_.get();
        } else {
            os_ = &fallback;
        }
        *os_ << "# engine_version=" << engine_version << "\n";
        *os_ << "# materials_digest=" << ctx.db.digest << " origin=" << ctx.db.origin << "\n";
        std::string flags;
        for (const auto& a : ctx.args) flags += (flags.empty() ? "" : " ") + a;
        *os_ << "# flags=" << flags << "\n";
    }

    // timestamp is left out so repeated runs give identical files; keys in
    // `skip` belong to the scanned axis and would only show the base value.
    void meta(const Metadata& m, std::initializer_list<std::string_view> skip = {}) {
        for (const auto& [k, v] : m) {
            if (k == "timestamp" || k == "engine_version") continue;
            if (std::find(skip.begin(), skip.end(), k) != skip.end()) continue;
            *os_ << "# " << k << "=" << v << "\n";
        }
    }
    void comment(const std::string& s) { *os_ << "# " << s << "\n"; }
    void header(const std::vector<std::string>& cols) { row_strings(cols); }
    void text_row(const std::vector<std::string>& cols) { row_strings(cols); }
    void row(const std::vector<double>& v) {
        std::vector<std::string> s;
        for (double x : v) s.push_back(sci(x));
        row_strings(s);
    }

  private:
    void row_strings(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) *os_ << (i ? "," : "") << cols[i];
        *os_ << "\n";
    }

    const Context& ctx_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

Scenario base_scenario(const Context& ctx) {
    Scenario s;
    s.plate1 = ctx.material(ctx.opt.plate1);
    s.plate2 = ctx.material(ctx.opt.plate2.empty() ? ctx.opt.plate1 : ctx.opt.plate2);
    s.medium = ctx.medium();
    return s;
}

Quantity parse_quantity(const std::string& q) {
    if (q == "torque") return Quantity::torque;
    if (q == "energy") return Quantity::energy;
    if (q == "pressure") return Quantity::pressure;
    throw UsageError("unknown quantity '" + q + "' (expected torque, energy or pressure)");
}

struct Columns {
    std::string label;
    double scale;
};

Columns value_column(Quantity q, bool femto) {
    return {quantity_name(q, femto && q == Quantity::torque), femto && q == Quantity::torque ? 1e15 : 1.0};
}

std::string theta_label(const Context& ctx) { return ctx.opt.degrees ? "theta_deg" : "theta_rad"; }
double theta_out(const Context& ctx, double rad) { return ctx.opt.degrees ? rad * 180.0 / pi : rad; }

int point(Context& ctx, Quantity q, std::ostream& out) {
    const auto d = parse_range(ctx.opt.d_um), th = parse_range(ctx.opt.theta), T = parse_range(ctx.opt.T);
    require_single(d, "--d-um");
    require_single(th, "--theta");
    require_single(T, "--T");
    Scenario s = base_scenario(ctx);
    s.d = d.values[0] * 1e-6;
    s.theta = ctx.theta_value(th.values[0]);
    s.T = T.values[0];
    double value = 0.0, error = 0.0;
    switch (q) {
        case Quantity::energy: {
            const auto r = free_energy(s, ctx.opt.quad);
            value = r.value;
            error = r.est_error;
            break;
        }
        case Quantity::torque: {
            const auto r = torque(s, ctx.opt.quad);
            value = r.value;
            error = r.est_error;
            break;
        }
        case Quantity::pressure: {
            const auto r = pressure(s, ctx.opt.quad);
            value = r.value;
            error = r.est_error;
            break;
        }
    }
    const auto col = value_column(q, ctx.opt.femto);
    Writer w(ctx, out);
    w.header({"d_um", theta_label(ctx), "T_K", col.label, "est_error"});
    w.row({d.values[0], theta_out(ctx, s.theta), s.T, value * col.scale, error * col.scale});
    return ok;
}

int scan(Context& ctx, Axis axis, std::ostream& out) {
    const auto q = parse_quantity(ctx.opt.quantity);
    auto d = parse_range(ctx.opt.d_um), th = parse_range(ctx.opt.theta), T = parse_range(ctx.opt.T);
    Scenario s = base_scenario(ctx);
    if (axis != Axis::separation) require_single(d, "--d-um");
    if (axis != Axis::twist) require_single(th, "--theta");
    if (axis != Axis::temperature) require_single(T, "--T");
    s.d = d.values[0] * 1e-6;
    s.theta = ctx.theta_value(th.values[0]);
    s.T = T.values[0];
    ScanResult r;
    switch (axis) {
        case Axis::separation: {
            require_range(d, "--d-um");
            std::vector<double> grid;
            for (double v : d.values) grid.push_back(v * 1e-6);
            r = scan_d(s, grid, q, ctx.opt.quad);
            break;
        }
        case Axis::twist: {
            require_range(th, "--theta");
            std::vector<double> grid;
            for (double v : th.values) grid.push_back(ctx.theta_value(v));
            r = scan_theta(s, grid, q, ctx.opt.quad);
            break;
        }
        default: {
            require_range(T, "--T");
            r = scan_T(s, T.values, q, ctx.opt.quad);
            break;
        }
    }
    const auto col = value_column(q, ctx.opt.femto);
    Writer w(ctx, out);
    w.meta(r.metadata, {axis == Axis::separation ? "d_m" : axis == Axis::twist ? "theta_rad" : "T_K"});
    w.header({"d_um", theta_label(ctx), "T_K", col.label, "est_error"});
    const auto& g = r.grid.values[0];
    for (std::size_t i = 0; i < g.size(); ++i) {
        double dd = s.d, tt = s.theta, TT = s.T;
        if (axis == Axis::separation) dd = g[i];
        if (axis == Axis::twist) tt = g[i];
        if (axis == Axis::temperature) TT = g[i];
        w.row({dd * 1e6, theta_out(ctx, tt), TT, r.values[i] * col.scale, r.est_error[i] * col.scale});
    }
    return ok;
}

int theta_max(Context& ctx, std::ostream& out) {
    const auto d = parse_range(ctx.opt.d_um), T = parse_range(ctx.opt.T);
    require_single(T, "--T");
    Scenario s = base_scenario(ctx);
    s.T = T.values[0];
    const double scale = ctx.opt.femto ? 1e15 : 1.0;
    std::vector<ThetaMaxResult> results(d.values.size());
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        s.d = d.values[i] * 1e-6;
        results[i] = find_theta_max(s, ctx.opt.quad);
    }
    Writer w(ctx, out);
    w.header({"d_um", "T_K", ctx.opt.degrees ? "theta_max_deg" : "theta_max_rad",
              quantity_name(Quantity::torque, ctx.opt.femto), "est_error"});
    for (std::size_t i = 0; i < d.values.size(); ++i)
        w.row({d.values[i], s.T, theta_out(ctx, results[i].theta_max), results[i].torque_at_max * scale,
               results[i].est_error * scale});
    return ok;
}

int sign_reversal(Context& ctx, std::ostream& out) {
    const auto th = parse_range(ctx.opt.theta), T = parse_range(ctx.opt.T);
    require_single(th, "--theta");
    require_single(T, "--T");
    Scenario s = base_scenario(ctx);
    s.theta = ctx.theta_value(th.values[0]);
    s.T = T.values[0];
    Bracket b;
    if (!ctx.opt.bracket_um.empty()) {
        const auto colon = ctx.opt.bracket_um.find(':');
        if (colon == std::string::npos) throw UsageError("--bracket-um expects lo:hi");
        b.lo = parse_double(ctx.opt.bracket_um.substr(0, colon), "--bracket-um") * 1e-6;
        b.hi = parse_double(ctx.opt.bracket_um.substr(colon + 1), "--bracket-um") * 1e-6;
    }
    const auto r = find_sign_reversal(s, b, ctx.opt.quad);
    const double scale = ctx.opt.femto ? 1e15 : 1.0;
    Writer w(ctx, out);
    const std::string unit = ctx.opt.femto ? "_fNm_per_m2" : "_Nm_per_m2";
    w.header({"d_star_um", theta_label(ctx), "T_K", "torque_below" + unit, "torque_above" + unit});
    w.row({r.d_star * 1e6, theta_out(ctx, s.theta), s.T, r.torque_below * scale, r.torque_above * scale});
    return ok;
}

int thermal_ratio(Context& ctx, std::ostream& out) {
    const auto d = parse_range(ctx.opt.d_um), th = parse_range(ctx.opt.theta);
    require_range(d, "--d-um");
    require_single(th, "--theta");
    RatioMode mode;
    if (ctx.opt.ratio_mode == "fixed") mode = RatioMode::fixed_theta;
    else if (ctx.opt.ratio_mode == "max") mode = RatioMode::max_theta;
    else throw UsageError("--mode must be 'fixed' or 'max'");
    Scenario s = base_scenario(ctx);
    s.theta = ctx.theta_value(th.values[0]);
    std::vector<double> grid;
    for (double v : d.values) grid.push_back(v * 1e-6);
    const auto r = thermal_ratio_curve(s, grid, mode, ctx.opt.quad, ctx.opt.T_hot, ctx.opt.T_cold);
    Writer w(ctx, out);
    w.meta(r.metadata, {"d_m", "T_K"});
    w.header({"d_um", r.quantity, "est_error"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!r.valid[i]) {
            w.comment("invalid node d_um=" + sci(d.values[i]) + " (reference torque below its error estimate)");
            continue;
        }
        w.row({d.values[i], r.values[i], r.est_error[i]});
    }
    return ok;
}

int param_map(Context& ctx, std::ostream& out) {
    const auto rp = parse_range(ctx.opt.rho_perp), rq = parse_range(ctx.opt.rho_par);
    require_range(rp, "--rho-perp");
    require_range(rq, "--rho-par");
    const auto r = param_space_map(rp.values, rq.values, ctx.opt.theta_resolution);
    Writer w(ctx, out);
    w.meta(r.torque_max.metadata);
    w.header({"rho_perp", "rho_par", "theta_max_rad", "torque_max_normalized", "valid"});
    const std::size_t n_par = rq.values.size();
    for (std::size_t i = 0; i < r.theta_max.values.size(); ++i) {
        const bool valid = r.theta_max.valid[i];
        w.text_row({sci(rp.values[i / n_par]), sci(rq.values[i % n_par]), valid ? sci(r.theta_max.values[i]) : "nan",
                    sci(valid ? r.torque_max.values[i] : 0.0), valid ? "1" : "0"});
    }
    return ok;
}

int materials_list(Context& ctx, std::ostream& out) {
    Writer w(ctx, out);
    w.header({"name", "eps_par0", "eps_perp0", "delta"});
    for (const auto& name : ctx.db.catalog.names()) {
        const auto& m = ctx.db.catalog.at(name);
        const auto st = static_eps(m);
        w.text_row({name, sci(st.eps_par0), sci(st.eps_perp0), sci(anisotropy_delta(m))});
    }
    return ok;
}

int materials_show(Context& ctx, std::ostream& out) {
    const auto& m = ctx.material(ctx.opt.material_name);
    Writer w(ctx, out);
    w.comment("material=" + m.name);
    try {
        std::string xs;
        for (double x : find_crossovers(m)) xs += (xs.empty() ? "" : " ") + sci(x);
        w.comment("crossovers_rad_s=" + (xs.empty() ? std::string("none") : xs));
    } catch (const DegenerateInputError&) {
        w.comment("crossovers_rad_s=isotropic");
    }
    w.header({"component", "C", "omega_rad_s"});
    for (const auto& [label, set] : {std::pair{"parallel", &m.parallel}, std::pair{"perpendicular", &m.perpendicular}})
        for (const auto& t : set->terms()) w.text_row({label, sci(t.strength), sci(t.omega_rad_s)});
    return ok;
}

void add_scenario_flags(CLI::App* sub, Options& o, bool with_plates = true) {
    if (with_plates) {
        sub->add_option("--plate1", o.plate1, "material of plate 1")->required();
        sub->add_option("--plate2", o.plate2, "material of plate 2 (default: same as plate 1)");
        sub->add_option("--medium,--eps3", o.medium, "gap medium: constant permittivity or isotropic material name")
            ->capture_default_str();
    }
    sub->add_option("--d-um", o.d_um, "separation in micrometers, value or start:stop:count[log]")
        ->capture_default_str();
    sub->add_option("--theta", o.theta, "twist angle (radians unless --degrees)")->capture_default_str();
    sub->add_option("--T", o.T, "temperature in kelvin")->capture_default_str();
    sub->add_flag("--degrees", o.degrees, "angles in degrees");
    sub->add_flag("--fN", o.femto, "report torque in fN m / m^2");
}

void add_common_flags(CLI::App* sub, Options& o) {
    sub->add_option("--materials", o.materials, "material database (default: $CASIMIR_MATERIALS or bundled)");
    sub->add_option("--out", o.out, "write CSV to this file instead of stdout");
    sub->add_option("--threads", o.threads, "worker threads (0 = machine parallelism)")->check(CLI::NonNegativeNumber);
    sub->add_option("--rel-tol", o.quad.rel_tol, "relative tolerance of inner quadratures")->capture_default_str();
    sub->add_option("--phi-points", o.quad.phi_points_start, "initial azimuthal nodes")->capture_default_str();
    sub->add_option("--u-cutoff", o.quad.u_cutoff, "tail cutoff in u = 2 rho3 d")->capture_default_str();
    sub->add_option("--matsubara-consecutive", o.quad.matsubara_consecutive, "quiet terms before truncation")
        ->capture_default_str();
    sub->add_option("--max-matsubara", o.quad.max_matsubara, "Matsubara term cap")->capture_default_str();
}

}  // namespace

RangeSpec parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (!text.empty() && text.back() == ':') parts.emplace_back();
    if (parts.size() == 1) return {{parse_double(parts[0], "'" + text + "'")}, false};
    if (parts.size() != 3) throw UsageError("range '" + text + "' must be start:stop:count[log]");
    std::string count = parts[2];
    bool log = false;
    if (count.size() > 3 && count.compare(count.size() - 3, 3, "log") == 0) {
        log = true;
        count.resize(count.size() - 3);
    }
    const double start = parse_double(parts[0], "range '" + text + "'");
    const double stop = parse_double(parts[1], "range '" + text + "'");
    const double n = parse_double(count, "range '" + text + "'");
    if (n != std::floor(n) || n < 2 || n > 1e6) throw UsageError("range '" + text + "' needs an integer count >= 2");
    if (!(stop > start)) throw UsageError("range '" + text + "' must be increasing");
    if (log && !(start > 0.0)) throw UsageError("log range '" + text + "' needs positive endpoints");
    return {log ? logspace(start, stop, int(n)) : linspace(start, stop, int(n)), true};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Casimir free energy and torque between uniaxial birefringent half-spaces"};
    app.name("casimir");
    app.set_version_flag("--version", engine_version);
    app.require_subcommand(1);
    Context ctx;
    ctx.args = args;
    Options& o = ctx.opt;

    struct Entry {
        CLI::App* app;
        std::function<int(Context&, std::ostream&)> action;
    };
    std::vector<Entry> entries;
    auto scenario_cmd = [&](const char* name, const char* help, auto action) {
        auto* sub = app.add_subcommand(name, help);
        add_scenario_flags(sub, o);
        add_common_flags(sub, o);
        entries.push_back({sub, action});
        return sub;
    };
    scenario_cmd("energy", "free energy per unit area", [](Context& c, std::ostream& os) {
        return point(c, Quantity::energy, os);
    });
    scenario_cmd("torque", "torque per unit area", [](Context& c, std::ostream& os) {
        return point(c, Quantity::torque, os);
    });
    scenario_cmd("pressure", "pressure", [](Context& c, std::ostream& os) {
        return point(c, Quantity::pressure, os);
    });
    for (auto [name, axis] : {std::pair{"scan-d", Axis::separation}, std::pair{"scan-theta", Axis::twist},
                              std::pair{"scan-T", Axis::temperature}}) {
        auto* sub = scenario_cmd(name, "tabulate a quantity along one axis",
                                 [axis](Context& c, std::ostream& os) { return scan(c, axis, os); });
        sub->add_option("--quantity", o.quantity, "torque, energy or pressure")->capture_default_str();
    }
    scenario_cmd("find-theta-max", "twist angle maximizing |torque| (one row per --d-um node)", theta_max);
    auto* rev = scenario_cmd("find-sign-reversal", "separation where the torque changes sign", sign_reversal);
    rev->add_option("--bracket-um", o.bracket_um, "initial bracket lo:hi in micrometers (default 0.1:10)");
    auto* ratio = scenario_cmd("thermal-ratio", "torque ratio between two temperatures on a separation grid",
                               thermal_ratio);
    ratio->add_option("--mode", o.ratio_mode, "fixed (given theta) or max (each temperature at its theta_max)")
        ->capture_default_str();
    ratio->add_option("--T-hot", o.T_hot, "numerator temperature, K")->capture_default_str();
    ratio->add_option("--T-cold", o.T_cold, "denominator temperature, K")->capture_default_str();

    auto* pmap = app.add_subcommand("param-map", "zero-frequency theta_max and normalized torque map");
    pmap->add_option("--rho-perp", o.rho_perp, "eps_perp(0)/eps3(0) range start:stop:count[log]")->required();
    pmap->add_option("--rho-par", o.rho_par, "eps_par(0)/eps3(0) range start:stop:count[log]")->required();
    pmap->add_option("--theta-resolution", o.theta_resolution, "profile angles on [0, pi/2] (odd)")
        ->capture_default_str();
    add_common_flags(pmap, o);
    entries.push_back({pmap, param_map});

    auto* mats = app.add_subcommand("materials", "inspect the material database");
    mats->require_subcommand(1);
    auto* list = mats->add_subcommand("list", "static permittivities of every material");
    add_common_flags(list, o);
    entries.push_back({list, materials_list});
    auto* show = mats->add_subcommand("show", "oscillator terms and crossovers of one material");
    show->add_option("name", o.material_name, "material name")->required();
    add_common_flags(show, o);
    entries.push_back({show, materials_show});

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        set_thread_count(o.threads);
        o.quad.validate();
        ctx.db = resolve_materials(o.materials);
        for (auto& e : entries)
            if (e.app->parsed()) return e.action(ctx, out);
        err << "error: no subcommand\n";
        return usage;
    } catch (const UnknownMaterial& e) {
        err << "error: " << e.what() << "\n";
        return data;
    } catch (const MaterialDataError& e) {
        err << "error: material database: " << e.what() << "\n";
        return data;
    } catch (const ConvergenceError& e) {
        err << "error: no convergence: " << e.what() << "\n";
        return no_convergence;
    } catch (const BracketError& e) {
        err << "error: " << e.what() << "\n";
        return no_convergence;
    } catch (const DegenerateInputError& e) {
        err << "error: " << e.what() << "\n";
        return no_convergence;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace casimir::cli
