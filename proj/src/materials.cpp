#include "casimir/materials.hpp"

#include "casimir/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace casimir {

OscillatorSet::OscillatorSet(std::vector<OscillatorTerm> terms) : terms_(std::move(terms)) {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& t = terms_[i];
        if (!(t.strength > 0.0) || !std::isfinite(t.strength))
            throw MaterialDataError("terms[" + std::to_string(i) + "].C",
                                    "oscillator strength must be finite and > 0");
        if (!(t.omega_rad_s > 0.0))
            throw MaterialDataError("terms[" + std::to_string(i) + "].omega_rad_s",
                                    "resonance frequency must be > 0");
    }
}

double OscillatorSet::eval(double xi) const {
    if (!(xi >= 0.0)) throw DomainError("eval_eps_iw: xi must be >= 0");
    double eps = 1.0;
    for (const auto& t : terms_) {
        const double x = xi / t.omega_rad_s;
        eps += t.strength / (1.0 + x * x);
    }
    return eps;
}

double OscillatorSet::static_value() const noexcept {
    double eps = 1.0;
    for (const auto& t : terms_) eps += t.strength;
    return eps;
}

bool OscillatorSet::operator==(const OscillatorSet& other) const {
    if (terms_.size() != other.terms_.size()) return false;
    auto key = [](const OscillatorTerm& t) { return std::pair{t.omega_rad_s, t.strength}; };
    auto a = terms_, b = other.terms_;
    auto less = [&](const OscillatorTerm& x, const OscillatorTerm& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    return std::equal(a.begin(), a.end(), b.begin(),
                      [&](const auto& x, const auto& y) { return key(x) == key(y); });
}

OscillatorSet constant_permittivity(double eps) {
    if (!(eps >= 1.0)) throw DomainError("constant permittivity must be >= 1");
    if (eps == 1.0) return OscillatorSet{};
    return OscillatorSet({{eps - 1.0, std::numeric_limits<double>::infinity()}});
}

Material Material::isotropic(std::string name, OscillatorSet set) {
    return Material{std::move(name), set, set};
}

Material Material::constant(std::string name, double eps_par, double eps_perp) {
    return Material{std::move(name), constant_permittivity(eps_par), constant_permittivity(eps_perp)};
}

Medium::Medium(double eps) : model_(eps) {
    if (!(eps >= 1.0) || !std::isfinite(eps)) throw DomainError("medium permittivity must be >= 1");
}

Medium::Medium(OscillatorSet set) : model_(std::move(set)) {}

double Medium::eval(double xi) const {
    if (!(xi >= 0.0)) throw DomainError("Medium::eval: xi must be >= 0");
    if (const auto* eps = std::get_if<double>(&model_)) return *eps;
    return std::get<OscillatorSet>(model_).eval(xi);
}

double Medium::static_value() const { return eval(0.0); }

StaticPermittivity static_eps(const Material& material) {
    return {material.parallel.static_value(), material.perpendicular.static_value()};
}

double anisotropy_delta(const Material& material) {
    const auto [par, perp] = static_eps(material);
    return (par - perp) / (par + perp);
}

std::vector<double> find_crossovers(const Material& material, CrossoverScan scan) {
    if (!(scan.xi_min > 0.0) || !(scan.xi_max > scan.xi_min) || !std::isfinite(scan.xi_max))
        throw DomainError("find_crossovers: xi range must be finite, positive and increasing");
    if (scan.points < 2) throw DomainError("find_crossovers: need at least two scan points");

    auto gap = [&](double xi) { return material.parallel.eval(xi) - material.perpendicular.eval(xi); };

    const double log_lo = std::log(scan.xi_min);
    const double step = (std::log(scan.xi_max) - log_lo) / (scan.points - 1);
    auto node = [&](int i) { return i == scan.points - 1 ? scan.xi_max : std::exp(log_lo + step * i); };

    std::vector<double> roots;
    bool all_zero = true;
    double x_prev = node(0);
    double g_prev = gap(x_prev);
    if (g_prev != 0.0) all_zero = false;
    for (int i = 1; i < scan.points; ++i) {
        const double x = node(i);
        const double g = gap(x);
        if (g != 0.0) all_zero = false;
        if (g == 0.0 && g_prev != 0.0) {
            roots.push_back(x);
        } else if (g_prev * g < 0.0) {
            // bisection in log(xi)
            double lo = std::log(x_prev), hi = std::log(x);
            double g_lo = g_prev;
            while (std::exp(hi) - std::exp(lo) > 1e-12 * std::exp(hi)) {
                const double mid = 0.5 * (lo + hi);
                const double g_mid = gap(std::exp(mid));
                if (g_mid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((g_mid < 0.0) == (g_lo < 0.0)) {
                    lo = mid;
                    g_lo = g_mid;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(std::exp(0.5 * (lo + hi)));
        }
        x_prev = x;
        g_prev = g;
    }
    if (all_zero)
        throw DegenerateInputError("find_crossovers: '" + material.name +
                                   "' has identical components over the scanned range");
    return roots;
}

void MaterialCatalog::add(Material material) {
    if (materials_.contains(material.name))
        throw MaterialDataError("name", "duplicate material '" + material.name + "'");
    auto name = material.name;
    materials_.emplace(std::move(name), std::move(material));
}

const Material& MaterialCatalog::at(std::string_view name) const {
    auto it = materials_.find(name);
    if (it == materials_.end()) throw DomainError("unknown material '" + std::string(name) + "'");
    return it->second;
}

bool MaterialCatalog::contains(std::string_view name) const { return materials_.find(name) != materials_.end(); }

std::vector<std::string> MaterialCatalog::names() const {
    std::vector<std::string> out;
    out.reserve(materials_.size());
    for (const auto& [name, _] : materials_) out.push_back(name);
    return out;
}

namespace {

using nlohmann::json;

double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw MaterialDataError(where + "." + key, "missing field");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw MaterialDataError(where + "." + key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw MaterialDataError(where + "." + key, "must be finite");
    return x;
}

OscillatorSet parse_set(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw MaterialDataError(where, "expected a list of oscillator terms");
    std::vector<OscillatorTerm> terms;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& t = arr[i];
        const std::string at = where + "[" + std::to_string(i) + "]";
        if (!t.is_object()) throw MaterialDataError(at, "expected an object {C, omega_rad_s}");
        for (const auto& [key, _] : t.items())
            if (key != "C" && key != "omega_rad_s") throw MaterialDataError(at + "." + key, "unknown field");
        const double c = require_number(t, "C", at);
        const double w = require_number(t, "omega_rad_s", at);
        if (!(c > 0.0)) throw MaterialDataError(at + ".C", "oscillator strength must be > 0");
        if (!(w > 0.0)) throw MaterialDataError(at + ".omega_rad_s", "resonance frequency must be > 0");
        terms.push_back({c, w});
    }
    return OscillatorSet(std::move(terms));
}

}  // namespace

MaterialCatalog parse_materials(std::string_view json_text) {
    MaterialCatalog catalog;
    if (std::all_of(json_text.begin(), json_text.end(), [](unsigned char ch) { return std::isspace(ch); }))
        return catalog;

    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw MaterialDataError("", std::string("JSON parse error: ") + e.what());
    }
    if (!doc.is_array()) throw MaterialDataError("(top level)", "expected a list of materials");

    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& m = doc[i];
        const std::string at = "[" + std::to_string(i) + "]";
        if (!m.is_object()) throw MaterialDataError(at, "expected a material object");
        for (const auto& [key, _] : m.items())
            if (key != "name" && key != "parallel" && key != "perpendicular" && key != "note")
                throw MaterialDataError(at + "." + key, "unknown field");
        if (!m.contains("name") || !m.at("name").is_string() || m.at("name").get<std::string>().empty())
            throw MaterialDataError(at + ".name", "expected a non-empty string");
        if (m.contains("note") && !m.at("note").is_string())
            throw MaterialDataError(at + ".note", "expected a string");
        const auto name = m.at("name").get<std::string>();
        for (const char* key : {"parallel", "perpendicular"})
            if (!m.contains(key)) throw MaterialDataError(at + "." + key, "missing field");
        Material mat{name, parse_set(m.at("parallel"), at + ".parallel"),
                     parse_set(m.at("perpendicular"), at + ".perpendicular")};
        if (catalog.contains(name)) throw MaterialDataError(at + ".name", "duplicate material '" + name + "'");
        catalog.add(std::move(mat));
    }
    return catalog;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MaterialDataError("", "cannot read material database '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

MaterialCatalog load_materials(const std::filesystem::path& path) { return parse_materials(read_file(path)); }

MaterialCatalog bundled_materials() { return parse_materials(bundled_materials_json()); }

std::string materials_digest(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

LoadedMaterials resolve_materials(const std::string& explicit_path) {
    std::string path = explicit_path;
    if (path.empty())
        if (const char* env = std::getenv("CASIMIR_MATERIALS"); env && *env) path = env;
    if (path.empty()) {
        const auto text = bundled_materials_json();
        return {parse_materials(text), "bundled", materials_digest(text)};
    }
    const auto text = read_file(path);
    return {parse_materials(text), path, materials_digest(text)};
}

}  // namespace casimir
