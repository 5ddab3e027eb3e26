#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace casimir {

struct OscillatorTerm {
    double strength;     // C_j, dimensionless
    double omega_rad_s;  // resonance frequency; +inf gives a frequency-independent term
};

/// Undamped Lorentz oscillators on the imaginary axis,
/// eps(i xi) = 1 + sum_j C_j / (1 + (xi / omega_j)^2).
class OscillatorSet {
  public:
    OscillatorSet() = default;
    explicit OscillatorSet(std::vector<OscillatorTerm> terms);

    /// Throws DomainError for negative or NaN xi.
    double eval(double xi) const;
    double static_value() const noexcept;

    const std::vector<OscillatorTerm>& terms() const noexcept { return terms_; }

    bool operator==(const OscillatorSet&) const;

  private:
    std::vector<OscillatorTerm> terms_;
};

OscillatorSet constant_permittivity(double eps);

inline double eval_eps_iw(const OscillatorSet& set, double xi) { return set.eval(xi); }

struct Material {
    std::string name;
    OscillatorSet parallel;       // along the optic axis
    OscillatorSet perpendicular;  // normal to the optic axis

    static Material isotropic(std::string name, OscillatorSet set);
    static Material constant(std::string name, double eps_par, double eps_perp);
};

/// Isotropic medium filling the gap between the plates.
class Medium {
  public:
    Medium() : model_(1.0) {}
    explicit Medium(double eps);
    explicit Medium(OscillatorSet set);

    static Medium vacuum() { return Medium(); }

    double eval(double xi) const;
    double static_value() const;
    bool is_constant() const noexcept { return std::holds_alternative<double>(model_); }

  private:
    std::variant<double, OscillatorSet> model_;
};

struct StaticPermittivity {
    double eps_par0;
    double eps_perp0;
};

StaticPermittivity static_eps(const Material& material);

/// (eps_par(0) - eps_perp(0)) / (eps_par(0) + eps_perp(0))
double anisotropy_delta(const Material& material);

struct CrossoverScan {
    double xi_min = 1e12;
    double xi_max = 1e18;
    int points = 4096;
};

/// Imaginary frequencies where eps_par(i xi) = eps_perp(i xi), ascending.
/// Throws DegenerateInputError when the two components coincide everywhere.
std::vector<double> find_crossovers(const Material& material, CrossoverScan scan = {});

class MaterialCatalog {
  public:
    void add(Material material);  // rejects duplicate names
    const Material& at(std::string_view name) const;
    bool contains(std::string_view name) const;
    std::vector<std::string> names() const;
    std::size_t size() const noexcept { return materials_.size(); }
    bool empty() const noexcept { return materials_.empty(); }

  private:
    std::map<std::string, Material, std::less<>> materials_;
};

/// Parses the JSON material database. Throws MaterialDataError naming the
/// offending field on parse, schema, or invariant violations.
MaterialCatalog parse_materials(std::string_view json_text);
MaterialCatalog load_materials(const std::filesystem::path& path);

/// The database shipped with the library (compiled in).
std::string_view bundled_materials_json();
MaterialCatalog bundled_materials();

struct LoadedMaterials {
    MaterialCatalog catalog;
    std::string origin;  // file path or "bundled"
    std::string digest;
};

/// Resolution order: explicit path, $CASIMIR_MATERIALS, bundled database.
LoadedMaterials resolve_materials(const std::string& explicit_path = {});

/// FNV-1a 64-bit digest of the database text, hex encoded.
std::string materials_digest(std::string_view json_text);

}  // namespace casimir
