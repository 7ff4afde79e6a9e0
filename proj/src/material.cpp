#include <cmath>
#include <sstream>

#include "tripletforge/constants.hpp"
#include "tripletforge/dispersion.hpp"
#include "tripletforge/errors.hpp"

namespace tripletforge::dispersion {

MaterialIndex MaterialIndex::fused_silica() { return MaterialIndex{}; }

MaterialIndex MaterialIndex::constant(double n, double lambda_min_m, double lambda_max_m) {
    MaterialIndex m;
    m.name = "constant";
    m.law = "constant";
    m.coefficients = {n};
    m.lambda_min_m = lambda_min_m;
    m.lambda_max_m = lambda_max_m;
    return m;
}

void MaterialIndex::validate() const {
    if (!(lambda_min_m > 0.0) || !(lambda_max_m > lambda_min_m))
        throw ValidationError("material '" + name + "': invalid wavelength window");
    if (law == "sellmeier") {
        if (coefficients.size() != 6)
            throw ValidationError("material '" + name + "': sellmeier law needs 6 coefficients (B1..B3, C1..C3 in um)");
    } else if (law == "constant") {
        if (coefficients.size() != 1 || !(coefficients[0] > 1.0))
            throw ValidationError("material '" + name + "': constant law needs one index > 1");
    } else {
        throw ValidationError("material '" + name + "': unknown index law '" + law + "'");
    }
}

double MaterialIndex::n_at_lambda(double lambda_m) const {
    if (!(lambda_m >= lambda_min_m && lambda_m <= lambda_max_m)) {
        std::ostringstream os;
        os << "wavelength " << lambda_m << " m outside the valid window [" << lambda_min_m << ", " << lambda_max_m
           << "] m of material '" << name << "'";
        throw DomainError(os.str());
    }
    if (law == "constant") return coefficients[0];
    const double l = lambda_m * 1e6;
    const double l2 = l * l;
    double n2 = 1.0;
    for (int i = 0; i < 3; ++i) {
        const double c = coefficients[3 + i];
        n2 += coefficients[i] * l2 / (l2 - c * c);
    }
    return std::sqrt(n2);
}

double MaterialIndex::n_at_omega(double omega) const { return n_at_lambda(constants::lambda_from_omega(omega)); }

double material_index(const MaterialIndex& law, double lambda_m) { return law.n_at_lambda(lambda_m); }

void FiberSpec::validate() const {
    if (!(radius_m > 0.0)) throw ValidationError("fiber radius must be > 0");
    if (!(length_m > 0.0)) throw ValidationError("fiber length must be > 0");
    if (!(cladding_n >= 1.0)) throw ValidationError("cladding index must be >= 1");
    core.validate();
    const double n_lo = core.n_at_lambda(core.lambda_max_m);
    const double n_hi = core.n_at_lambda(core.lambda_min_m);
    if (!(cladding_n < std::min(n_lo, n_hi)))
        throw ValidationError("cladding index must be below the core index over the material window");
}

std::string ModeLabel::str() const { return family + std::to_string(nu) + std::to_string(m); }

ModeLabel ModeLabel::parse(const std::string& s) {
    if (s.size() != 4 || s.substr(0, 2) != "HE" || !std::isdigit(static_cast<unsigned char>(s[2])) ||
        !std::isdigit(static_cast<unsigned char>(s[3])))
        throw ValidationError("mode label '" + s + "' not understood (expected HE<nu><m>, e.g. HE11)");
    ModeLabel l;
    l.nu = s[2] - '0';
    l.m = s[3] - '0';
    if (l.nu < 1 || l.m < 1) throw ValidationError("mode label '" + s + "' needs nu >= 1 and m >= 1");
    return l;
}

}  // namespace tripletforge::dispersion
