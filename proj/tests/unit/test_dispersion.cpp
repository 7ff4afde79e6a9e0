#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tripletforge/constants.hpp"
#include "tripletforge/dispersion.hpp"
#include "tripletforge/errors.hpp"
#include "tripletforge/jsa.hpp"
#include "../support/oracle.hpp"

using namespace tripletforge;
using namespace tripletforge::dispersion;

namespace {

// Pole-free form of the hybrid-mode equation, multiplied through by (u J)^2.
double char_fn(double a, double n1, double n2, double k0, int nu, double neff) {
    const double u = a * k0 * std::sqrt(n1 * n1 - neff * neff);
    const double w = a * k0 * std::sqrt(neff * neff - n2 * n2);
    const double J = std::cyl_bessel_j(nu, u);
    const double Jp = std::cyl_bessel_j(nu - 1, u) - nu / u * J;
    const double K = std::cyl_bessel_k(nu, w);
    const double Kp = -std::cyl_bessel_k(nu - 1, w) - nu / w * K;
    const double b = Kp / (w * K);
    const double r = n2 * n2 / (n1 * n1);
    const double uJ = u * J;
    return (Jp + b * uJ) * (Jp + r * b * uJ) -
           nu * nu * (1 / (u * u) + 1 / (w * w)) * (1 / (u * u) + r / (w * w)) * uJ * uJ;
}

// Largest n_eff root by dense sign scan plus bisection: the fundamental HE11.
double oracle_he11(double a, double n1, double n2, double lambda) {
    const double k0 = 2 * std::numbers::pi / lambda;
    const int N = 200000;
    double prev_x = n1 - 1e-12, prev = char_fn(a, n1, n2, k0, 1, prev_x);
    for (int i = 1; i < N; ++i) {
        const double x = n1 - (n1 - n2) * i / N;
        const double v = char_fn(a, n1, n2, k0, 1, x);
        if ((v > 0) != (prev > 0)) {
            double lo = x, hi = prev_x;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (lo + hi);
                if ((char_fn(a, n1, n2, k0, 1, m) > 0) == (v > 0)) lo = m;
                else hi = m;
            }
            return 0.5 * (lo + hi);
        }
        prev = v;
        prev_x = x;
    }
    return NAN;
}

FiberSpec strand(double r = 0.395e-6) {
    FiberSpec f;
    f.radius_m = r;
    return f;
}

}  // namespace

TEST_CASE("fused-silica index matches an independent Sellmeier evaluation") {
    const auto m = MaterialIndex::fused_silica();
    // Frozen from a separate numpy evaluation of the same coefficients.
    CHECK(m.n_at_lambda(532e-9) == doctest::Approx(1.4607063448921331).epsilon(1e-13));
    CHECK(m.n_at_lambda(1596e-9) == doctest::Approx(1.4434677889839678).epsilon(1e-13));
    CHECK(m.n_at_lambda(1550e-9) == doctest::Approx(1.4440236217032607).epsilon(1e-13));
    CHECK(m.n_at_omega(constants::omega_from_lambda(800e-9)) == doctest::Approx(oracle::sellmeier(800e-9)).epsilon(1e-14));
}

TEST_CASE("material index is finite, above one and continuous across its window") {
    const auto m = MaterialIndex::fused_silica();
    double prev = m.n_at_lambda(0.21e-6);
    for (int i = 1; i <= 2000; ++i) {
        const double l = std::min(6.7e-6, 0.21e-6 + (6.7e-6 - 0.21e-6) * i / 2000.0);
        const double n = m.n_at_lambda(l);
        CHECK(std::isfinite(n));
        CHECK(n > 1.0);
        CHECK(std::abs(n - prev) < 0.02);
        prev = n;
    }
}

TEST_CASE("material index outside its window is an error") {
    const auto m = MaterialIndex::fused_silica();
    CHECK_THROWS_AS(m.n_at_lambda(0.1e-6), DomainError);
    CHECK_THROWS_AS(m.n_at_lambda(8e-6), DomainError);
    CHECK_THROWS_AS(m.n_at_lambda(-1.0), ValidationError);
}

TEST_CASE("fiber validation") {
    auto f = strand();
    f.radius_m = 0.0;
    CHECK_THROWS_AS(f.validate(), ValidationError);
    f = strand();
    f.length_m = -1.0;
    CHECK_THROWS_AS(f.validate(), ValidationError);
    f = strand();
    f.cladding_n = 1.5;
    CHECK_THROWS_AS(f.validate(), ValidationError);
}

TEST_CASE("HE11 effective index agrees with a dense sign-scan of the characteristic equation") {
    const auto f = strand();
    for (double lambda : {1450e-9, 1596e-9, 1760e-9}) {
        CAPTURE(lambda);
        const double ref = oracle_he11(f.radius_m, oracle::sellmeier(lambda), 1.0, lambda);
        const double got = solve_neff(f, {"HE", 1, 1}, constants::omega_from_lambda(lambda));
        CHECK(got == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("HE12 is below cutoff at triplet wavelengths") {
    const auto f = strand();
    CHECK_THROWS_AS(solve_neff(f, {"HE", 1, 2}, constants::omega_from_lambda(1596e-9)), BelowCutoffError);
    const double n12 = solve_neff(f, {"HE", 1, 2}, constants::omega_from_lambda(532e-9));
    const double n11 = solve_neff(f, {"HE", 1, 1}, constants::omega_from_lambda(532e-9));
    CHECK(n12 > 1.0);
    CHECK(n12 < n11);
}

TEST_CASE("solved curves satisfy the characteristic equation and the mode invariants") {
    const auto f = strand();
    const double n1min = f.core.n_at_lambda(1800e-9);
    SUBCASE("HE11") {
        const auto g = uniform_grid(constants::omega_from_lambda(1800e-9), constants::omega_from_lambda(1400e-9), 64);
        const auto c = solve_mode(f, {"HE", 1, 1}, g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(characteristic_residual(f, {"HE", 1, 1}, g[i], c.n_eff_samples()[i]) < 1e-10);
            CHECK(c.n_eff_samples()[i] >= f.cladding_n);
            CHECK(c.n_eff_samples()[i] <= f.core.n_at_omega(g[i]));
            if (i) {
                CHECK(c.k(g[i]) > c.k(g[i - 1]));
                CHECK(c.n_eff_samples()[i] > c.n_eff_samples()[i - 1]);
            }
        }
        CHECK(c.n_eff_samples().back() < f.core.n_at_lambda(1400e-9));
        CHECK(n1min > 1.0);
    }
    SUBCASE("HE12") {
        const auto g = uniform_grid(constants::omega_from_lambda(540e-9), constants::omega_from_lambda(525e-9), 32);
        const auto c = solve_mode(f, {"HE", 1, 2}, g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(characteristic_residual(f, {"HE", 1, 2}, g[i], c.n_eff_samples()[i]) < 1e-10);
            if (i) CHECK(c.k(g[i]) > c.k(g[i - 1]));
        }
    }
}

TEST_CASE("group velocity of a constant-index curve is c/n") {
    std::vector<double> w, n;
    for (int i = 0; i < 50; ++i) {
        w.push_back(1e15 + 1e13 * i);
        n.push_back(1.4);
    }
    const ModeCurve c({"HE", 1, 1}, w, n, Provenance::UserTabulated);
    CHECK(group_velocity(c, 1.2e15) == doctest::Approx(constants::c / 1.4).epsilon(1e-12));
    CHECK_THROWS_AS(c.n_eff(0.5e15), DomainError);
}

TEST_CASE("user-tabulated curves are validated") {
    CHECK_THROWS_AS(ModeCurve({"HE", 1, 1}, {1.0, 2.0}, {1.4}, Provenance::UserTabulated), ValidationError);
    CHECK_THROWS_AS(ModeCurve({"HE", 1, 1}, {2.0, 1.0, 3.0}, {1.4, 1.4, 1.4}, Provenance::UserTabulated),
                    ValidationError);
}

TEST_CASE("effective overlap is positive, converged in resolution and permutation invariant") {
    const auto f = strand();
    const double w0 = constants::omega_from_lambda(532e-9);
    const auto a = effective_overlap(f, {"HE", 1, 2}, {"HE", 1, 1}, w0, 2.5e-22, 1);
    const auto b = effective_overlap(f, {"HE", 1, 2}, {"HE", 1, 1}, w0, 2.5e-22, 2);
    CHECK(a.f_eff > 0.0);
    CHECK(a.gamma > 0.0);
    CHECK(std::abs(a.f_eff - b.f_eff) / b.f_eff < 1e-4);
    CHECK(a.gamma == doctest::Approx(nonlinear_coefficient(2.5e-22, w0, a.f_eff, a.n0)).epsilon(1e-14));

    const auto pp = mode_profile(f, {"HE", 1, 2}, w0);
    const auto tp = mode_profile(f, {"HE", 1, 1}, w0 / 3);
    OverlapQuadrature q;
    q.radial_breaks = {0.0, f.radius_m, 6 * f.radius_m};
    q.panels_per_segment = 16;
    const Profile P = pp, T = tp;
    const double x = four_field_overlap({P, T, T, T}, q);
    const double y = four_field_overlap({T, P, T, T}, q);
    const double z = four_field_overlap({T, T, T, P}, q);
    CHECK(x > 0.0);
    CHECK(x == doctest::Approx(y).epsilon(1e-14));
    CHECK(x == doctest::Approx(z).epsilon(1e-14));
}

TEST_CASE("phase-matched radius puts the degenerate point on phase matching") {
    const auto f = strand();
    const double w0 = constants::omega_from_lambda(532e-9);
    const double r = phase_matched_radius(f, {"HE", 1, 2}, {"HE", 1, 1}, w0, 0.38e-6, 0.41e-6);
    CHECK(r > 0.38e-6);
    CHECK(r < 0.41e-6);
    auto g = strand(r);
    const double kp = solve_neff(g, {"HE", 1, 2}, w0) * w0 / constants::c;
    const double k1 = solve_neff(g, {"HE", 1, 1}, w0 / 3) * (w0 / 3) / constants::c;
    CHECK(std::abs(3 * k1 - kp) / kp < 1e-9);
}
