#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tripletforge/errors.hpp"
#include "tripletforge/jsa.hpp"
#include "../support/fixtures.hpp"
#include "../support/oracle_cases.hpp"

using namespace tripletforge;
using namespace tripletforge::jsa;

TEST_CASE("pump envelope and phase-matching example values") {
    PumpSpec p;
    p.omega0 = 3.5e15;
    p.sigma = 4.7e12;
    p.power_w = 0.2;
    p.rep_rate_hz = 1e7;
    CHECK(pump_envelope(p, 1e15, 1.2e15, 1.3e15) == 1.0);
    CHECK(pump_envelope(p, 1e15, 1.2e15, 1.3e15 + 4.7e12) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(pump_envelope(p, 1e15, 1.2e15, 1.3e15 - 2 * 4.7e12) == doctest::Approx(std::exp(-4.0)).epsilon(1e-13));
    CHECK(phase_matching(0.01, 0.0) == 1.0);
    CHECK(std::abs(phase_matching(0.01, 2 * std::numbers::pi / 0.01)) < 1e-15);
    CHECK(phase_matching(0.01, 100.0) == doctest::Approx(std::sin(0.5) / 0.5).epsilon(1e-15));
    // series branch
    CHECK(sinc(1e-6) == doctest::Approx(1.0 - 1e-12 / 6.0).epsilon(1e-16));
    CHECK(sinc(-3.0) == doctest::Approx(std::sin(3.0) / 3.0).epsilon(1e-15));

    PumpSpec cw = p;
    cw.kind = SpectralKind::Monochromatic;
    cw.sigma = 0.0;
    cw.rep_rate_hz = 0.0;
    CHECK_NOTHROW(cw.validate());
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.sigma = 1e12;
    p.power_w = -1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("phase mismatch matches the analytic fixture and is permutation symmetric") {
    const auto f = oracle::fixture(1);
    const auto s = oracle::make_source(f, SpectralKind::Pulsed);
    const double a = f.wc * 0.98, b = f.wc * 1.01, c = f.wc * 1.03;
    CHECK(delta_k(s, a, b, c) == doctest::Approx(f.dk(a, b, c)).epsilon(1e-8));
    // k values are ~1e7 1/m, so only rounding of the sum order may differ.
    const double scale = f.kp(a + b + c);
    CHECK(std::abs(delta_k(s, a, b, c) - delta_k(s, c, a, b)) < 1e-14 * scale);
    CHECK(std::abs(delta_k(s, a, b, c) - delta_k(s, b, c, a)) < 1e-14 * scale);
}

TEST_CASE("degenerate design is phase matched inside the central lobe") {
    const auto& b = fixtures::source(532, "pulsed");
    const double wc = b.src.pump.omega0 / 3;
    CHECK(std::abs(delta_k(b.src, wc, wc, wc)) * b.src.length() / 2 < std::numbers::pi);
    CHECK(b.src.window.contains(wc));
}

TEST_CASE("normalised JSA sums to one and is exactly permutation symmetric") {
    const auto& b = fixtures::source(532, "pulsed");
    const auto g = FrequencyGrid::centered(b.src.window, b.src.pump.omega0 / 3, 24);
    const auto a = joint_amplitude(b.src, g, true);
    double s = 0.0;
    for (auto v : a.values) s += std::norm(v);
    CHECK(s * g.cell_volume() == doctest::Approx(1.0).epsilon(1e-3));
    const std::size_t n = 24;
    bool exact = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                const auto v = a.values[g.index(i, j, k)];
                exact = exact && v == a.values[g.index(j, i, k)] && v == a.values[g.index(k, j, i)] &&
                        v == a.values[g.index(i, k, j)] && v == a.values[g.index(j, k, i)] &&
                        v == a.values[g.index(k, i, j)];
            }
    CHECK(exact);
}

TEST_CASE("grid refinement moves the discrete norm toward its limit") {
    const auto& b = fixtures::source(532, "pulsed");
    auto norm = [&](std::size_t n) {
        return joint_amplitude(b.src, FrequencyGrid::centered(b.src.window, b.src.pump.omega0 / 3, n), false).norm_sum;
    };
    const double n1 = norm(17), n2 = norm(33), n4 = norm(65);
    CHECK(std::abs(n2 / n4 - 1.0) < std::abs(n1 / n4 - 1.0));
}

TEST_CASE("cw-pump JSA vanishes exactly off the energy plane") {
    const auto& b = fixtures::source(532, "cw");
    const std::size_t n = 21;
    const auto g = FrequencyGrid::centered(b.src.window, b.src.pump.omega0 / 3, n);
    const auto a = joint_amplitude(b.src, g, false);
    std::size_t on = 0;
    bool off_zero = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                const auto v = a.values[g.index(i, j, k)];
                if (i + j + k == 3 * (n / 2)) on += std::abs(v) > 0;
                else off_zero = off_zero && v == 0.0;
            }
    CHECK(off_zero);
    CHECK(on > 0);
}

TEST_CASE("spontaneous rate scales exactly with power, gamma and length prefactor") {
    const auto f = oracle::fixture(0);
    const auto s = oracle::make_source(f, SpectralKind::Pulsed);
    IntegrationSettings st;
    st.sharp_nodes = 96;
    st.smooth_nodes = 32;
    st.max_refinements = 2;
    const auto r = c3_squared_pulsed(s, st);
    CHECK(c3_squared_pulsed(s.with_pump_power(2 * s.pump.power_w), st).c3sq == doctest::Approx(2 * r.c3sq).epsilon(1e-14));
    CHECK(c3_squared_pulsed(s.with_pump_power(7 * s.pump.power_w), st).c3sq == doctest::Approx(7 * r.c3sq).epsilon(1e-14));
    CHECK(c3_squared_pulsed(s.with_gamma(3 * s.gamma()), st).c3sq == doctest::Approx(9 * r.c3sq).epsilon(1e-14));
    CHECK(c3_squared_pulsed(s.with_length(2 * s.length()), st).prefactor == doctest::Approx(4 * r.prefactor).epsilon(1e-14));

    const auto c = oracle::make_source(f, SpectralKind::Monochromatic);
    const auto rc = c3_squared_cw(c, st);
    CHECK(c3_squared_cw(c.with_pump_power(2 * c.pump.power_w), st).c3sq == doctest::Approx(2 * rc.c3sq).epsilon(1e-14));
    CHECK(c3_squared_cw(c.with_gamma(2 * c.gamma()), st).c3sq == doctest::Approx(4 * rc.c3sq).epsilon(1e-14));
    CHECK(c3_squared_cw(c.with_length(3 * c.length()), st).prefactor == doctest::Approx(9 * rc.prefactor).epsilon(1e-14));

    CHECK(n0(2.0, s.pump) == doctest::Approx(6.0 * s.pump.rep_rate_hz));
    CHECK(n0(2.0, c.pump) == 6.0);
}

TEST_CASE("cw source rate stays below ten triplets per second") {
    const auto& b = fixtures::source(532, "cw");
    CHECK(b.rate.report.converged);
    CHECK(b.rate.n0_per_s > 0.0);
    CHECK(b.rate.n0_per_s < 10.0);
}

TEST_CASE("frequency grid validation") {
    FrequencyGrid g;
    for (auto& a : g.axis) a = {1.0, 2.0, 1};
    CHECK_THROWS_AS(g.validate(), ValidationError);
    for (auto& a : g.axis) a = {2.0, 1.0, 8};
    CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("integrated single-photon marginal: unit area and brute-force shape") {
    const auto f = oracle::fixture(2);
    const auto s = oracle::make_source(f, SpectralKind::Pulsed);
    const FrequencyAxis axis{f.wmin, f.wmax, 41};
    const auto m = single_photon_marginal(s, axis, oracle::tight_settings());
    REQUIRE(m.report.converged);
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < axis.count; ++i) area += 0.5 * (m.density[i] + m.density[i + 1]) * axis.step();
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));

    // midpoint sum over (w2, w3) on a grid much finer than sigma_p
    auto brute = [&](double w1) {
        const int n = 2000;
        const double h = (f.wmax - f.wmin) / n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double w2 = f.wmin + (j + 0.5) * h, w3 = f.wmin + (k + 0.5) * h;
                const double x = f.xi(w1 + w2 + w3), p = f.Xi(w1, w2, w3);
                acc += x * x * p * p;
            }
        return acc;
    };
    const std::size_t ia = 12, ib = 20, ic = 31;
    const double ra = brute(axis.at(ia)) / brute(axis.at(ic)), rb = brute(axis.at(ib)) / brute(axis.at(ic));
    CHECK(m.density[ia] / m.density[ic] == doctest::Approx(ra).epsilon(1e-3));
    CHECK(m.density[ib] / m.density[ic] == doctest::Approx(rb).epsilon(1e-3));

    const auto c = oracle::make_source(f, SpectralKind::Monochromatic);
    const auto mc = single_photon_marginal(c, axis, oracle::tight_settings());
    CHECK(mc.density.size() == axis.count);
    CHECK_THROWS_AS(single_photon_marginal(s, FrequencyAxis{f.wmin, f.wmax, 1}), ValidationError);
}
