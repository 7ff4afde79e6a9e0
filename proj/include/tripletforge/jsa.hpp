#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tripletforge/dispersion.hpp"
#include "tripletforge/numerics.hpp"

namespace tripletforge {

enum class SpectralKind { Pulsed, Monochromatic };

std::string to_string(SpectralKind k);
SpectralKind spectral_kind_from_string(const std::string& s);

}  // namespace tripletforge

namespace tripletforge::jsa {

struct PumpSpec {
    SpectralKind kind = SpectralKind::Pulsed;
    double omega0 = 0.0;      // rad/s
    double sigma = 0.0;       // rad/s, pulsed only
    double power_w = 0.0;     // average power
    double rep_rate_hz = 0.0; // pulsed only
    dispersion::ModeLabel mode{"HE", 1, 2};

    void validate() const;
    bool pulsed() const { return kind == SpectralKind::Pulsed; }
};

struct SpectralWindow {
    double omega_min = 0.0;
    double omega_max = 0.0;
    bool contains(double w) const { return w >= omega_min && w <= omega_max; }
    double width() const { return omega_max - omega_min; }
};

// Node budgets for the physics integrals. Sharp axes cross the sinc lobes of
// the phase-matching function; smooth axes only see slowly varying envelopes.
struct IntegrationSettings {
    double rel_tol = 1e-3;
    int max_refinements = 3;
    std::size_t smooth_nodes = 64;
    std::size_t sharp_nodes = 512;
    std::size_t seed_nodes = 48;
    numerics::Rule rule = numerics::Rule::GaussLegendre;

    void validate() const;
};

using CurveProvider = std::function<dispersion::ModeCurve(const dispersion::FiberSpec&, const dispersion::ModeLabel&,
                                                          const std::vector<double>&)>;

struct SourceOptions {
    std::size_t curve_points = 2048;
    double window_padding = 0.03;  // fractional padding of the triplet curve span
    CurveProvider provider;        // defaults to dispersion::solve_mode
};

class Source {
public:
    dispersion::FiberSpec fiber;
    PumpSpec pump;
    dispersion::ModeLabel triplet_mode{"HE", 1, 1};
    dispersion::OverlapResult overlap;
    SpectralWindow window;
    std::shared_ptr<const dispersion::ModeCurve> pump_curve;
    std::shared_ptr<const dispersion::ModeCurve> triplet_curve;

    double length() const { return fiber.length_m; }
    double gamma() const { return overlap.gamma; }
    double n0() const { return fiber.core.n_at_omega(pump.omega0); }
    // Material index n(omega) used in the rate formulas.
    double index(double omega) const { return fiber.core.n_at_omega(omega); }
    // Span of pump sums that the pump curve supports.
    double pump_sum_min() const { return pump_curve->omega_min(); }
    double pump_sum_max() const { return pump_curve->omega_max(); }

    Source with_pump_power(double p) const;
    Source with_gamma(double g) const;
    Source with_length(double l) const;
};

// Triplet-mode window where the on-plane sinc envelope exceeds 1e-4, widened 10%.
SpectralWindow default_window(const dispersion::FiberSpec& fiber, const PumpSpec& pump,
                              const dispersion::ModeLabel& triplet_mode);

Source build_source(const dispersion::FiberSpec& fiber, const PumpSpec& pump, const dispersion::ModeLabel& triplet_mode,
                    std::optional<SpectralWindow> window, double chi3, const SourceOptions& opts = {});

// Assembles a source from precomputed curves, e.g. user-tabulated dispersion.
Source make_source(const dispersion::FiberSpec& fiber, const PumpSpec& pump, const dispersion::ModeLabel& triplet_mode,
                   SpectralWindow window, dispersion::OverlapResult overlap, dispersion::ModeCurve pump_curve,
                   dispersion::ModeCurve triplet_curve);

double delta_k(const Source& s, double w1, double w2, double w3);
double delta_k(const dispersion::ModeCurve& pump, const dispersion::ModeCurve& triplet, double w1, double w2,
               double w3);
double pump_envelope(const PumpSpec& pump, double w1, double w2, double w3);
double sinc(double x);
double phase_matching(double length, double dk);

struct FrequencyAxis {
    double omega_min = 0.0;
    double omega_max = 0.0;
    std::size_t count = 0;
    double step() const { return (omega_max - omega_min) / static_cast<double>(count - 1); }
    double at(std::size_t i) const { return omega_min + step() * static_cast<double>(i); }
};

struct FrequencyGrid {
    FrequencyAxis axis[3];

    void validate() const;
    std::size_t size() const { return axis[0].count * axis[1].count * axis[2].count; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * axis[1].count + j) * axis[2].count + k;
    }
    double cell_volume() const { return axis[0].step() * axis[1].step() * axis[2].step(); }

    // Identical axes inside the window with a node at center, so that nodes
    // with i+j+k = 3*center lie on the plane w1+w2+w3 = 3*center.
    static FrequencyGrid centered(SpectralWindow window, double center, std::size_t count);
};

struct JointAmplitude {
    FrequencyGrid grid;
    std::vector<std::complex<double>> values;  // w1-major
    bool normalized = false;
    double norm_sum = 0.0;    // sum |f|^2 dw^3 before normalisation
    double scale = 1.0;       // applied factor 1/sqrt(norm_sum)
    double boundary_ratio = 0.0;

    std::vector<double> intensity() const;
};

JointAmplitude joint_amplitude(const Source& s, const FrequencyGrid& grid, bool normalized,
                               double support_threshold = 1e-4);

struct SpontaneousRate {
    SpectralKind pump_kind = SpectralKind::Pulsed;
    double c3sq = 0.0;       // per pulse (pulsed) or per second (cw)
    double n0_per_s = 0.0;
    double prefactor = 0.0;
    double integral = 0.0;
    numerics::ConvergenceReport report;
};

SpontaneousRate c3_squared_pulsed(const Source& s, const IntegrationSettings& settings = {});
SpontaneousRate c3_squared_cw(const Source& s, const IntegrationSettings& settings = {});
SpontaneousRate spontaneous_rate(const Source& s, const IntegrationSettings& settings = {});

// Single-photon spectrum: |f|^2 integrated over the other two frequencies at
// each node of `axis`, normalised to unit integral. Integrates across the
// pump ridge instead of sampling it, so it stays valid on coarse axes.
struct Marginal {
    std::vector<double> density;  // 1/(rad/s)
    numerics::ConvergenceReport report;  // on the unnormalised total
};
Marginal single_photon_marginal(const Source& s, const FrequencyAxis& axis, const IntegrationSettings& settings = {});

// N0 = 3 |c3|^2, times R for a pulsed pump.
double n0(double c3sq, const PumpSpec& pump);

// Throws ConvergenceError when the report did not converge.
void require_converged(const numerics::ConvergenceReport& r, const std::string& what);

}  // namespace tripletforge::jsa
