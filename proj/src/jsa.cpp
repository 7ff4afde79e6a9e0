#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "kernel.hpp"
#include "tripletforge/errors.hpp"
#include "tripletforge/jsa.hpp"

namespace tripletforge::jsa {

void FrequencyGrid::validate() const {
    for (const auto& a : axis) {
        if (a.count < 2) throw ValidationError("frequency grid axes need count >= 2");
        if (!(a.omega_max > a.omega_min) || !(a.omega_min > 0.0))
            throw ValidationError("frequency grid axes need 0 < omega_min < omega_max");
    }
}

FrequencyGrid FrequencyGrid::centered(SpectralWindow window, double center, std::size_t count) {
    if (count < 2) throw ValidationError("frequency grid needs count >= 2");
    if (!window.contains(center)) throw ValidationError("grid center lies outside the spectral window");
    const std::size_t c = (count - 1) / 2;
    const std::size_t above = count - 1 - c;
    double h = (window.omega_max - center) / static_cast<double>(above);
    if (c > 0) h = std::min(h, (center - window.omega_min) / static_cast<double>(c));
    FrequencyAxis a{center - h * static_cast<double>(c), center + h * static_cast<double>(above), count};
    FrequencyGrid g;
    g.axis[0] = g.axis[1] = g.axis[2] = a;
    return g;
}

std::vector<double> JointAmplitude::intensity() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::norm(values[i]);
    return out;
}

JointAmplitude joint_amplitude(const Source& s, const FrequencyGrid& grid, bool normalized, double support_threshold) {
    grid.validate();
    for (const auto& a : grid.axis) {
        if (!s.triplet_curve->contains(a.omega_min) || !s.triplet_curve->contains(a.omega_max)) {
            std::ostringstream os;
            os << "frequency grid [" << a.omega_min << ", " << a.omega_max
               << "] rad/s exceeds the triplet dispersion span; use the source window";
            throw WindowError(os.str(), s.window.omega_min, s.window.omega_max);
        }
    }
    const detail::Kernel kr(s);
    const bool pulsed = s.pump.pulsed();
    const std::size_t n0 = grid.axis[0].count, n1 = grid.axis[1].count, n2 = grid.axis[2].count;
    double min_step = std::min({grid.axis[0].step(), grid.axis[1].step(), grid.axis[2].step()});

    JointAmplitude out;
    out.grid = grid;
    out.values.assign(grid.size(), {0.0, 0.0});
    numerics::parallel_for(n0, [&](std::size_t i) {
        std::array<double, 3> w{};
        for (std::size_t j = 0; j < n1; ++j) {
            for (std::size_t k = 0; k < n2; ++k) {
                w = {grid.axis[0].at(i), grid.axis[1].at(j), grid.axis[2].at(k)};
                // Sorted evaluation keeps the value bit-identical under permutation.
                std::sort(w.begin(), w.end());
                const double sum = (w[0] + w[1]) + w[2];
                double amp;
                if (pulsed) {
                    if (!kr.in_pump_support(sum)) continue;
                    const double dk = ((kr.k1(w[0]) + kr.k1(w[1])) + kr.k1(w[2])) - kr.kp(sum);
                    amp = kr.xi(sum) * detail::sinc(kr.sinc_arg(dk));
                } else {
                    if (std::abs(sum - kr.omega0) > 0.25 * min_step) continue;
                    const double dk = ((kr.k1(w[0]) + kr.k1(w[1])) + kr.k1(w[2])) - kr.kp0;
                    amp = detail::sinc(kr.sinc_arg(dk));
                }
                out.values[grid.index(i, j, k)] = {amp, 0.0};
            }
        }
    });

    std::vector<double> inten = out.intensity();
    double peak = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            for (std::size_t k = 0; k < n2; ++k) {
                const double v = inten[grid.index(i, j, k)];
                peak = std::max(peak, v);
                if (i == 0 || j == 0 || k == 0 || i + 1 == n0 || j + 1 == n1 || k + 1 == n2) edge = std::max(edge, v);
            }
    if (!(peak > 0.0)) throw NumericalError("joint amplitude vanishes on the whole grid");
    out.boundary_ratio = edge / peak;
    if (out.boundary_ratio > support_threshold) {
        SpectralWindow sw = s.window;
        try {
            sw = default_window(s.fiber, s.pump, s.triplet_mode);
        } catch (const Error&) {
        }
        std::ostringstream os;
        os << "frequency grid clips the joint spectral support (edge/peak intensity " << out.boundary_ratio
           << " > " << support_threshold << "); suggested window [" << sw.omega_min << ", " << sw.omega_max
           << "] rad/s";
        throw WindowError(os.str(), sw.omega_min, sw.omega_max);
    }
    for (auto& v : inten) v *= grid.cell_volume();
    out.norm_sum = numerics::pairwise_sum(inten);
    if (normalized) {
        out.scale = 1.0 / std::sqrt(out.norm_sum);
        for (auto& v : out.values) v *= out.scale;
        out.normalized = true;
    }
    return out;
}

}  // namespace tripletforge::jsa
