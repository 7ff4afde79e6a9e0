#include "tripletforge/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "tripletforge/errors.hpp"

namespace tripletforge::numerics {

std::string to_string(Rule r) { return r == Rule::Trapezoid ? "trapezoid" : "gauss-legendre"; }

Rule rule_from_string(const std::string& s) {
    if (s == "trapezoid") return Rule::Trapezoid;
    if (s == "gauss-legendre" || s == "gauss_legendre") return Rule::GaussLegendre;
    throw ValidationError("unknown quadrature rule '" + s + "' (expected trapezoid or gauss-legendre)");
}

void QuadratureSpec::validate(std::size_t dims) const {
    if (nodes.size() != dims)
        throw ValidationError("quadrature spec has " + std::to_string(nodes.size()) + " axes, integrand needs " +
                              std::to_string(dims));
    for (auto n : nodes)
        if (n < 8) throw ValidationError("quadrature node count must be >= 8");
    if (!(rel_tol > 0.0)) throw ValidationError("quadrature tolerance must be > 0");
    if (refinement_factor < 2) throw ValidationError("refinement factor must be >= 2");
    if (max_refinements < 1) throw ValidationError("max refinements must be >= 1");
}

std::size_t QuadratureSpec::nodes_at(std::size_t axis, int level) const {
    std::size_t n = nodes.at(axis);
    for (int i = 0; i < level; ++i) n *= refinement_factor;
    return n;
}

NodeSet gauss_legendre(std::size_t n) {
    NodeSet out;
    out.x.resize(n);
    out.w.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.x[i] = -x;
        out.w[i] = w;
        out.x[n - 1 - i] = x;
        out.w[n - 1 - i] = w;
    }
    return out;
}

namespace {
const NodeSet& gl8() {
    static const NodeSet s = gauss_legendre(8);
    return s;
}
}  // namespace

NodeSet composite_rule(Interval iv, std::size_t nodes, Rule rule) {
    if (!(iv.hi > iv.lo)) throw ValidationError("quadrature interval must have hi > lo");
    NodeSet out;
    if (rule == Rule::Trapezoid) {
        if (nodes < 2) nodes = 2;
        out.x.resize(nodes);
        out.w.resize(nodes);
        const double h = iv.width() / static_cast<double>(nodes - 1);
        for (std::size_t i = 0; i < nodes; ++i) {
            out.x[i] = (i + 1 == nodes) ? iv.hi : iv.lo + h * static_cast<double>(i);
            out.w[i] = (i == 0 || i + 1 == nodes) ? 0.5 * h : h;
        }
        return out;
    }
    const NodeSet& g = gl8();
    const std::size_t panels = std::max<std::size_t>(1, (nodes + 7) / 8);
    const double h = iv.width() / static_cast<double>(panels);
    out.x.reserve(panels * 8);
    out.w.reserve(panels * 8);
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = iv.lo + h * static_cast<double>(p);
        const double mid = a + 0.5 * h;
        for (std::size_t k = 0; k < 8; ++k) {
            out.x.push_back(mid + 0.5 * h * g.x[k]);
            out.w.push_back(0.5 * h * g.w[k]);
        }
    }
    return out;
}

double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

ConvergenceReport refine(const std::function<double(int level)>& eval, double rel_tol, int max_refinements) {
    ConvergenceReport rep;
    double prev = eval(0);
    rep.history.push_back(prev);
    rep.value = prev;
    rep.levels = 1;
    rep.rel_error = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= max_refinements; ++level) {
        const double cur = eval(level);
        rep.history.push_back(cur);
        rep.levels = level + 1;
        rep.value = cur;
        const double scale = std::max(std::abs(cur), std::abs(prev));
        rep.rel_error = scale == 0.0 ? 0.0 : std::abs(cur - prev) / scale;
        if (!std::isfinite(cur)) {
            rep.converged = false;
            return rep;
        }
        if (rep.rel_error <= rel_tol) {
            rep.converged = true;
            return rep;
        }
        prev = cur;
    }
    rep.converged = false;
    return rep;
}

namespace {

double sum_axes(const std::function<double(std::span<const double>)>& f, const std::vector<NodeSet>& sets,
                std::size_t axis, std::vector<double>& point) {
    const NodeSet& s = sets[axis];
    std::vector<double> terms(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        point[axis] = s.x[i];
        const double v = (axis + 1 == sets.size()) ? f(point) : sum_axes(f, sets, axis + 1, point);
        terms[i] = s.w[i] * v;
    }
    return pairwise_sum(terms);
}

}  // namespace

double tensor_quadrature(const std::function<double(std::span<const double>)>& f, std::span<const Interval> bounds,
                         std::span<const std::size_t> nodes, Rule rule) {
    const std::size_t d = bounds.size();
    if (d == 0) throw ValidationError("integrate_nd needs at least one axis");
    std::vector<NodeSet> sets;
    sets.reserve(d);
    for (std::size_t a = 0; a < d; ++a) {
        if (!std::isfinite(bounds[a].lo) || !std::isfinite(bounds[a].hi))
            throw ValidationError("integration bounds must be finite");
        sets.push_back(composite_rule(bounds[a], nodes[a], rule));
    }
    const NodeSet& outer = sets[0];
    std::vector<double> terms = parallel_map(outer.size(), [&](std::size_t i) {
        std::vector<double> point(d);
        point[0] = outer.x[i];
        const double v = (d == 1) ? f(point) : sum_axes(f, sets, 1, point);
        return outer.w[i] * v;
    });
    return pairwise_sum(terms);
}

ConvergenceReport integrate_nd(const std::function<double(std::span<const double>)>& f,
                               std::span<const Interval> bounds, const QuadratureSpec& spec) {
    spec.validate(bounds.size());
    return refine(
        [&](int level) {
            std::vector<std::size_t> n(bounds.size());
            for (std::size_t a = 0; a < n.size(); ++a) n[a] = spec.nodes_at(a, level);
            return tensor_quadrature(f, bounds, n, spec.rule);
        },
        spec.rel_tol, spec.max_refinements);
}

double find_root_bracketed(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0) == (fb > 0))
        throw NumericalError("root bracket [" + std::to_string(a) + ", " + std::to_string(b) +
                             "] has no sign change (f=" + std::to_string(fa) + ", " + std::to_string(fb) + ")");
    if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    auto tol_at = [&](double x) { return rel_tol * std::max(std::abs(x), std::numeric_limits<double>::min()); };
    // Bisection until the bracket is small, then secant steps kept inside it.
    for (int it = 0; it < 400 && (b - a) > 1e-3 * std::max(std::abs(a), std::abs(b)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    for (int it = 0; it < 200; ++it) {
        double x = b - fb * (b - a) / (fb - fa);
        if (!(x > a && x < b)) x = 0.5 * (a + b);
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0) == (fa > 0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if (b - a <= tol_at(x)) return 0.5 * (a + b);
        // Guard against one-sided secant stagnation.
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        if (b - a <= tol_at(m)) return 0.5 * (a + b);
    }
    return 0.5 * (a + b);
}

namespace {
std::atomic<std::size_t> g_threads{0};
thread_local bool t_in_parallel = false;

struct NestedGuard {
    bool prev;
    NestedGuard() : prev(t_in_parallel) { t_in_parallel = true; }
    ~NestedGuard() { t_in_parallel = prev; }
};
}  // namespace

void set_thread_count(std::size_t n) { g_threads.store(n); }

std::size_t thread_count() {
    std::size_t n = g_threads.load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    // Nested calls run serially on the calling worker.
    const std::size_t workers = t_in_parallel ? 1 : std::min(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::size_t first_index = n;
    std::mutex m;
    auto work = [&] {
        NestedGuard guard;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(m);
                if (i < first_index) {
                    first_index = i;
                    first_error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& fn) {
    std::vector<double> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace tripletforge::numerics
