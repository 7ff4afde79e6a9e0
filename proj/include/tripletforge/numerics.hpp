#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tripletforge::numerics {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class Rule { Trapezoid, GaussLegendre };

std::string to_string(Rule r);
Rule rule_from_string(const std::string& s);

struct QuadratureSpec {
    std::vector<std::size_t> nodes;  // per axis at the base level
    Rule rule = Rule::GaussLegendre;
    std::size_t refinement_factor = 2;
    double rel_tol = 1e-3;
    int max_refinements = 4;

    void validate(std::size_t dims) const;
    std::size_t nodes_at(std::size_t axis, int level) const;
};

struct ConvergenceReport {
    double value = 0.0;
    double rel_error = 0.0;
    int levels = 0;
    bool converged = false;
    std::vector<double> history;
};

struct NodeSet {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// Gauss-Legendre nodes and weights on [-1, 1].
NodeSet gauss_legendre(std::size_t n);

// Composite rule over an interval. Gauss-Legendre uses 8-point panels, so the
// node count is rounded up to a multiple of 8.
NodeSet composite_rule(Interval iv, std::size_t nodes, Rule rule);

// Fixed-topology tree summation.
double pairwise_sum(std::span<const double> v);

// Calls eval(level) for level = 0, 1, ... until two successive values agree to
// rel_tol or max_refinements is reached.
ConvergenceReport refine(const std::function<double(int level)>& eval, double rel_tol, int max_refinements);

ConvergenceReport integrate_nd(const std::function<double(std::span<const double>)>& f,
                               std::span<const Interval> bounds, const QuadratureSpec& spec);

// Tensor-product quadrature at one fixed level; used by refine() drivers.
double tensor_quadrature(const std::function<double(std::span<const double>)>& f,
                         std::span<const Interval> bounds, std::span<const std::size_t> nodes, Rule rule);

double find_root_bracketed(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12);

// Worker count for parallel_map; 0 means hardware concurrency.
void set_thread_count(std::size_t n);
std::size_t thread_count();

// Evaluates fn(i) for i in [0, n) and writes each result at index i.
std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& fn);
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace tripletforge::numerics
