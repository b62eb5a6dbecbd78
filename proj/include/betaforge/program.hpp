#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "betaforge/jet.hpp"

namespace betaforge {

/// Open set in R^n with a bounding box used for sampling.
struct Domain {
    int dim = 0;
    std::vector<double> lo, hi;
    std::function<bool(std::span<const double>)> predicate;

    [[nodiscard]] bool contains(std::span<const double> x) const;

    static Domain box(int dim, double lo, double hi);
    /// Ball of radius `outer` minus the closed ball of radius `inner`.
    static Domain shell(int dim, double inner, double outer);
    [[nodiscard]] Domain intersect(const Domain& other) const;
    [[nodiscard]] Domain restrict(std::function<bool(std::span<const double>)> pred) const;
};

/// Scalar function of n variables written in jet arithmetic.
struct ScalarProgram {
    int dim = 0;
    std::function<Jet(std::span<const Jet>)> fn;
    Domain domain;
};

/// Seed x as jet variables of the given order.
std::vector<Jet> seed(std::span<const double> x, int order);
std::vector<Jet> constants(std::span<const double> x);

/// Exact truncated Taylor jet of a program at x.
Jet jet_eval(const ScalarProgram& p, std::span<const double> x, int order);

/// Central finite differences with one Richardson step. Returns a jet whose
/// partials are the finite-difference estimates.
Jet fd_oracle(const ScalarProgram& p, std::span<const double> x, int order, double step);

}  // namespace betaforge
