#include "betaforge/program.hpp"

#include <algorithm>
#include <cmath>

#include "betaforge/errors.hpp"

namespace betaforge {

bool Domain::contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim) return false;
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return !predicate || predicate(x);
}

Domain Domain::box(int dim, double lo, double hi) {
    Domain d;
    d.dim = dim;
    d.lo.assign(static_cast<std::size_t>(dim), lo);
    d.hi.assign(static_cast<std::size_t>(dim), hi);
    d.predicate = [lo, hi](std::span<const double> x) {
        for (double v : x) {
            if (v <= lo || v >= hi) return false;
        }
        return true;
    };
    return d;
}

Domain Domain::shell(int dim, double inner, double outer) {
    Domain d;
    d.dim = dim;
    d.lo.assign(static_cast<std::size_t>(dim), -outer);
    d.hi.assign(static_cast<std::size_t>(dim), outer);
    d.predicate = [inner, outer](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return r2 < outer * outer && (inner <= 0.0 || r2 > inner * inner);
    };
    return d;
}

Domain Domain::intersect(const Domain& other) const {
    if (other.dim != dim) throw DimensionError("domain: dimension mismatch in intersection");
    Domain d;
    d.dim = dim;
    for (std::size_t i = 0; i < static_cast<std::size_t>(dim); ++i) {
        d.lo.push_back(std::max(lo[i], other.lo[i]));
        d.hi.push_back(std::min(hi[i], other.hi[i]));
    }
    auto a = predicate;
    auto b = other.predicate;
    d.predicate = [a, b](std::span<const double> x) { return (!a || a(x)) && (!b || b(x)); };
    return d;
}

Domain Domain::restrict(std::function<bool(std::span<const double>)> pred) const {
    Domain d = *this;
    auto a = predicate;
    d.predicate = [a, pred = std::move(pred)](std::span<const double> x) {
        return (!a || a(x)) && pred(x);
    };
    return d;
}

std::vector<Jet> seed(std::span<const double> x, int order) {
    const int n = static_cast<int>(x.size());
    std::vector<Jet> out;
    out.reserve(x.size());
    for (int i = 0; i < n; ++i) out.push_back(Jet::variable(x[static_cast<std::size_t>(i)], i, n, order));
    return out;
}

std::vector<Jet> constants(std::span<const double> x) {
    return {x.begin(), x.end()};
}

Jet jet_eval(const ScalarProgram& p, std::span<const double> x, int order) {
    if (order < 0 || order > kMaxJetOrder) throw OrderError("jet_eval: order must be in [0, 3]");
    if (static_cast<int>(x.size()) != p.dim) throw DimensionError("jet_eval: point has wrong dimension");
    if (!p.domain.contains(x)) throw DomainError("jet_eval: point outside program domain");
    Jet r = p.fn(seed(x, order));
    if (r.is_scalar()) r = Jet::constant(r.value(), p.dim, order);
    return r.truncated(order);
}

namespace {

struct Tap {
    int offset;
    double weight;
};

// Central difference stencils of second-order accuracy, unit spacing.
std::vector<Tap> stencil(int multiplicity) {
    switch (multiplicity) {
        case 1: return {{1, 0.5}, {-1, -0.5}};
        case 2: return {{1, 1.0}, {0, -2.0}, {-1, 1.0}};
        case 3: return {{2, 0.5}, {1, -1.0}, {-1, 1.0}, {-2, -0.5}};
        default: return {{0, 1.0}};
    }
}

double fd_partial(const ScalarProgram& p, std::span<const double> x, std::span<const std::uint8_t> ex,
                  double h) {
    const std::size_t n = x.size();
    std::vector<std::vector<Tap>> taps(n);
    int total = 0;
    for (std::size_t v = 0; v < n; ++v) {
        taps[v] = stencil(ex[v]);
        total += ex[v];
    }
    std::vector<std::size_t> pos(n, 0);
    std::vector<double> pt(n);
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t v = 0; v < n; ++v) {
            const auto& t = taps[v][pos[v]];
            pt[v] = x[v] + t.offset * h;
            w *= t.weight;
        }
        if (!p.domain.contains(pt)) throw DomainError("fd_oracle: stencil leaves the domain");
        acc += w * p.fn(constants(pt)).value();
        std::size_t v = 0;
        while (v < n && ++pos[v] == taps[v].size()) pos[v++] = 0;
        if (v == n) break;
    }
    return acc / std::pow(h, total);
}

}  // namespace

Jet fd_oracle(const ScalarProgram& p, std::span<const double> x, int order, double step) {
    if (order < 0 || order > kMaxJetOrder) throw OrderError("fd_oracle: order must be in [0, 3]");
    if (!(step > 0.0)) throw DomainError("fd_oracle: step must be positive");
    if (!p.domain.contains(x)) throw DomainError("fd_oracle: point outside program domain");
    Jet out = Jet::constant(0.0, p.dim, order);
    const auto& L = JetLayout::get(p.dim);
    auto c = out.coeffs();
    for (std::size_t i = 0; i < L.size(order); ++i) {
        const auto ex = L.exponents(i);
        const double coarse = fd_partial(p, x, ex, step);
        const double fine = fd_partial(p, x, ex, step / 2.0);
        const double d = L.degree(i) == 0 ? coarse : (4.0 * fine - coarse) / 3.0;
        c[i] = d / L.factorial(i);
    }
    return out;
}

}  // namespace betaforge
