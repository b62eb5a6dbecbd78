#include "betaforge/jet.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "betaforge/errors.hpp"

namespace betaforge {

namespace {

constexpr int kMaxVars = 32;

void enumerate(int nvars, int degree, int var, std::vector<std::uint8_t>& cur,
               std::vector<std::vector<std::uint8_t>>& out) {
    if (var == nvars - 1) {
        cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(degree);
        out.push_back(cur);
        return;
    }
    for (int e = degree; e >= 0; --e) {
        cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
        enumerate(nvars, degree - e, var + 1, cur, out);
    }
    cur[static_cast<std::size_t>(var)] = 0;
}

double binomial_real(double p, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= (p - i) / (i + 1);
    return r;
}

}  // namespace

// ============================================================================
// JetLayout
// ============================================================================

JetLayout::JetLayout(int nvars) : nvars_(nvars) {
    std::vector<std::vector<std::uint8_t>> monos;
    if (nvars == 0) {
        monos.emplace_back();
        for (int k = 0; k <= kMaxJetOrder; ++k) size_upto_[k] = 1;
    } else {
        std::vector<std::uint8_t> cur(static_cast<std::size_t>(nvars), 0);
        for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
            enumerate(nvars, deg, 0, cur, monos);
            size_upto_[deg] = monos.size();
        }
    }
    const std::size_t n = monos.size();
    const auto nv = static_cast<std::size_t>(nvars);
    std::map<std::vector<std::uint8_t>, std::size_t> lookup;
    exps_.reserve(n * nv);
    for (std::size_t i = 0; i < n; ++i) {
        lookup[monos[i]] = i;
        int deg = 0;
        double fact = 1.0;
        for (auto e : monos[i]) {
            exps_.push_back(e);
            deg += e;
            for (int k = 2; k <= e; ++k) fact *= k;
        }
        degree_.push_back(deg);
        factorial_.push_back(fact);
    }
    raise_.assign(n * nv, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (degree_[i] == kMaxJetOrder) continue;
        for (std::size_t v = 0; v < nv; ++v) {
            auto m = monos[i];
            ++m[v];
            raise_[i * nv + v] = static_cast<long>(lookup.at(m));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (degree_[i] + degree_[j] > kMaxJetOrder) continue;
            auto m = monos[i];
            for (std::size_t v = 0; v < nv; ++v) m[v] = static_cast<std::uint8_t>(m[v] + monos[j][v]);
            products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                 static_cast<std::uint32_t>(lookup.at(m))});
        }
    }
    std::stable_sort(products_.begin(), products_.end(),
                     [](const Product& a, const Product& b) { return a.out < b.out; });
    for (int k = 0; k <= kMaxJetOrder; ++k) {
        const auto lim = size_upto_[k];
        products_upto_[k] = static_cast<std::size_t>(
            std::partition_point(products_.begin(), products_.end(),
                                 [lim](const Product& p) { return p.out < lim; }) -
            products_.begin());
    }
}

const JetLayout& JetLayout::get(int nvars) {
    static std::array<std::atomic<const JetLayout*>, kMaxVars + 1> cache{};
    static std::mutex mu;
    if (nvars < 0 || nvars > kMaxVars) {
        throw DimensionError("jet: unsupported number of variables " + std::to_string(nvars));
    }
    const auto slot = static_cast<std::size_t>(nvars);
    const JetLayout* p = cache[slot].load(std::memory_order_acquire);
    if (p != nullptr) return *p;
    std::lock_guard<std::mutex> lock(mu);
    p = cache[slot].load(std::memory_order_relaxed);
    if (p == nullptr) {
        p = new JetLayout(nvars);  // intentionally leaked, lives for the process
        cache[slot].store(p, std::memory_order_release);
    }
    return *p;
}

std::span<const std::uint8_t> JetLayout::exponents(std::size_t idx) const {
    const auto nv = static_cast<std::size_t>(nvars_);
    return {exps_.data() + idx * nv, nv};
}

std::size_t JetLayout::index(std::span<const int> exponents) const {
    if (static_cast<int>(exponents.size()) != nvars_) {
        throw DimensionError("jet: multi-index has wrong length");
    }
    int deg = 0;
    for (int e : exponents) {
        if (e < 0) throw DomainError("jet: negative exponent");
        deg += e;
    }
    if (deg > kMaxJetOrder) throw OrderError("jet: derivative order exceeds cap of 3");
    for (std::size_t i = (deg == 0 ? 0 : size_upto_[deg - 1]); i < size_upto_[deg]; ++i) {
        auto ex = this->exponents(i);
        if (std::equal(ex.begin(), ex.end(), exponents.begin(),
                       [](std::uint8_t a, int b) { return a == b; })) {
            return i;
        }
    }
    throw DomainError("jet: monomial not found");
}

std::span<const JetLayout::Product> JetLayout::products(int order) const {
    return {products_.data(), products_upto_[order]};
}

// ============================================================================
// Jet
// ============================================================================

Jet Jet::constant(double v, int nvars, int order) {
    if (order < 0 || order > kMaxJetOrder) throw OrderError("jet: order must be in [0, 3]");
    const auto& L = JetLayout::get(nvars);
    std::vector<double> c(L.size(order), 0.0);
    c[0] = v;
    return Jet(nvars, order, std::move(c));
}

Jet Jet::variable(double v, int var, int nvars, int order) {
    Jet j = constant(v, nvars, order);
    if (var < 0 || var >= nvars) throw DimensionError("jet: variable index out of range");
    if (order >= 1) j.c_[1 + static_cast<std::size_t>(var)] = 1.0;
    return j;
}

double Jet::partial(std::span<const int> exponents) const {
    if (is_scalar()) {
        for (int e : exponents) {
            if (e != 0) return 0.0;
        }
        return c_[0];
    }
    const auto& L = layout();
    const std::size_t idx = L.index(exponents);
    if (L.degree(idx) > order_) throw OrderError("jet: requested derivative above jet order");
    return c_[idx] * L.factorial(idx);
}

double Jet::d(int i) const {
    std::vector<int> e(static_cast<std::size_t>(nvars_), 0);
    if (is_scalar()) return 0.0;
    ++e.at(static_cast<std::size_t>(i));
    return partial(e);
}

double Jet::d(int i, int j) const {
    if (is_scalar()) return 0.0;
    std::vector<int> e(static_cast<std::size_t>(nvars_), 0);
    ++e.at(static_cast<std::size_t>(i));
    ++e.at(static_cast<std::size_t>(j));
    return partial(e);
}

double Jet::d(int i, int j, int k) const {
    if (is_scalar()) return 0.0;
    std::vector<int> e(static_cast<std::size_t>(nvars_), 0);
    ++e.at(static_cast<std::size_t>(i));
    ++e.at(static_cast<std::size_t>(j));
    ++e.at(static_cast<std::size_t>(k));
    return partial(e);
}

Jet Jet::derivative(int var) const {
    if (is_scalar()) return Jet(0.0);
    if (order_ == 0) throw OrderError("jet: cannot differentiate an order-0 jet");
    const auto& L = layout();
    const int out_order = order_ - 1;
    std::vector<double> c(L.size(out_order), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const long r = L.raised(i, var);
        c[i] = (L.exponents(i)[static_cast<std::size_t>(var)] + 1) * c_[static_cast<std::size_t>(r)];
    }
    return Jet(nvars_, out_order, std::move(c));
}

Jet Jet::truncated(int order) const {
    if (is_scalar() || order >= order_) return *this;
    std::vector<double> c(c_.begin(), c_.begin() + static_cast<long>(layout().size(order)));
    return Jet(nvars_, order, std::move(c));
}

void Jet::align_with(const Jet& o) {
    if (o.is_scalar()) return;
    if (is_scalar()) {
        const double v = c_[0];
        *this = constant(v, o.nvars_, o.order_);
        return;
    }
    if (nvars_ != o.nvars_) throw DimensionError("jet: mismatched variable counts");
    if (o.order_ < order_) *this = truncated(o.order_);
}

Jet& Jet::operator+=(const Jet& o) {
    if (o.is_scalar()) {
        c_[0] += o.c_[0];
        return *this;
    }
    align_with(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    if (o.is_scalar()) {
        c_[0] -= o.c_[0];
        return *this;
    }
    align_with(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

Jet operator-(Jet a) {
    for (auto& v : a.c_) v = -v;
    return a;
}

Jet operator*(const Jet& a, const Jet& b) {
    if (a.is_scalar()) return b * a.c_[0];
    if (b.is_scalar()) return a * b.c_[0];
    if (a.nvars_ != b.nvars_) throw DimensionError("jet: mismatched variable counts");
    const int order = std::min(a.order_, b.order_);
    const auto& L = a.layout();
    std::vector<double> c(L.size(order), 0.0);
    const double* pa = a.c_.data();
    const double* pb = b.c_.data();
    for (const auto& p : L.products(order)) c[p.out] += pa[p.lhs] * pb[p.rhs];
    return Jet(a.nvars_, order, std::move(c));
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet operator/(const Jet& a, const Jet& b) {
    if (b.is_scalar()) {
        if (b.c_[0] == 0.0) throw DomainError("jet: division by zero");
        return a * (1.0 / b.c_[0]);
    }
    return a * recip(b);
}

Jet operator/(double s, const Jet& a) { return recip(a) * s; }

Jet Jet::compose(std::span<const double> taylor) const {
    if (is_scalar() || order_ == 0) return Jet(nvars_, order_, std::vector<double>(c_.size(), 0.0)) + taylor[0];
    if (taylor.size() < static_cast<std::size_t>(order_) + 1) {
        throw OrderError("jet: not enough Taylor coefficients for composition");
    }
    Jet delta = *this;
    delta.c_[0] = 0.0;
    Jet r = constant(taylor[static_cast<std::size_t>(order_)], nvars_, order_);
    for (int j = order_ - 1; j >= 0; --j) {
        r = r * delta;
        r.c_[0] += taylor[static_cast<std::size_t>(j)];
    }
    return r;
}

// ============================================================================
// Elementary functions
// ============================================================================

namespace {
using Taylor = std::array<double, kMaxJetOrder + 1>;
}

Jet recip(const Jet& a) {
    const double u = a.value();
    if (u == 0.0) throw DomainError("jet: reciprocal of zero");
    Taylor t{};
    double p = 1.0 / u;
    for (int j = 0; j <= kMaxJetOrder; ++j) {
        t[static_cast<std::size_t>(j)] = (j % 2 == 0 ? 1.0 : -1.0) * p;
        p /= u;
    }
    return a.compose(t);
}

Jet exp(const Jet& a) {
    const double e = std::exp(a.value());
    return a.compose(Taylor{e, e, e / 2.0, e / 6.0});
}

Jet log(const Jet& a) {
    const double u = a.value();
    if (!(u > 0.0)) throw DomainError("jet: log of non-positive value");
    return a.compose(Taylor{std::log(u), 1.0 / u, -0.5 / (u * u), 1.0 / (3.0 * u * u * u)});
}

Jet sqrt(const Jet& a) {
    const double u = a.value();
    if (u < 0.0 || (u == 0.0 && a.order() > 0 && !a.is_scalar())) {
        throw DomainError("jet: sqrt outside its smooth domain");
    }
    if (u == 0.0) return a.compose(Taylor{0.0, 0.0, 0.0, 0.0});
    const double s = std::sqrt(u);
    return a.compose(Taylor{s, 0.5 / s, -0.125 / (s * u), 0.0625 / (s * u * u)});
}

Jet pow(const Jet& a, double p) {
    const double u = a.value();
    if (p == std::floor(p) && std::abs(p) <= 64) return ipow(a, static_cast<int>(p));
    if (u < 0.0 || (u == 0.0 && a.order() > 0 && !a.is_scalar())) {
        throw DomainError("jet: pow outside its smooth domain");
    }
    Taylor t{};
    for (int j = 0; j <= kMaxJetOrder; ++j) {
        t[static_cast<std::size_t>(j)] = binomial_real(p, j) * std::pow(u, p - j);
    }
    return a.compose(t);
}

Jet ipow(const Jet& a, int p) {
    if (p < 0) return recip(ipow(a, -p));
    Jet result = Jet::constant(1.0, a.nvars(), a.order());
    Jet base = a;
    while (p > 0) {
        if (p & 1) result = result * base;
        p >>= 1;
        if (p > 0) base = base * base;
    }
    return result;
}

Jet square(const Jet& a) { return a * a; }

Jet sin(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return a.compose(Taylor{s, c, -s / 2.0, -c / 6.0});
}

Jet cos(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return a.compose(Taylor{c, -s, -c / 2.0, s / 6.0});
}

Jet tan(const Jet& a) {
    const double t = std::tan(a.value());
    const double q = 1.0 + t * t;
    return a.compose(Taylor{t, q, t * q, q * (1.0 + 3.0 * t * t) / 3.0});
}

Jet atan(const Jet& a) {
    const double u = a.value();
    const double q = 1.0 + u * u;
    return a.compose(Taylor{std::atan(u), 1.0 / q, -u / (q * q), (3.0 * u * u - 1.0) / (3.0 * q * q * q)});
}

Jet sinh(const Jet& a) {
    const double s = std::sinh(a.value()), c = std::cosh(a.value());
    return a.compose(Taylor{s, c, s / 2.0, c / 6.0});
}

Jet cosh(const Jet& a) {
    const double s = std::sinh(a.value()), c = std::cosh(a.value());
    return a.compose(Taylor{c, s, c / 2.0, s / 6.0});
}

Jet tanh(const Jet& a) {
    const double t = std::tanh(a.value());
    const double q = 1.0 - t * t;
    return a.compose(Taylor{t, q, -t * q, q * (3.0 * t * t - 1.0) / 3.0});
}

Jet abs(const Jet& a) {
    const double u = a.value();
    if (u > 0.0) return a;
    if (u < 0.0) return -a;
    if (a.is_scalar() || a.order() == 0) return a;
    throw DomainError("jet: abs is not differentiable at zero");
}

}  // namespace betaforge
