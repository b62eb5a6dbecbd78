#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace betaforge {

inline constexpr int kMaxJetOrder = 3;

/// Coefficient layout for truncated Taylor polynomials in a fixed number of
/// variables. Monomials are graded by total degree, so the layout of a lower
/// order is a prefix of the layout of a higher one.
class JetLayout {
public:
    struct Product {
        std::uint32_t lhs, rhs, out;
    };

    static const JetLayout& get(int nvars);

    [[nodiscard]] int nvars() const { return nvars_; }
    [[nodiscard]] std::size_t size(int order) const { return size_upto_[order]; }
    [[nodiscard]] int degree(std::size_t idx) const { return degree_[idx]; }
    [[nodiscard]] std::span<const std::uint8_t> exponents(std::size_t idx) const;
    /// Index of a monomial; throws OrderError when the degree exceeds the cap.
    [[nodiscard]] std::size_t index(std::span<const int> exponents) const;
    /// Index of the monomial obtained by adding one to `var`, or -1.
    [[nodiscard]] long raised(std::size_t idx, int var) const {
        return raise_[idx * static_cast<std::size_t>(nvars_) + static_cast<std::size_t>(var)];
    }
    /// Products contributing to coefficients of degree <= order.
    [[nodiscard]] std::span<const Product> products(int order) const;
    /// Multi-index factorial of a monomial.
    [[nodiscard]] double factorial(std::size_t idx) const { return factorial_[idx]; }

private:
    explicit JetLayout(int nvars);

    int nvars_;
    std::vector<std::uint8_t> exps_;
    std::vector<int> degree_;
    std::vector<double> factorial_;
    std::vector<long> raise_;
    std::vector<Product> products_;
    std::size_t size_upto_[kMaxJetOrder + 1]{};
    std::size_t products_upto_[kMaxJetOrder + 1]{};
};

/// Truncated multivariate Taylor jet. Coefficients are stored as Taylor
/// coefficients (partial derivative divided by the multi-index factorial).
/// A jet with zero variables is a plain constant and broadcasts in
/// arithmetic against jets of any shape.
class Jet {
public:
    Jet() : c_(1, 0.0) {}
    Jet(double v) : c_(1, v) {}  // NOLINT(google-explicit-constructor)

    static Jet constant(double v, int nvars, int order);
    static Jet variable(double v, int var, int nvars, int order);

    [[nodiscard]] double value() const { return c_[0]; }
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] int nvars() const { return nvars_; }
    [[nodiscard]] bool is_scalar() const { return nvars_ == 0; }
    [[nodiscard]] const JetLayout& layout() const { return JetLayout::get(nvars_); }
    [[nodiscard]] std::span<const double> coeffs() const { return c_; }
    [[nodiscard]] std::span<double> coeffs() { return c_; }

    /// Partial derivative for the given multi-index of exponents.
    [[nodiscard]] double partial(std::span<const int> exponents) const;
    [[nodiscard]] double d(int i) const;
    [[nodiscard]] double d(int i, int j) const;
    [[nodiscard]] double d(int i, int j, int k) const;

    /// Jet of the partial derivative in one variable; order drops by one.
    [[nodiscard]] Jet derivative(int var) const;
    [[nodiscard]] Jet truncated(int order) const;

    /// g(this) where g has the given Taylor coefficients about value().
    [[nodiscard]] Jet compose(std::span<const double> taylor) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o);
    Jet& operator/=(const Jet& o);
    Jet& operator*=(double s);
    Jet& operator+=(double s) { c_[0] += s; return *this; }
    Jet& operator-=(double s) { c_[0] -= s; return *this; }

    friend Jet operator-(Jet a);
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a -= s; }
    friend Jet operator-(double s, const Jet& a) { return -a + s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
    friend Jet operator/(double s, const Jet& a);

private:
    Jet(int nvars, int order, std::vector<double> c)
        : nvars_(nvars), order_(order), c_(std::move(c)) {}
    void align_with(const Jet& o);

    int nvars_ = 0;
    int order_ = 0;
    std::vector<double> c_;
};

Jet recip(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);
Jet ipow(const Jet& a, int p);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet atan(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet tanh(const Jet& a);
/// |a|; undefined at a kink, so a zero value with nonzero order throws.
Jet abs(const Jet& a);
Jet square(const Jet& a);

}  // namespace betaforge
