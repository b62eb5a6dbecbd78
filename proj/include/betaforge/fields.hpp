#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "betaforge/jet.hpp"
#include "betaforge/program.hpp"

namespace betaforge {

using JetVec = std::vector<Jet>;

/// Dense square matrix of jets, row-major.
class JetMatrix {
public:
    JetMatrix() = default;
    explicit JetMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n * n), Jet(0.0)) {}

    [[nodiscard]] int size() const { return n_; }
    Jet& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    [[nodiscard]] const Jet& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    [[nodiscard]] Eigen::MatrixXd values() const;

private:
    int n_ = 0;
    std::vector<Jet> a_;
};

/// Inverse by Gauss-Jordan elimination with pivoting on values.
JetMatrix inverse(const JetMatrix& m);
Jet quadratic(const JetMatrix& m, const JetVec& u, const JetVec& v);
JetVec matvec(const JetMatrix& m, const JetVec& v);
Eigen::VectorXd values(const JetVec& v);

/// Riemannian metric a_ij(x). Components are produced together by one call.
struct MetricField {
    int dim = 0;
    std::function<JetMatrix(std::span<const Jet>)> eval;
    Domain domain;
    std::string name;
    std::optional<double> declared_mu;

    /// Component jets at x; throws DomainError or PositivityError.
    [[nodiscard]] JetMatrix at(std::span<const double> x, int order) const;
    [[nodiscard]] Eigen::MatrixXd value(std::span<const double> x) const;
};

/// One-form b_i(x).
struct OneFormField {
    int dim = 0;
    std::function<JetVec(std::span<const Jet>)> eval;
    Domain domain;
    std::string name;

    [[nodiscard]] JetVec at(std::span<const double> x, int order) const;
    [[nodiscard]] Eigen::VectorXd value(std::span<const double> x) const;
};

/// Exact value of s0^2 / (a^2 - mu b^2) where the gap vanishes.
using GapLimit = std::function<double(std::span<const double> x, std::span<const double> y)>;

struct GeometryPair {
    MetricField metric;
    OneFormField oneform;
    std::string name;
    std::optional<GapLimit> s0sq_over_gap;

    [[nodiscard]] int dim() const { return metric.dim; }
    [[nodiscard]] Domain domain() const { return metric.domain.intersect(oneform.domain); }
};

GeometryPair make_pair(MetricField metric, OneFormField oneform, std::string name = {});

Eigen::VectorXd raise_index(const MetricField& g, std::span<const double> x, const Eigen::VectorXd& w);
Eigen::VectorXd lower_index(const MetricField& g, std::span<const double> x, const Eigen::VectorXd& v);
double b_squared(const GeometryPair& p, std::span<const double> x);

/// Metric from a scalar-program-per-component description (upper triangle).
MetricField metric_from_components(int dim, std::vector<ScalarProgram> upper, Domain domain, std::string name);

}  // namespace betaforge
