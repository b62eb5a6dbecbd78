#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "betaforge/fields.hpp"

namespace betaforge {

/// Christoffel symbols Gamma^i_{jk} as jets one order below the metric jets,
/// stored at index (i*n + j)*n + k.
std::vector<Jet> christoffel_jets(const JetMatrix& a);

/// Levi-Civita curvature of a metric at one point.
///
/// R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj}.
/// With this sign a round sphere of curvature mu has R^i_k(y) = mu(|y|^2 d^i_k - y^i y_k).
class CurvatureBundle {
public:
    CurvatureBundle(const MetricField& g, std::span<const double> x);
    /// Build from metric jets of order >= 2.
    explicit CurvatureBundle(const JetMatrix& a);

    [[nodiscard]] int dim() const { return n_; }
    [[nodiscard]] const Eigen::MatrixXd& metric() const { return a_; }
    [[nodiscard]] const Eigen::MatrixXd& inverse_metric() const { return ainv_; }
    [[nodiscard]] double gamma(int i, int j, int k) const { return gamma_[idx3(i, j, k)]; }
    /// R^i_{jkl}.
    [[nodiscard]] double riemann(int i, int j, int k, int l) const { return riem_[idx4(i, j, k, l)]; }
    /// a_{im} R^m_{jkl}.
    [[nodiscard]] double riemann_lower(int i, int j, int k, int l) const { return low_[idx4(i, j, k, l)]; }
    /// Ric_{jl} = R^i_{jil}, contracted directly.
    [[nodiscard]] const Eigen::MatrixXd& ricci() const { return ric_; }
    /// Ric_{ij} = 1/2 Hessian in y of the trace of R^i_k(y); independent path.
    [[nodiscard]] Eigen::MatrixXd ricci_from_trace() const;
    /// R^i_k(y) = R^i_{jkl} y^j y^l as a matrix (row i, column k).
    [[nodiscard]] Eigen::MatrixXd directional(const Eigen::VectorXd& y) const;
    /// Sectional curvature of span(u, v); throws DegeneratePlaneError.
    [[nodiscard]] double sectional(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    [[nodiscard]] double scalar() const;

private:
    void build(const JetMatrix& a);
    [[nodiscard]] std::size_t idx3(int i, int j, int k) const {
        return static_cast<std::size_t>((i * n_ + j) * n_ + k);
    }
    [[nodiscard]] std::size_t idx4(int i, int j, int k, int l) const {
        return static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l);
    }

    int n_ = 0;
    Eigen::MatrixXd a_, ainv_, ric_;
    std::vector<double> gamma_, riem_, low_;
};

double sectional_curvature(const MetricField& g, std::span<const double> x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v);

}  // namespace betaforge
