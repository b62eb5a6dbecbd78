#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "betaforge/curvature.hpp"
#include "betaforge/fields.hpp"

namespace betaforge {

/// Three-index array T_{ijk} stored row-major.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), v_(static_cast<std::size_t>(n * n * n), 0.0) {}
    double& operator()(int i, int j, int k) { return v_[static_cast<std::size_t>((i * n_ + j) * n_ + k)]; }
    [[nodiscard]] double operator()(int i, int j, int k) const {
        return v_[static_cast<std::size_t>((i * n_ + j) * n_ + k)];
    }
    [[nodiscard]] int size() const { return n_; }
    /// Contract slot `slot` (0, 1 or 2) with a vector.
    [[nodiscard]] Eigen::MatrixXd contract(int slot, const Eigen::VectorXd& v) const;

private:
    int n_ = 0;
    std::vector<double> v_;
};

/// Scalars of one (x, y) sample. A subscript 0 means contraction with y; a
/// dropped index means contraction with b. Covariant derivatives follow a
/// bar, e.g. r00_k is r_{00|k} and s0_0 is s_{0|0}.
struct DirectionScalars {
    double alpha2 = 0, beta = 0;
    double r00 = 0, r0 = 0, s0 = 0, r = 0;
    double p00 = 0, q00 = 0, t00 = 0;
    double p0 = 0, q0 = 0, qs0 = 0, t0 = 0;
    double p = 0, q = 0, t = 0, t_trace = 0, r_trace = 0;
    double r0_0 = 0, s0_0 = 0, r_0 = 0;
    double r00_b = 0, r0_b = 0, s0_b = 0, r_b = 0;
    double r_trace_div = 0, s_trace_div = 0;  // r^i_{|i}, s^i_{|i}
    double s_i0_i = 0;                        // s^i_{0|i}
    double ric00 = 0, ric0 = 0, ric = 0, rbb = 0;
};

/// Derived tensors of a pair (a, b) at one point.
///
/// b_{i|j} is the covariant derivative; r_ij and s_ij are its symmetric and
/// antisymmetric parts. r_i = b^m r_mi, s_i = b^m s_mi, r = r_i b^i,
/// p_ij = r_im r^m_j, q_ij = r_im s^m_j, t_ij = s_im s^m_j,
/// q_i = b^j q_ji and qs_i = b^j q_ij.
class BetaBundle {
public:
    BetaBundle(const GeometryPair& pair, std::span<const double> x);
    /// From metric and one-form jets of order >= 2.
    BetaBundle(const JetMatrix& aj, const JetVec& bj);

    [[nodiscard]] int dim() const { return n; }
    [[nodiscard]] DirectionScalars contract(const Eigen::VectorXd& y) const;

    int n = 0;
    CurvatureBundle curv;
    Eigen::MatrixXd a, ainv;
    Eigen::VectorXd b, bu;
    double b2 = 0;
    Eigen::MatrixXd bij, r_ij, s_ij, p_ij, q_ij, t_ij;
    Eigen::VectorXd r_i, s_i, p_i, q_i, qs_i, t_i;
    double r = 0, p = 0, q = 0, t = 0, t_trace = 0, r_trace = 0;
    Tensor3 r_ijk, s_ijk;           // r_{ij|k}, s_{ij|k}
    Eigen::MatrixXd r_ik, s_ik;     // r_{i|k}, s_{i|k}
    Eigen::VectorXd r_k;            // r_{|k}
    Eigen::MatrixXd ricci;          // Ric_ij
};

double killing_residual(const GeometryPair& pair, std::span<const double> x);

/// t00 + (a^2 - mu b^2) alpha^2 + mu (b^2 alpha^2 - beta^2) - mu s0^2 / (a^2 - mu b^2).
/// Uses the pair's registered limit when the gap falls below 1e-8.
double condition_a_residual(const GeometryPair& pair, double a_const, double mu, std::span<const double> x,
                            const Eigen::VectorXd& y);
double condition_a_residual(const BetaBundle& bb, const GeometryPair& pair, double a_const, double mu,
                            std::span<const double> x, const Eigen::VectorXd& y);

/// Rbb - mu (b^2 alpha^2 - beta^2) with Rbb = R^i_k b_i b^k.
double condition_b_residual(const GeometryPair& pair, double mu, std::span<const double> x,
                            const Eigen::VectorXd& y);

struct EvennessWitness {
    int rank = 0;
    double residual = 0;  // t00 + alpha^2 at the probe direction
};
EvennessWitness evenness_witness(const GeometryPair& pair, std::span<const double> x, const Eigen::VectorXd& y);

/// Residual of s_{ij|k} = -b^m Rm_{kmij} + r_{ik|j} - r_{jk|i}, max over indices.
double ricci_identity_residual(const BetaBundle& bb);

/// Curvature factor Rm_{kmij} used by the identity above.
double identity_curvature(const BetaBundle& bb, int k, int m, int i, int j);

/// Residuals of the Killing relations: s_{0|k}b^k + t_0, s^i_{0|i} - Ric_0,
/// s^i_{|i} + Ric + t^i_i, s_{0|0} + Rbb + t00; maximum absolute value.
double killing_relations_residual(const BetaBundle& bb, const Eigen::VectorXd& y);

}  // namespace betaforge
