#include "betaforge/beta_tensors.hpp"

#include <cmath>

#include "betaforge/errors.hpp"

namespace betaforge {

Eigen::MatrixXd Tensor3::contract(int slot, const Eigen::VectorXd& v) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) {
                const double t = (*this)(i, j, k);
                switch (slot) {
                    case 0: out(j, k) += t * v(i); break;
                    case 1: out(i, k) += t * v(j); break;
                    default: out(i, j) += t * v(k); break;
                }
            }
    return out;
}

namespace {

std::size_t at3(int n, int i, int j, int k) { return static_cast<std::size_t>((i * n + j) * n + k); }

}  // namespace

BetaBundle::BetaBundle(const GeometryPair& pair, std::span<const double> x)
    : BetaBundle(pair.metric.at(x, 2), pair.oneform.at(x, 2)) {}

BetaBundle::BetaBundle(const JetMatrix& aj, const JetVec& bj) : n(aj.size()), curv(aj) {
    const auto G = christoffel_jets(aj);
    const auto un = static_cast<std::size_t>(n);

    a = curv.metric();
    ainv = curv.inverse_metric();
    b = values(bj);
    bu = ainv * b;
    b2 = b.dot(bu);
    ricci = curv.ricci();

    JetMatrix a1(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a1(i, j) = aj(i, j).truncated(1);
    const JetMatrix ainv1 = inverse(a1);

    // b_{i|j} as first-order jets
    JetMatrix bcov(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Jet v = bj[static_cast<std::size_t>(i)].derivative(j);
            for (int m = 0; m < n; ++m) v -= G[at3(n, m, i, j)] * bj[static_cast<std::size_t>(m)];
            bcov(i, j) = v.truncated(1);
        }
    JetMatrix rj(n), sj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            rj(i, j) = 0.5 * (bcov(i, j) + bcov(j, i));
            sj(i, j) = 0.5 * (bcov(i, j) - bcov(j, i));
        }
    JetVec b1(un);
    for (std::size_t i = 0; i < un; ++i) b1[i] = bj[i].truncated(1);
    const JetVec bu1 = matvec(ainv1, b1);
    JetVec rij(un, Jet(0.0)), sij(un, Jet(0.0));
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) {
            rij[static_cast<std::size_t>(i)] += bu1[static_cast<std::size_t>(m)] * rj(m, i);
            sij[static_cast<std::size_t>(i)] += bu1[static_cast<std::size_t>(m)] * sj(m, i);
        }
    Jet rs(0.0);
    for (std::size_t i = 0; i < un; ++i) rs += rij[i] * bu1[i];

    bij = bcov.values();
    r_ij = rj.values();
    s_ij = sj.values();
    r_i = values(rij);
    s_i = values(sij);
    r = rs.value();

    const Eigen::MatrixXd r_up = ainv * r_ij;  // r^m_j
    const Eigen::MatrixXd s_up = ainv * s_ij;  // s^m_j
    p_ij = r_ij * r_up;
    q_ij = r_ij * s_up;
    t_ij = s_ij * s_up;
    p_i = p_ij.transpose() * bu;
    q_i = q_ij.transpose() * bu;
    qs_i = q_ij * bu;
    t_i = t_ij.transpose() * bu;
    p = p_i.dot(bu);
    q = q_i.dot(bu);
    t = t_i.dot(bu);
    t_trace = (ainv * t_ij).trace();
    r_trace = (ainv * r_ij).trace();

    auto gam = [&](int i, int j, int k) { return G[at3(n, i, j, k)].value(); };
    r_ijk = Tensor3(n);
    s_ijk = Tensor3(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double vr = rj(i, j).is_scalar() ? 0.0 : rj(i, j).d(k);
                double vs = sj(i, j).is_scalar() ? 0.0 : sj(i, j).d(k);
                for (int m = 0; m < n; ++m) {
                    vr -= gam(m, i, k) * r_ij(m, j) + gam(m, j, k) * r_ij(i, m);
                    vs -= gam(m, i, k) * s_ij(m, j) + gam(m, j, k) * s_ij(i, m);
                }
                r_ijk(i, j, k) = vr;
                s_ijk(i, j, k) = vs;
            }
    r_ik = Eigen::MatrixXd::Zero(n, n);
    s_ik = Eigen::MatrixXd::Zero(n, n);
    r_k = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double vr = rij[static_cast<std::size_t>(i)].is_scalar() ? 0.0 : rij[static_cast<std::size_t>(i)].d(k);
            double vs = sij[static_cast<std::size_t>(i)].is_scalar() ? 0.0 : sij[static_cast<std::size_t>(i)].d(k);
            for (int m = 0; m < n; ++m) {
                vr -= gam(m, i, k) * r_i(m);
                vs -= gam(m, i, k) * s_i(m);
            }
            r_ik(i, k) = vr;
            s_ik(i, k) = vs;
        }
    for (int k = 0; k < n; ++k) r_k(k) = rs.is_scalar() ? 0.0 : rs.d(k);
}

DirectionScalars BetaBundle::contract(const Eigen::VectorXd& y) const {
    DirectionScalars d;
    d.alpha2 = y.dot(a * y);
    d.beta = b.dot(y);
    d.r00 = y.dot(r_ij * y);
    d.r0 = r_i.dot(y);
    d.s0 = s_i.dot(y);
    d.r = r;
    d.p00 = y.dot(p_ij * y);
    d.q00 = y.dot(q_ij * y);
    d.t00 = y.dot(t_ij * y);
    d.p0 = p_i.dot(y);
    d.q0 = q_i.dot(y);
    d.qs0 = qs_i.dot(y);
    d.t0 = t_i.dot(y);
    d.p = p;
    d.q = q;
    d.t = t;
    d.t_trace = t_trace;
    d.r_trace = r_trace;
    d.r0_0 = y.dot(r_ik * y);
    d.s0_0 = y.dot(s_ik * y);
    d.r_0 = r_k.dot(y);
    d.r00_b = y.dot(r_ijk.contract(2, bu) * y);
    d.r0_b = y.dot(r_ik * bu);
    d.s0_b = y.dot(s_ik * bu);
    d.r_b = r_k.dot(bu);
    d.r_trace_div = (ainv * r_ik).trace();
    d.s_trace_div = (ainv * s_ik).trace();
    // s^i_{0|i} = a^{im} s_{mj|i} y^j
    const Eigen::MatrixXd sy = s_ijk.contract(1, y);  // (m, i) -> s_{m0|i}
    d.s_i0_i = (ainv * sy).trace();
    d.ric00 = y.dot(ricci * y);
    d.ric0 = y.dot(ricci * bu);
    d.ric = bu.dot(ricci * bu);
    d.rbb = b.dot(curv.directional(y) * bu);
    return d;
}

double killing_residual(const GeometryPair& pair, std::span<const double> x) {
    const BetaBundle bb(pair, x);
    return bb.r_ij.cwiseAbs().maxCoeff();
}

double condition_a_residual(const BetaBundle& bb, const GeometryPair& pair, double a_const, double mu,
                            std::span<const double> x, const Eigen::VectorXd& y) {
    const auto d = bb.contract(y);
    const double gap = a_const * a_const - mu * bb.b2;
    double last = 0.0;
    if (mu != 0.0) {
        if (std::abs(gap) < 1e-8) {
            if (!pair.s0sq_over_gap) {
                throw LimitUnavailableError("condition A: gap a^2 - mu b^2 vanishes and no limit is registered");
            }
            last = mu * (*pair.s0sq_over_gap)(x, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
        } else {
            last = mu * d.s0 * d.s0 / gap;
        }
    }
    return d.t00 + gap * d.alpha2 + mu * (bb.b2 * d.alpha2 - d.beta * d.beta) - last;
}

double condition_a_residual(const GeometryPair& pair, double a_const, double mu, std::span<const double> x,
                            const Eigen::VectorXd& y) {
    const BetaBundle bb(pair, x);
    return condition_a_residual(bb, pair, a_const, mu, x, y);
}

double condition_b_residual(const GeometryPair& pair, double mu, std::span<const double> x,
                            const Eigen::VectorXd& y) {
    const BetaBundle bb(pair, x);
    const auto d = bb.contract(y);
    return d.rbb - mu * (bb.b2 * d.alpha2 - d.beta * d.beta);
}

EvennessWitness evenness_witness(const GeometryPair& pair, std::span<const double> x, const Eigen::VectorXd& y) {
    const BetaBundle bb(pair, x);
    EvennessWitness w;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bb.s_ij);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > 1e-9) ++w.rank;
    }
    const auto d = bb.contract(y);
    w.residual = d.t00 + d.alpha2;
    return w;
}

double identity_curvature(const BetaBundle& bb, int k, int m, int i, int j) {
    return bb.curv.riemann_lower(m, k, i, j);
}

double ricci_identity_residual(const BetaBundle& bb) {
    const int n = bb.n;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double pred = bb.r_ijk(i, k, j) - bb.r_ijk(j, k, i);
                for (int m = 0; m < n; ++m) pred -= bb.bu(m) * identity_curvature(bb, k, m, i, j);
                worst = std::max(worst, std::abs(bb.s_ijk(i, j, k) - pred));
            }
    return worst;
}

double killing_relations_residual(const BetaBundle& bb, const Eigen::VectorXd& y) {
    const auto d = bb.contract(y);
    const double e1 = d.s0_b + d.t0;
    const double e2 = d.s_i0_i - d.ric0;
    const double e3 = d.s_trace_div + d.ric + d.t_trace;
    const double e4 = d.s0_0 + d.rbb + d.t00;
    return std::max({std::abs(e1), std::abs(e2), std::abs(e3), std::abs(e4)});
}

}  // namespace betaforge
