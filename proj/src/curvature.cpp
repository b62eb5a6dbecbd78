#include "betaforge/curvature.hpp"

#include <cmath>

#include "betaforge/errors.hpp"

namespace betaforge {

std::vector<Jet> christoffel_jets(const JetMatrix& a) {
    const int n = a.size();
    const auto un = static_cast<std::size_t>(n);
    // d_k a_ij, one order lower
    std::vector<Jet> da(un * un * un);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) da[(static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)) * un + static_cast<std::size_t>(k)] = a(i, j).derivative(k);
    auto D = [&](int i, int j, int k) -> const Jet& {
        return da[(static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)) * un + static_cast<std::size_t>(k)];
    };
    JetMatrix lower(n);
    int order = kMaxJetOrder;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!a(i, j).is_scalar()) order = std::min(order, a(i, j).order() - 1);
    if (order < 0) throw OrderError("christoffel: metric jets must have order >= 1");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lower(i, j) = a(i, j).truncated(order);
    const JetMatrix ainv = inverse(lower);
    std::vector<Jet> g(un * un * un, Jet(0.0));
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            JetVec first(un);
            for (int m = 0; m < n; ++m) first[static_cast<std::size_t>(m)] = 0.5 * (D(m, k, j) + D(m, j, k) - D(j, k, m));
            for (int i = 0; i < n; ++i) {
                Jet acc(0.0);
                for (int m = 0; m < n; ++m) acc += ainv(i, m) * first[static_cast<std::size_t>(m)];
                g[(static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)) * un + static_cast<std::size_t>(k)] = acc;
                g[(static_cast<std::size_t>(i) * un + static_cast<std::size_t>(k)) * un + static_cast<std::size_t>(j)] = acc;
            }
        }
    return g;
}

CurvatureBundle::CurvatureBundle(const MetricField& g, std::span<const double> x) { build(g.at(x, 2)); }

CurvatureBundle::CurvatureBundle(const JetMatrix& a) { build(a); }

void CurvatureBundle::build(const JetMatrix& a) {
    n_ = a.size();
    a_ = a.values();
    ainv_ = a_.inverse();
    const auto G = christoffel_jets(a);
    const auto un = static_cast<std::size_t>(n_);
    gamma_.resize(un * un * un);
    std::vector<double> dg(un * un * un * un, 0.0);  // d_l Gamma^i_{jk}
    for (std::size_t q = 0; q < G.size(); ++q) {
        gamma_[q] = G[q].value();
        if (!G[q].is_scalar()) {
            if (G[q].order() < 1) throw OrderError("curvature: metric jets must have order >= 2");
            for (int l = 0; l < n_; ++l) dg[q * un + static_cast<std::size_t>(l)] = G[q].d(l);
        }
    }
    auto dG = [&](int i, int j, int k, int l) { return dg[idx3(i, j, k) * un + static_cast<std::size_t>(l)]; };
    riem_.assign(un * un * un * un, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k)
                for (int l = 0; l < n_; ++l) {
                    if (k == l) continue;
                    double v = dG(i, l, j, k) - dG(i, k, j, l);
                    for (int m = 0; m < n_; ++m) {
                        v += gamma(i, k, m) * gamma(m, l, j) - gamma(i, l, m) * gamma(m, k, j);
                    }
                    riem_[idx4(i, j, k, l)] = v;
                }
    low_.assign(riem_.size(), 0.0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k)
                for (int l = 0; l < n_; ++l) {
                    double v = 0.0;
                    for (int m = 0; m < n_; ++m) v += a_(i, m) * riem_[idx4(m, j, k, l)];
                    low_[idx4(i, j, k, l)] = v;
                }
    ric_ = Eigen::MatrixXd::Zero(n_, n_);
    for (int j = 0; j < n_; ++j)
        for (int l = 0; l < n_; ++l)
            for (int i = 0; i < n_; ++i) ric_(j, l) += riem_[idx4(i, j, i, l)];
}

Eigen::MatrixXd CurvatureBundle::ricci_from_trace() const {
    const std::vector<double> origin(static_cast<std::size_t>(n_), 0.0);
    const auto y = seed(origin, 2);
    Jet trace(0.0);
    for (int k = 0; k < n_; ++k)
        for (int j = 0; j < n_; ++j)
            for (int l = 0; l < n_; ++l) {
                const double c = riem_[idx4(k, j, k, l)];
                if (c != 0.0) trace += c * y[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(l)];
            }
    Eigen::MatrixXd out(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) out(i, j) = trace.is_scalar() ? 0.0 : 0.5 * trace.d(i, j);
    return out;
}

Eigen::MatrixXd CurvatureBundle::directional(const Eigen::VectorXd& y) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            double v = 0.0;
            for (int j = 0; j < n_; ++j) {
                if (y(j) == 0.0) continue;
                for (int l = 0; l < n_; ++l) v += riem_[idx4(i, j, k, l)] * y(j) * y(l);
            }
            out(i, k) = v;
        }
    return out;
}

double CurvatureBundle::sectional(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    const double uu = u.dot(a_ * u), vv = v.dot(a_ * v), uv = u.dot(a_ * v);
    const double gram = uu * vv - uv * uv;
    if (!(gram > 1e-12 * uu * vv)) throw DegeneratePlaneError("sectional: vectors span a degenerate plane");
    const double num = (a_ * v).dot(directional(u) * v);
    return num / gram;
}

double CurvatureBundle::scalar() const { return (ainv_ * ric_).trace(); }

double sectional_curvature(const MetricField& g, std::span<const double> x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) {
    return CurvatureBundle(g, x).sectional(u, v);
}

}  // namespace betaforge
