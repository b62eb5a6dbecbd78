#include "betaforge/fields.hpp"

#include <cmath>
#include <utility>

#include "betaforge/errors.hpp"

namespace betaforge {

Eigen::MatrixXd JetMatrix::values() const {
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).value();
    return m;
}

JetMatrix inverse(const JetMatrix& m) {
    const int n = m.size();
    JetMatrix a = m;
    JetMatrix inv(n);
    for (int i = 0; i < n; ++i) inv(i, i) = Jet(1.0);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col).value()) > std::abs(a(piv, col).value())) piv = r;
        }
        if (a(piv, col).value() == 0.0) throw PositivityError("inverse: singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        const Jet p = recip(a(col, col));
        for (int j = 0; j < n; ++j) {
            a(col, j) = a(col, j) * p;
            inv(col, j) = inv(col, j) * p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const Jet f = a(r, col);
            if (f.is_scalar() && f.value() == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

Jet quadratic(const JetMatrix& m, const JetVec& u, const JetVec& v) {
    Jet acc(0.0);
    const int n = m.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc += m(i, j) * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
    return acc;
}

JetVec matvec(const JetMatrix& m, const JetVec& v) {
    const int n = m.size();
    JetVec out(static_cast<std::size_t>(n), Jet(0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(i)] += m(i, j) * v[static_cast<std::size_t>(j)];
    return out;
}

Eigen::VectorXd values(const JetVec& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i].value();
    return out;
}

JetMatrix MetricField::at(std::span<const double> x, int order) const {
    if (static_cast<int>(x.size()) != dim) throw DimensionError("metric: point has wrong dimension");
    if (order < 0 || order > kMaxJetOrder) throw OrderError("metric: order must be in [0, 3]");
    if (!domain.contains(x)) throw DomainError("metric: point outside domain of " + name);
    JetMatrix m = eval(seed(x, order));
    if (m.size() != dim) throw DimensionError("metric: component matrix has wrong size");
    Eigen::LLT<Eigen::MatrixXd> llt(m.values());
    if (llt.info() != Eigen::Success) throw PositivityError("metric: not positive definite at sample");
    return m;
}

Eigen::MatrixXd MetricField::value(std::span<const double> x) const { return at(x, 0).values(); }

JetVec OneFormField::at(std::span<const double> x, int order) const {
    if (static_cast<int>(x.size()) != dim) throw DimensionError("one-form: point has wrong dimension");
    if (order < 0 || order > kMaxJetOrder) throw OrderError("one-form: order must be in [0, 3]");
    if (!domain.contains(x)) throw DomainError("one-form: point outside domain of " + name);
    JetVec b = eval(seed(x, order));
    if (static_cast<int>(b.size()) != dim) throw DimensionError("one-form: wrong number of components");
    return b;
}

Eigen::VectorXd OneFormField::value(std::span<const double> x) const { return values(at(x, 0)); }

GeometryPair make_pair(MetricField metric, OneFormField oneform, std::string name) {
    if (metric.dim != oneform.dim) throw DimensionError("pair: metric and one-form dimensions differ");
    GeometryPair p;
    p.metric = std::move(metric);
    p.oneform = std::move(oneform);
    p.name = std::move(name);
    return p;
}

Eigen::VectorXd raise_index(const MetricField& g, std::span<const double> x, const Eigen::VectorXd& w) {
    return g.value(x).ldlt().solve(w);
}

Eigen::VectorXd lower_index(const MetricField& g, std::span<const double> x, const Eigen::VectorXd& v) {
    return g.value(x) * v;
}

double b_squared(const GeometryPair& p, std::span<const double> x) {
    const Eigen::VectorXd b = p.oneform.value(x);
    return b.dot(raise_index(p.metric, x, b));
}

MetricField metric_from_components(int dim, std::vector<ScalarProgram> upper, Domain domain, std::string name) {
    if (static_cast<int>(upper.size()) != dim * (dim + 1) / 2) {
        throw DimensionError("metric: need n(n+1)/2 component programs");
    }
    MetricField m;
    m.dim = dim;
    m.domain = std::move(domain);
    m.name = std::move(name);
    m.eval = [dim, upper = std::move(upper)](std::span<const Jet> x) {
        JetMatrix a(dim);
        std::size_t k = 0;
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                a(i, j) = upper[k++].fn(x);
                a(j, i) = a(i, j);
            }
        return a;
    };
    return m;
}

}  // namespace betaforge
