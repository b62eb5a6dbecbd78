#include "betaforge/deformation.hpp"

#include <cmath>

#include "betaforge/errors.hpp"

namespace betaforge {

namespace {

double dt(const Jet& j, int k) {
    if (j.is_scalar()) return 0.0;
    return k == 1 ? j.d(0) : j.d(0, 0);
}

Jet b_squared_jet(const JetMatrix& a, const JetVec& b) {
    const JetMatrix ainv = inverse(a);
    return quadratic(ainv, b, b);
}

}  // namespace

// ----------------------------------------------------------------------------
// Profiles
// ----------------------------------------------------------------------------

Jet ScalarProfile::at(double t, int order) const {
    if (!contains(t)) throw DomainError("profile: b^2 outside the profile interval");
    Jet r = fn(Jet::variable(t, 0, 1, order));
    if (r.is_scalar()) r = Jet::constant(r.value(), 1, order);
    return r;
}

ScalarProgram ScalarProfile::as_program() const {
    ScalarProgram p;
    p.dim = 1;
    p.fn = [f = fn](std::span<const Jet> x) { return f(x[0]); };
    p.domain = Domain::box(1, lo, hi);
    return p;
}

DeformationProfile::DeformationProfile(std::string name, Evaluator eval, double lo, double hi)
    : name_(std::move(name)), eval_(std::move(eval)), lo_(lo), hi_(hi) {}

DeformationProfile DeformationProfile::identity() {
    return {"identity", [](const Jet&) { return FactorJets{Jet(0.0), Jet(1.0), Jet(0.0), Jet(1.0)}; }};
}

DeformationProfile DeformationProfile::from_kappa(std::string name, std::function<Jet(const Jet&)> kappa,
                                                  std::function<Jet(const Jet&)> rho,
                                                  std::function<Jet(const Jet&)> nu, double lo, double hi) {
    auto eval = [kappa = std::move(kappa), rho = std::move(rho), nu = std::move(nu)](const Jet& t) {
        FactorJets f;
        f.kappa = kappa(t);
        f.delta = 1.0 - t * f.kappa;
        f.rho = rho(t);
        f.nu = nu(t);
        return f;
    };
    return {std::move(name), std::move(eval), lo, hi};
}

DeformationProfile DeformationProfile::from_delta(std::string name, std::function<Jet(const Jet&)> delta,
                                                  std::function<Jet(const Jet&)> rho,
                                                  std::function<Jet(const Jet&)> nu, double lo, double hi) {
    auto eval = [delta = std::move(delta), rho = std::move(rho), nu = std::move(nu)](const Jet& t) {
        FactorJets f;
        f.delta = delta(t);
        f.kappa = (1.0 - f.delta) / t;
        f.rho = rho(t);
        f.nu = nu(t);
        return f;
    };
    return {std::move(name), std::move(eval), lo, hi};
}

FactorJets DeformationProfile::at(const Jet& t) const {
    const double tv = t.value();
    if (!contains(tv)) throw DomainError("profile '" + name_ + "': b^2 outside the profile interval");
    if (!eval_) return identity().at(t);
    FactorJets f = eval_(t);
    if (!(f.delta.value() > 0.0)) {
        throw SignatureError("profile '" + name_ + "': delta = 1 - b^2 kappa is not positive");
    }
    if (f.nu.value() == 0.0) throw DomainError("profile '" + name_ + "': nu vanishes");
    return f;
}

FactorDerivs DeformationProfile::derivs(double t) const {
    const FactorJets f = at(Jet::variable(t, 0, 1, 2));
    FactorDerivs d;
    d.b2 = t;
    d.kappa = f.kappa.value();
    d.kappa1 = dt(f.kappa, 1);
    d.kappa2 = dt(f.kappa, 2);
    d.delta = f.delta.value();
    d.delta1 = dt(f.delta, 1);
    d.delta2 = dt(f.delta, 2);
    d.rho = f.rho.value();
    d.rho1 = dt(f.rho, 1);
    d.rho2 = dt(f.rho, 2);
    d.nu = f.nu.value();
    d.nu1 = dt(f.nu, 1);
    d.nu2 = dt(f.nu, 2);
    return d;
}

ScalarProfile DeformationProfile::kappa() const {
    return {[p = *this](const Jet& t) { return p.at(t).kappa; }, lo_, hi_};
}
ScalarProfile DeformationProfile::rho() const {
    return {[p = *this](const Jet& t) { return p.at(t).rho; }, lo_, hi_};
}
ScalarProfile DeformationProfile::nu() const {
    return {[p = *this](const Jet& t) { return p.at(t).nu; }, lo_, hi_};
}
ScalarProfile DeformationProfile::delta() const {
    return {[p = *this](const Jet& t) { return p.at(t).delta; }, lo_, hi_};
}

DeformationProfile DeformationProfile::with_nu(std::function<Jet(const Jet&)> nu, std::string name) const {
    auto eval = [base = *this, nu = std::move(nu)](const Jet& t) {
        FactorJets f = base.at(t);
        f.nu = nu(t);
        return f;
    };
    return {std::move(name), std::move(eval), lo_, hi_};
}

// ----------------------------------------------------------------------------
// Application and composition
// ----------------------------------------------------------------------------

GeometryPair apply(const GeometryPair& g, const DeformationProfile& p) {
    const int n = g.dim();
    const Domain base = g.domain();
    const MetricField am = g.metric;
    const OneFormField bf = g.oneform;

    const Domain dom = base.restrict([am, bf, p](std::span<const double> x) {
        const Eigen::VectorXd b = bf.value(x);
        const Eigen::MatrixXd a = am.value(x);
        return p.contains(b.dot(a.ldlt().solve(b)));
    });

    MetricField m;
    m.dim = n;
    m.domain = dom;
    m.name = g.metric.name + "+" + p.name();
    m.eval = [n, am, bf, p](std::span<const Jet> x) {
        const JetMatrix a = am.eval(x);
        const JetVec b = bf.eval(x);
        const FactorJets f = p.at(b_squared_jet(a, b));
        const Jet scale = exp(2.0 * f.rho);
        JetMatrix out(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const Jet v = scale * (a(i, j) - f.kappa * b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)]);
                out(i, j) = v;
                out(j, i) = v;
            }
        return out;
    };

    OneFormField w;
    w.dim = n;
    w.domain = dom;
    w.name = g.oneform.name + "+" + p.name();
    w.eval = [am, bf, p](std::span<const Jet> x) {
        const JetMatrix a = am.eval(x);
        JetVec b = bf.eval(x);
        const FactorJets f = p.at(b_squared_jet(a, b));
        for (auto& c : b) c = f.nu * c;
        return b;
    };

    return make_pair(std::move(m), std::move(w), g.name + "+" + p.name());
}

DeformationProfile compose(const DeformationProfile& outer, const DeformationProfile& inner) {
    auto eval = [outer, inner](const Jet& t) {
        const FactorJets fi = inner.at(t);
        const Jet shrink = exp(-2.0 * fi.rho);
        const Jet tbar = shrink * fi.nu * fi.nu * t / fi.delta;
        if (!outer.contains(tbar.value())) {
            throw DomainError("compose: image of the inner profile leaves the outer interval");
        }
        const FactorJets fo = outer.at(tbar);
        FactorJets f;
        f.kappa = fi.kappa + fo.kappa * fi.nu * fi.nu * shrink;
        f.delta = fi.delta * fo.delta;
        f.rho = fi.rho + fo.rho;
        f.nu = fi.nu * fo.nu;
        return f;
    };
    return {outer.name() + "*" + inner.name(), std::move(eval), inner.lo(), inner.hi()};
}

DeformationProfile killing_transfer_nu(const DeformationProfile& p, double k) {
    if (k == 0.0) throw ParamError("killing_transfer_nu: k must be nonzero");
    auto eval = [p, k](const Jet& t) {
        FactorJets f = p.at(t);
        f.nu = k * f.delta * exp(2.0 * f.rho);
        return f;
    };
    return {p.name() + "+killing", std::move(eval), p.lo(), p.hi()};
}

double killing_transfer_residual(const DeformationProfile& p, double t) {
    const FactorDerivs f = p.derivs(t);
    return f.nu * (f.kappa + t * f.kappa1) / f.delta - 2.0 * f.nu * f.rho1 + f.nu1;
}

FactorDerivs factor_derivs_at(const GeometryPair& g, const DeformationProfile& p, std::span<const double> x) {
    return p.derivs(b_squared(g, x));
}

// ----------------------------------------------------------------------------
// Contractions shared by the predictors
// ----------------------------------------------------------------------------

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Suffix conventions: `_0` contracts with y, `_b` with b, `_dk` is a free
// covariant-derivative index, `_up` marks a raised first index.
struct Contractions {
    DirectionScalars s;
    VectorXd y, yl, b, bu;
    // lower free index k
    VectorXd r_k0, s_k0, r_k, s_k, p_k, q_k, qs_k, t_k, q_k0, q_0k;
    VectorXd r_0dk, r_kd0, s_0dk, s_kd0, r00_dk, rk0_d0, r_dk;
    // upper free index i
    VectorXd r0_up, s0_up, t0_up, r_up, s_up, q_up, t_up, rd0_up, sd0_up, s0d0_up;
    // (i, k)
    MatrixXd r_up_k, t_up_k, rdk_up, sdk_up, skd0_up, s0dk_up, riemann;
};

Contractions contractions(const BetaBundle& bb, const VectorXd& y) {
    Contractions c;
    c.s = bb.contract(y);
    c.y = y;
    c.yl = bb.a * y;
    c.b = bb.b;
    c.bu = bb.bu;
    const MatrixXd& ai = bb.ainv;

    c.r_k0 = bb.r_ij * y;
    c.s_k0 = bb.s_ij * y;
    c.r_k = bb.r_i;
    c.s_k = bb.s_i;
    c.p_k = bb.p_i;
    c.q_k = bb.q_i;
    c.qs_k = bb.qs_i;
    c.t_k = bb.t_i;
    c.q_k0 = bb.q_ij * y;
    c.q_0k = bb.q_ij.transpose() * y;
    c.r_0dk = bb.r_ik.transpose() * y;
    c.r_kd0 = bb.r_ik * y;
    c.s_0dk = bb.s_ik.transpose() * y;
    c.s_kd0 = bb.s_ik * y;
    const MatrixXd r_y = bb.r_ijk.contract(0, y);  // (j, k) -> r_{0j|k}
    c.r00_dk = r_y.transpose() * y;
    const MatrixXd r_dy = bb.r_ijk.contract(2, y);  // (i, j) -> r_{ij|0}
    c.rk0_d0 = r_dy * y;
    c.r_dk = bb.r_k;

    c.r0_up = ai * c.r_k0;
    c.s0_up = ai * c.s_k0;
    c.t0_up = ai * (bb.t_ij * y);
    c.r_up = ai * bb.r_i;
    c.s_up = ai * bb.s_i;
    c.q_up = ai * bb.q_i;
    c.t_up = ai * bb.t_i;
    c.rd0_up = ai * (bb.r_ik * y);
    c.sd0_up = ai * (bb.s_ik * y);
    const MatrixXd s_dy = bb.s_ijk.contract(2, y);  // (m, k) -> s_{mk|0}
    c.s0d0_up = ai * (s_dy * y);

    c.r_up_k = ai * bb.r_ij;
    c.t_up_k = ai * bb.t_ij;
    c.rdk_up = ai * bb.r_ik;
    c.sdk_up = ai * bb.s_ik;
    c.skd0_up = ai * s_dy;
    c.s0dk_up = ai * bb.s_ijk.contract(1, y);  // s_{m0|k}
    c.riemann = bb.curv.directional(y);
    return c;
}

MatrixXd outer(const VectorXd& u, const VectorXd& v) { return u * v.transpose(); }

// Accumulates coefficient * factor pairs in table order.
template <class T>
class TermSum {
public:
    explicit TermSum(const std::vector<NamedCoefficient>& table) : table_(table) {
        for (std::size_t i = 0; i < table_.size(); ++i) index_.emplace_back(table_[i].id);
    }
    double c(const std::string& id) const {
        for (std::size_t i = 0; i < index_.size(); ++i) {
            if (index_[i] == id) return table_[i].value;
        }
        throw Error("predictor: unknown coefficient " + id);
    }
    void add(const std::string& id, const T& factor) {
        used_.push_back({id, c(id)});
        factors_.push_back(factor);
    }
    std::vector<NamedCoefficient> used_;
    std::vector<T> factors_;

private:
    const std::vector<NamedCoefficient>& table_;
    std::vector<std::string> index_;
};

struct Shorthand {
    double B, D, k, k1, k2, r1, r2, W, E;
    explicit Shorthand(const FactorDerivs& f)
        : B(f.b2),
          D(f.delta),
          k(f.kappa),
          k1(f.kappa1),
          k2(f.kappa2),
          r1(f.rho1),
          r2(f.rho2),
          W(f.rho1 * f.rho1 - f.rho2),
          E(std::exp(-2.0 * f.rho) * f.nu * f.nu) {}
};

}  // namespace

// ----------------------------------------------------------------------------
// First-order predictors
// ----------------------------------------------------------------------------

Eigen::MatrixXd predict_rbar(const BetaBundle& bb, const FactorDerivs& f) {
    const double B = f.b2, D = f.delta, k = f.kappa, nu = f.nu;
    const VectorXd rs = bb.r_i + bb.s_i;
    const MatrixXd bb_out = outer(bb.b, bb.b);
    MatrixXd out = (2.0 * f.rho1 * nu / D * bb.r) * (bb.a - k * bb_out) - (f.kappa1 * nu / D * bb.r) * bb_out +
                   (nu / D) * bb.r_ij;
    const double mix = B * f.kappa1 * nu / D - 2.0 * f.rho1 * nu + f.nu1;
    out += mix * (outer(bb.b, rs) + outer(rs, bb.b));
    out += (k * nu / D) * (outer(bb.b, bb.s_i) + outer(bb.s_i, bb.b));
    return out;
}

SbarPrediction predict_sbar(const BetaBundle& bb, const FactorDerivs& f) {
    const double B = f.b2, D = f.delta, nu = f.nu, nu1 = f.nu1;
    const VectorXd rs = bb.r_i + bb.s_i;
    SbarPrediction p;
    p.s_ij = nu * bb.s_ij + nu1 * (outer(bb.b, rs) - outer(rs, bb.b));
    p.s_i = -(std::exp(-2.0 * f.rho) * nu / D) * (nu1 * bb.r * bb.b - B * nu1 * bb.r_i - (nu + B * nu1) * bb.s_i);
    return p;
}

std::vector<NamedCoefficient> tbar00_coefficients(const FactorDerivs& f) {
    const double B = f.b2, D = f.delta, k = f.kappa, nu = f.nu, n1 = f.nu1;
    const double e = std::exp(-2.0 * f.rho);
    return {
        {"c1", -B * e / D * n1 * n1},
        {"c2", -2.0 * e / D * (nu + B * n1) * n1},
        {"c3", -e / D * (k * nu * nu + 2.0 * nu * n1 + B * n1 * n1)},
        {"c4", e * nu * nu},
        {"c5", 2.0 * e / D * n1 * n1},
        {"c6", 2.0 * e / D * (k * nu + n1) * n1},
        {"c7", 2.0 * e * nu * n1},
        {"c8", -k * e / D * n1 * n1},
        {"c9", -e * n1 * n1},
    };
}

double predict_tbar00(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y) {
    const auto table = tbar00_coefficients(f);
    const auto d = bb.contract(y);
    TermSum<double> t(table);
    t.add("c1", d.r0 * d.r0);
    t.add("c2", d.r0 * d.s0);
    t.add("c3", d.s0 * d.s0);
    t.add("c4", d.t00);
    t.add("c5", d.beta * d.r0 * d.r);
    t.add("c6", d.beta * d.s0 * d.r);
    t.add("c7", d.beta * (d.q0 + d.t0));
    t.add("c8", d.beta * d.beta * d.r * d.r);
    t.add("c9", d.beta * d.beta * (d.p - 2.0 * d.q - d.t));
    double v = 0.0;
    for (std::size_t i = 0; i < t.used_.size(); ++i) v += t.used_[i].value * t.factors_[i];
    return v;
}

// ----------------------------------------------------------------------------
// Appendix tables
// ----------------------------------------------------------------------------

std::vector<NamedCoefficient> riemann_coefficients(const FactorDerivs& f) {
    const Shorthand h(f);
    const double B = h.B, D = h.D, k = h.k, k1 = h.k1, k2 = h.k2, r1 = h.r1, W = h.W;
    const double kk = k * k + k1;           // kappa^2 + kappa'
    const double kr = k1 + 2.0 * k * r1;    // kappa' + 2 kappa rho'
    const double mixA = kk * r1 - 2.0 * k * D * W;
    const double mixB = k * k1 + B * k1 * k1 + 2.0 * D * k2;
    const double mixC = B * k1 * k1 + 2.0 * D * k2 - 4.0 * k * D * W;
    const double D2 = D * D;
    return {
        {"c101", -4.0 * k * r1 * r1 / D},
        {"c102", -4.0 * r1 * r1},
        {"c103", 2.0 * k / D * kr * r1},
        {"c104", 2.0 * kr * r1},
        {"c105", -4.0 * k1 * r1 / D},
        {"c106", -4.0 / D * kk * r1},
        {"c107", -4.0 * k * r1},
        {"c108", -2.0 * k * r1 / D},
        {"c109", 4.0 * W},
        {"c1010", -2.0 * r1},
        {"c201", 4.0 * k / D * r1 * r1},
        {"c202", 4.0 * r1 * r1},
        {"c301", 2.0 * k1 * r1 / D},
        {"c302", 2.0 / D * kk * r1},
        {"c303", 2.0 * k * r1},
        {"c304", -2.0 * k / D * kr * r1},
        {"c305", -2.0 * kr * r1},
        {"c4", 2.0 * k * r1 / D},
        {"c501", -4.0 * W},
        {"c502", 2.0 * k1 * r1 / D},
        {"c601", -4.0 * W},
        {"c602", 2.0 / D * kk * r1},
        {"c7", 2.0 * k * r1},
        {"c8", 4.0 * r1},
        {"c9", -2.0 * r1},
        {"c1001", 2.0 / D2 * mixA},
        {"c1002", -2.0 * k * r1 / D},
        {"c1003", -2.0 * k1 * r1 / D},
        {"c1004", 2.0 / D * (k * k + 2.0 * k1) * r1},
        {"c1005", 2.0 / D * kk * r1},
        {"c1006", 2.0 * k * r1 / D},
        {"c1101", -k * k / D},
        {"c1102", mixB / D2},
        {"c1103", (k * k * k + 6.0 * k * k1 - 3.0 * B * k * k * k1 + 2.0 * B * k1 * k1 + 4.0 * D * k2) / D2},
        {"c1104", (k * k * k + 5.0 * k * k1 - 3.0 * B * k * k * k1 + B * k1 * k1 + 2.0 * D * k2) / D2},
        {"c1105", k1 / D},
        {"c1106", kk / D},
        {"c1107", -k / D2 * (mixB + 2.0 * kk * r1 - 4.0 * k * D * W)},
        {"c1108", k / D * kr},
        {"c1109", k * k1 / D},
        {"c1110", k / D * kk},
        {"c1111", -k / D * kr},
        {"c1112", 2.0 * k1 * r1 / D},
        {"c1113", -2.0 / D * (k * k + 2.0 * k1) * r1},
        {"c1114", -2.0 / D * kk * r1},
        {"c12", kk / D2},
        {"c1301", 3.0 * k1 / D},
        {"c1302", 3.0 * kk / D},
        {"c1303", -3.0 * k * k1 / D},
        {"c1401", -kk / D2},
        {"c1402", -mixB / D2},
        {"c1403", -(2.0 * k * k * k + 6.0 * k * k1 - 3.0 * B * k * k * k1 + B * k1 * k1 + 2.0 * D * k2) / D2},
        {"c1404", -2.0 / D2 * mixA},
        {"c1405", k / D2 * (mixB + 2.0 * kk * r1 - 4.0 * k * D * W)},
        {"c1501", -kk / D2},
        {"c1502", (k * k * k - B * k1 * k1 - 2.0 * D * k2) / D2},
        {"c1503", -(k * k * k + 5.0 * k * k1 - 3.0 * B * k * k * k1 + B * k1 * k1 + 2.0 * D * k2) / D2},
        {"c1504", -2.0 / D2 * mixA},
        // Printed as a copy of c1504; direct recomputation gives the c1405 expression.
        {"c1505", k / D2 * (mixB + 2.0 * kk * r1 - 4.0 * k * D * W)},
        {"c16", 2.0 * k * k / D},
        {"c17", -k * k / D},
        {"c18", 2.0 * k * r1 / D},
        {"c19", -k / D * kr},
        {"c20", -k * k1 / D},
        {"c21", -k / D * kk},
        {"c22", -k / D},
        {"c23", -2.0 * k1 / D},
        {"c24", -2.0 / D * kk},
        {"c25", k1 / D},
        {"c26", kk / D},
        {"c2701", -2.0 * k * r1 / D},
        {"c2702", k / D * kr},
        {"c2801", -k / D},
        {"c2802", -2.0 * k1 / D},
        {"c2803", -2.0 / D * kk},
        {"c2804", -2.0 * k * r1 / D},
        {"c2805", k / D * kr},
        {"c29", 2.0 * k * r1 / D},
        {"c3001", k1 / D},
        {"c3002", kk / D},
        {"c3003", -k / D * kr},
        {"c31", k / D},
        {"c32", k1 / D},
        {"c33", kk / D},
        {"c34", 3.0 * k1},
        {"c35", 3.0 * k},
        {"c36", -3.0 * k1},
        {"c3701", -4.0 * W},
        {"c3702", 2.0 * k1 * r1 / D},
        {"c3801", -k1 / D},
        {"c3802", -mixC / D},
        {"c3803", -(k * k1 + mixC) / D},
        {"c3804", -2.0 * k1 * r1 / D},
        {"c39", k1 / D},
        {"c40", -3.0 * k1},
        {"c4101", 4.0 * W},
        {"c4102", mixC / D},
        {"c4201", 4.0 * W},
        {"c4202", (k * k1 + mixC) / D},
        {"c4301", -4.0 * W},
        {"c4302", 2.0 / D * kk * r1},
        {"c4401", -kk / D},
        {"c4402", -(k * k1 + mixC) / D},
        {"c4403", -(k * k * k + 2.0 * k * k1 + mixC) / D},
        {"c4404", -2.0 / D * kk * r1},
        {"c45", kk / D},
        {"c46", -3.0 * k1},
        {"c4701", 4.0 * W},
        {"c4702", (k * k1 + mixC) / D},
        {"c4801", 4.0 * W},
        {"c4802", (k * k * k + 2.0 * k * k1 + mixC) / D},
        {"c49", -k * k},
        {"c50", k * k},
        {"c51", -2.0 * k * r1},
        {"c52", k},
        {"c5301", -2.0 * r1},
        {"c5302", kr},
        {"c54", 2.0 * r1},
        {"c55", -kr},
    };
}

MatrixPrediction predict_riemann(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y) {
    const auto table = riemann_coefficients(f);
    const Contractions c = contractions(bb, y);
    const auto& d = c.s;
    const int n = bb.n;
    const MatrixXd I = MatrixXd::Identity(n, n);
    const double a2 = d.alpha2, be = d.beta, r = d.r;
    const double rs0 = d.r0 + d.s0;
    const double pqt = d.p - 2.0 * d.q - d.t;

    TermSum<MatrixXd> t(table);
    // delta^i_k
    t.add("c101", a2 * r * r * I);
    t.add("c102", a2 * pqt * I);
    t.add("c103", be * be * r * r * I);
    t.add("c104", be * be * pqt * I);
    t.add("c105", be * d.r0 * r * I);
    t.add("c106", be * d.s0 * r * I);
    t.add("c107", be * (d.q0 + d.t0) * I);
    t.add("c108", d.r00 * r * I);
    t.add("c109", rs0 * rs0 * I);
    t.add("c1010", (d.r0_0 + d.s0_0) * I);
    // y^i y_k and y^i (...)_k
    const MatrixXd yy = outer(c.y, c.yl);
    t.add("c201", r * r * yy);
    t.add("c202", pqt * yy);
    const MatrixXd yb = outer(c.y, c.b);
    t.add("c301", d.r0 * r * yb);
    t.add("c302", d.s0 * r * yb);
    t.add("c303", (d.q0 + d.t0) * yb);
    t.add("c304", be * r * r * yb);
    t.add("c305", be * pqt * yb);
    t.add("c4", r * outer(c.y, c.r_k0));
    t.add("c501", rs0 * outer(c.y, c.r_k));
    t.add("c502", be * r * outer(c.y, c.r_k));
    t.add("c601", rs0 * outer(c.y, c.s_k));
    t.add("c602", be * r * outer(c.y, c.s_k));
    t.add("c7", be * outer(c.y, VectorXd(c.q_k + c.t_k)));
    t.add("c8", outer(c.y, VectorXd(c.r_0dk + c.s_0dk)));
    t.add("c9", outer(c.y, VectorXd(c.r_kd0 + c.s_kd0)));
    // b^i y_k
    const MatrixXd by = outer(c.bu, c.yl);
    t.add("c1001", rs0 * r * by);
    t.add("c1002", (d.p0 - d.qs0) * by);
    t.add("c1003", be * d.p * by);
    t.add("c1004", be * d.q * by);
    t.add("c1005", be * d.t * by);
    t.add("c1006", d.r_0 * by);
    // b^i b_k
    const MatrixXd bbk = outer(c.bu, c.b);
    t.add("c1101", d.q00 * bbk);
    t.add("c1102", d.r0 * d.r0 * bbk);
    t.add("c1103", d.r0 * d.s0 * bbk);
    t.add("c1104", d.s0 * d.s0 * bbk);
    t.add("c1105", d.r0_0 * bbk);
    t.add("c1106", d.s0_0 * bbk);
    t.add("c1107", be * rs0 * r * bbk);
    t.add("c1108", be * (d.p0 - d.qs0) * bbk);
    t.add("c1109", be * d.q0 * bbk);
    t.add("c1110", be * d.t0 * bbk);
    t.add("c1111", be * d.r_0 * bbk);
    t.add("c1112", a2 * d.p * bbk);
    t.add("c1113", a2 * d.q * bbk);
    t.add("c1114", a2 * d.t * bbk);
    // b^i times a lower vector
    t.add("c12", rs0 * outer(c.bu, c.r_k0));
    t.add("c1301", d.r0 * outer(c.bu, c.s_k0));
    t.add("c1302", d.s0 * outer(c.bu, c.s_k0));
    t.add("c1303", be * r * outer(c.bu, c.s_k0));
    const MatrixXd br = outer(c.bu, c.r_k);
    t.add("c1401", d.r00 * br);
    t.add("c1402", be * d.r0 * br);
    t.add("c1403", be * d.s0 * br);
    t.add("c1404", a2 * r * br);
    t.add("c1405", be * be * r * br);
    const MatrixXd bs = outer(c.bu, c.s_k);
    t.add("c1501", d.r00 * bs);
    t.add("c1502", be * d.r0 * bs);
    t.add("c1503", be * d.s0 * bs);
    t.add("c1504", a2 * r * bs);
    t.add("c1505", be * be * r * bs);
    t.add("c16", be * outer(c.bu, c.q_k0));
    t.add("c17", be * outer(c.bu, c.q_0k));
    const MatrixXd bpq = outer(c.bu, VectorXd(c.p_k - c.qs_k));
    t.add("c18", a2 * bpq);
    t.add("c19", be * be * bpq);
    t.add("c20", be * be * outer(c.bu, c.q_k));
    t.add("c21", be * be * outer(c.bu, c.t_k));
    t.add("c22", outer(c.bu, VectorXd(c.r00_dk - c.rk0_d0)));
    t.add("c23", be * outer(c.bu, c.r_0dk));
    t.add("c24", be * outer(c.bu, c.s_0dk));
    t.add("c25", be * outer(c.bu, c.r_kd0));
    t.add("c26", be * outer(c.bu, c.s_kd0));
    t.add("c2701", a2 * outer(c.bu, c.r_dk));
    t.add("c2702", be * be * outer(c.bu, c.r_dk));
    // r^i_k
    t.add("c2801", d.r00 * c.r_up_k);
    t.add("c2802", be * d.r0 * c.r_up_k);
    t.add("c2803", be * d.s0 * c.r_up_k);
    t.add("c2804", a2 * r * c.r_up_k);
    t.add("c2805", be * be * r * c.r_up_k);
    // r^i_0
    t.add("c29", r * outer(c.r0_up, c.yl));
    t.add("c3001", d.r0 * outer(c.r0_up, c.b));
    t.add("c3002", d.s0 * outer(c.r0_up, c.b));
    t.add("c3003", be * r * outer(c.r0_up, c.b));
    t.add("c31", outer(c.r0_up, c.r_k0));
    t.add("c32", be * outer(c.r0_up, c.r_k));
    t.add("c33", be * outer(c.r0_up, c.s_k));
    // s^i_0
    t.add("c34", rs0 * outer(c.s0_up, c.b));
    t.add("c35", outer(c.s0_up, c.s_k0));
    t.add("c36", be * outer(c.s0_up, VectorXd(c.r_k + c.s_k)));
    // r^i
    t.add("c3701", rs0 * outer(c.r_up, c.yl));
    t.add("c3702", be * r * outer(c.r_up, c.yl));
    const MatrixXd rb = outer(c.r_up, c.b);
    t.add("c3801", d.r00 * rb);
    t.add("c3802", be * d.r0 * rb);
    t.add("c3803", be * d.s0 * rb);
    t.add("c3804", a2 * r * rb);
    t.add("c39", be * outer(c.r_up, c.r_k0));
    t.add("c40", be * outer(c.r_up, c.s_k0));
    t.add("c4101", a2 * outer(c.r_up, c.r_k));
    t.add("c4102", be * be * outer(c.r_up, c.r_k));
    t.add("c4201", a2 * outer(c.r_up, c.s_k));
    t.add("c4202", be * be * outer(c.r_up, c.s_k));
    // s^i
    t.add("c4301", rs0 * outer(c.s_up, c.yl));
    t.add("c4302", be * r * outer(c.s_up, c.yl));
    const MatrixXd sb = outer(c.s_up, c.b);
    t.add("c4401", d.r00 * sb);
    t.add("c4402", be * d.r0 * sb);
    t.add("c4403", be * d.s0 * sb);
    t.add("c4404", a2 * r * sb);
    t.add("c45", be * outer(c.s_up, c.r_k0));
    t.add("c46", be * outer(c.s_up, c.s_k0));
    t.add("c4701", a2 * outer(c.s_up, c.r_k));
    t.add("c4702", be * be * outer(c.s_up, c.r_k));
    t.add("c4801", a2 * outer(c.s_up, c.s_k));
    t.add("c4802", be * be * outer(c.s_up, c.s_k));
    // remaining
    t.add("c49", be * be * c.t_up_k);
    t.add("c50", be * outer(c.t0_up, c.b));
    t.add("c51", outer(VectorXd(c.q_up + c.t_up), VectorXd(a2 * c.b - be * c.yl)));
    t.add("c52", be * c.skd0_up - 2.0 * be * c.s0dk_up + outer(c.s0d0_up, c.b));
    t.add("c5301", a2 * (c.rdk_up + c.sdk_up));
    t.add("c5302", be * be * (c.rdk_up + c.sdk_up));
    t.add("c54", outer(VectorXd(c.rd0_up + c.sd0_up), c.yl));
    t.add("c55", be * outer(VectorXd(c.rd0_up + c.sd0_up), c.b));

    MatrixPrediction p;
    p.value = c.riemann;
    for (std::size_t i = 0; i < t.used_.size(); ++i) p.value += t.used_[i].value * t.factors_[i];
    p.coefficients = std::move(t.used_);
    p.factors = std::move(t.factors_);
    return p;
}

std::vector<NamedCoefficient> rbb_coefficients(const FactorDerivs& f) {
    const Shorthand h(f);
    const double B = h.B, D = h.D, k = h.k, k1 = h.k1, k2 = h.k2, r1 = h.r1, r2 = h.r2, W = h.W, E = h.E;
    const double D2 = D * D, D3 = D2 * D;
    const double tail = k + B * k1 - 2.0 * D * r1;
    return {
        {"c1", E / D},
        {"c2", -E / D3 * (k + 2.0 * B * k1 - B * B * k * k1 + 2.0 * B * D * k * r1)},
        {"c3", E / D3 * (k + 2.0 * B * k1 + B * B * B * k1 * k1 + 2.0 * B * B * D * k2 + 4.0 * B * D2 * W)},
        {"c4", 2.0 * B * E / D3 *
                   (k * k + 2.0 * B * k * k1 + B * B * k1 * k1 + 2.0 * D * (2.0 * k1 + B * k2) + 4.0 * D2 * W)},
        {"c5", E / D3 *
                   (k * (3.0 - 3.0 * B * k + B * B * k * k) + 2.0 * B * k1 + B * B * B * k1 * k1 +
                    2.0 * B * D * (2.0 * k1 + B * k2) + 4.0 * B * D2 * W)},
        {"c6", -B * k * E / D2},
        {"c7", -2.0 * B * k * E / D2},
        {"c8", B * k * E / D},
        {"c9", -B * k * E / D2},
        {"c10", B * E / D2 * tail},
        {"c11", B * E / D2 * tail},
        {"c12", -2.0 * E / D3 * (B * (k + B * k1) * k1 + 2.0 * B * D * k2 - 2.0 * k * D * r1 + 4.0 * D2 * W)},
        {"c13", -2.0 * E / D3 * ((k + B * k1) * (k + B * k1) + 2.0 * D * (2.0 * k1 + B * k2) + 4.0 * D2 * W)},
        {"c14", 2.0 * k * E / D2},
        {"c15", -2.0 * k * E / D},
        {"c16", -2.0 * E / D2 * (B * k1 - 2.0 * D * r1)},
        {"c17", -2.0 * E / D2 * tail},
        {"c18", -2.0 * E / D3 * ((k + 2.0 * B * k1 - B * B * k * k1) * r1 - 2.0 * D2 * r1 * r1 + 2.0 * D * r2)},
        {"c19", E / D3 *
                    ((k + B * k1) * k1 + 2.0 * D * k2 + 2.0 * (k * k + 2.0 * k1 - B * k * k1) * r1 +
                     4.0 * k * D * r2)},
        {"c20", 2.0 * E / D2 * r1 * (1.0 + B * B * k1 - 2.0 * B * D * r1)},
        {"c21", -E / D2 * (k1 + 2.0 * (k + B * k1) * r1 - 4.0 * D * r1 * r1)},
        {"c22", -4.0 * B * E / D2 * r1 * tail},
        {"c23", 4.0 * E / D2 * r1 * tail},
        {"c24", 2.0 * E / D2 * r1 * (1.0 - 2.0 * B * k - B * B * k1 + 2.0 * B * D * r1)},
        {"c25", -E / D2 * (k * k + k1 - 2.0 * (k + B * k1) * r1 + 4.0 * D * r1 * r1)},
        {"c26", -2.0 * E / D2 * r1},
        {"c27", E / D2 * (k1 + 2.0 * k * r1)},
    };
}

ScalarPrediction predict_rbb(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y) {
    const auto table = rbb_coefficients(f);
    const auto d = bb.contract(y);
    const double a2 = d.alpha2, be = d.beta, r = d.r;
    TermSum<double> t(table);
    t.add("c1", d.rbb);
    t.add("c2", d.r00 * r);
    t.add("c3", d.r0 * d.r0);
    t.add("c4", d.r0 * d.s0);
    t.add("c5", d.s0 * d.s0);
    t.add("c6", d.p00);
    t.add("c7", d.q00);
    t.add("c8", d.t00);
    t.add("c9", d.r00_b);
    t.add("c10", d.r0_0);
    t.add("c11", d.s0_0);
    t.add("c12", be * d.r0 * r);
    t.add("c13", be * d.s0 * r);
    t.add("c14", be * d.q0);
    t.add("c15", be * d.t0);
    t.add("c16", be * d.r0_b);
    t.add("c17", be * d.s0_b);
    t.add("c18", a2 * r * r);
    t.add("c19", be * be * r * r);
    t.add("c20", a2 * d.p);
    t.add("c21", be * be * d.p);
    t.add("c22", a2 * d.q);
    // The printed table repeats alpha^2 q here; beta^2 q is the reading that
    // matches direct recomputation.
    t.add("c23", be * be * d.q);
    t.add("c24", a2 * d.t);
    t.add("c25", be * be * d.t);
    t.add("c26", a2 * d.r_b);
    t.add("c27", be * be * d.r_b);
    ScalarPrediction p;
    for (std::size_t i = 0; i < t.used_.size(); ++i) p.value += t.used_[i].value * t.factors_[i];
    p.coefficients = std::move(t.used_);
    p.factors = std::move(t.factors_);
    return p;
}

std::vector<NamedCoefficient> ricci_coefficients(const FactorDerivs& f, int n) {
    const Shorthand h(f);
    const double B = h.B, D = h.D, k = h.k, k1 = h.k1, k2 = h.k2, r1 = h.r1, r2 = h.r2, W = h.W;
    const double m = n - 2.0;
    const double D2 = D * D;
    const double kb = k + B * k1;  // kappa + b^2 kappa'
    const double kk = k * k + k1;
    const double rr = kb * r1 - 2.0 * m * D * r1 * r1 - 2.0 * D * r2;
    const double c9 = (kb - 2.0 * m * D * r1) / D;
    return {
        {"C1", -k / D},
        {"C2", -(2.0 * D * k1 + k * kb + 2.0 * m * k * D * r1) / D2},
        {"C3", (k * k + 2.0 * k1 + B * B * k1 * k1 + 2.0 * B * D * k2 + 4.0 * m * D2 * W) / D2},
        {"C4", 2.0 * (k * k + 4.0 * k1 - 2.0 * B * k * k1 + B * B * k1 * k1 + 2.0 * B * D * k2 + 4.0 * m * D2 * W) / D2},
        {"C5", -(2.0 * B * k * k * k - 3.0 * k * k - 6.0 * k1 + 4.0 * B * k * k1 - B * B * k1 * k1 -
                 2.0 * B * D * k2 - 4.0 * m * D2 * W) /
                   D2},
        {"C6", -2.0 * k / D},
        {"C7", -2.0 * k},
        {"C8", -k / D},
        {"C9", c9},
        {"C10", c9},
        {"C11", -2.0 * k1 / D},
        {"C12", -2.0 * kk / D},
        {"C13", -2.0 / D2 * (kb * k1 + 2.0 * D * k2 + 2.0 * m * D * k1 * r1)},
        {"C14", -2.0 / D2 *
                    (5.0 * k * D * k1 + k * k * kb + B * kk * k1 + 2.0 * D * k2 + 2.0 * m * D * kk * r1)},
        {"C15", 2.0 * k1 / D},
        {"C16", -2.0 * kk / D},
        {"C17", 2.0 / D * (k * k - 3.0 * D * k1 - 2.0 * m * k * D * r1)},
        {"C18", -6.0 * k1 - 4.0 * m * k * r1},
        {"C19", -2.0 * k},
        {"C20", -2.0 * k1 / D},
        {"C21", -2.0 * kk / D},
        {"C22", -2.0 * k / D * r1},
        {"C23", k / D * (k1 + 2.0 * k * r1)},
        {"C24", -2.0 / D2 *
                    (2.0 * D * k1 * r1 + k * kb * r1 + 2.0 * m * k * D * r1 * r1 + 2.0 * k * D * r2)},
        {"C25", k / D2 *
                    (kb * k1 + 2.0 * D * k2 + 2.0 * (n - 1.0) * D * k1 * r1 + 4.0 * m * k * D * r1 * r1 +
                     2.0 * kk * r1 + 4.0 * k * D * r2)},
        {"C26", -k * k},
        {"C27", 2.0 / D * rr},
        {"C28", -1.0 / D *
                    ((k - B * k1) * k1 - 2.0 * D * k2 + 2.0 * k * kb * r1 - 2.0 * m * D * k1 * r1 -
                     4.0 * m * k * D * r1 * r1 - 4.0 * k * D * r2)},
        {"C29", -4.0 / D * rr},
        {"C30", -2.0 / D *
                    (kb * k1 + 2.0 * D * k2 - 2.0 * k * kb * r1 + 2.0 * m * D * k1 * r1 +
                     4.0 * m * k * D * r1 * r1 + 4.0 * k * D * r2)},
        {"C31", -2.0 / D * rr},
        {"C32", -1.0 / D *
                    (2.0 * k * k * k + (kb + 2.0 * k) * k1 + 2.0 * D * k2 - 2.0 * k * kb * r1 + 2.0 * m * D * k1 * r1 +
                     4.0 * m * k * D * r1 * r1 + 4.0 * k * D * r2)},
        {"C33", -2.0 * r1},
        {"C34", k1 + 2.0 * k * r1},
        {"C35", -2.0 * r1},
        {"C36", k1 + 2.0 * k * r1},
        {"C37", -2.0 * k / D * r1},
        {"C38", k / D * (k1 + 2.0 * k * r1)},
    };
}

ScalarPrediction predict_ricoo(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y) {
    const auto table = ricci_coefficients(f, bb.n);
    const auto d = bb.contract(y);
    const double a2 = d.alpha2, be = d.beta, r = d.r, tr = d.r_trace;
    TermSum<double> t(table);
    t.add("C1", d.r00 * tr);
    t.add("C2", d.r00 * r);
    t.add("C3", d.r0 * d.r0);
    t.add("C4", d.r0 * d.s0);
    t.add("C5", d.s0 * d.s0);
    t.add("C6", d.q00);
    t.add("C7", d.t00);
    t.add("C8", d.r00_b);
    t.add("C9", d.r0_0);
    t.add("C10", d.s0_0);
    t.add("C11", be * d.r0 * tr);
    t.add("C12", be * d.s0 * tr);
    t.add("C13", be * d.r0 * r);
    t.add("C14", be * d.s0 * r);
    t.add("C15", be * d.p0);
    t.add("C16", be * d.qs0);
    t.add("C17", be * d.q0);
    t.add("C18", be * d.t0);
    t.add("C19", be * d.s_i0_i);
    t.add("C20", be * d.r0_b);
    t.add("C21", be * d.s0_b);
    t.add("C22", a2 * tr * r);
    t.add("C23", be * be * tr * r);
    t.add("C24", a2 * r * r);
    t.add("C25", be * be * r * r);
    t.add("C26", be * be * d.t_trace);
    t.add("C27", a2 * d.p);
    t.add("C28", be * be * d.p);
    t.add("C29", a2 * d.q);
    t.add("C30", be * be * d.q);
    t.add("C31", a2 * d.t);
    t.add("C32", be * be * d.t);
    t.add("C33", a2 * d.r_trace_div);
    t.add("C34", be * be * d.r_trace_div);
    t.add("C35", a2 * d.s_trace_div);
    t.add("C36", be * be * d.s_trace_div);
    t.add("C37", a2 * d.r_b);
    t.add("C38", be * be * d.r_b);
    ScalarPrediction p;
    p.value = d.ric00;
    for (std::size_t i = 0; i < t.used_.size(); ++i) p.value += t.used_[i].value * t.factors_[i];
    p.coefficients = std::move(t.used_);
    p.factors = std::move(t.factors_);
    return p;
}

std::vector<NamedCoefficient> ricci_killing_coefficients(const FactorDerivs& f, int n) {
    const double B = f.b2, D = f.delta, D1 = f.delta1, D2 = f.delta2;
    const double P = 1.0 + 2.0 * B * f.rho1;    // 1 + 2 b^2 rho'
    const double P1 = 2.0 * f.rho1 + 2.0 * B * f.rho2;
    const double m = n - 2.0;
    const double B2 = B * B, B3 = B2 * B;
    return {
        {"C1", -1.0 / B + P / B},
        {"C2", n / B2 - D1 / (B * D) - (2.0 * (n - 1.0) * D - B * D1) * P / (B2 * D) + m * P * P / B2 +
                   2.0 * P1 / B},
        {"C3", -(D - 1.0 - B * D1) / B2},
        {"C4", -(D * D - D - B * D1) / B2},
        {"C5", (D - 1.0) * (2.0 * D + n) / B3 - ((n + 3.0) * D - 1.0) * D1 / (B2 * D) - D1 * D1 / (B * D) +
                   2.0 * D2 / B - m * (D - 1.0 - B * D1) * P / B3},
        {"C6", -n / B2 + 2.0 * D / B2 - 2.0 * D1 / (B * D) + D1 * D1 / (D * D) - 2.0 * D2 / D + m * P * P / B2 -
                   2.0 * m * P1 / B},
        {"C7", 2.0 * (D - 1.0) / B},
        {"C8", -2.0 * n * (D - 1.0) / B2 + 2.0 * (3.0 * D - 1.0) * D1 / (B * D) + 2.0 * m * (D - 1.0) * P / B2},
        {"C9", m / B - D1 / D - m * P / B},
        {"C10", 2.0 * (D - 1.0) / B},
    };
}

ScalarPrediction predict_ricoo_killing(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y,
                                       double killing_tol) {
    if (bb.r_ij.cwiseAbs().maxCoeff() > killing_tol) {
        throw NotKillingError("Ricci prediction for Killing forms: r_ij does not vanish");
    }
    const auto table = ricci_killing_coefficients(f, bb.n);
    const auto d = bb.contract(y);
    const double a2 = d.alpha2, be = d.beta;
    const double quad = a2 - f.kappa * be * be;
    TermSum<double> t(table);
    t.add("C1", (d.ric + d.t_trace) * quad);
    t.add("C2", d.t * quad);
    t.add("C3", d.ric * be * be);
    t.add("C4", d.t_trace * be * be);
    t.add("C5", d.t * be * be);
    t.add("C6", d.s0 * d.s0);
    t.add("C7", d.t00);
    t.add("C8", be * d.t0);
    t.add("C9", d.s0_0);
    t.add("C10", be * d.ric0);
    ScalarPrediction p;
    p.value = d.ric00;
    for (std::size_t i = 0; i < t.used_.size(); ++i) p.value += t.used_[i].value * t.factors_[i];
    p.coefficients = std::move(t.used_);
    p.factors = std::move(t.factors_);
    return p;
}

}  // namespace betaforge
