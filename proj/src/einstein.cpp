#include "betaforge/einstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "betaforge/errors.hpp"

namespace betaforge {

// ----------------------------------------------------------------------------
// Coefficient systems
// ----------------------------------------------------------------------------

void ODEPoint::validate() const {
    if (!(delta > 0.0)) throw ParamError("ode point: delta must be positive");
    if (n < 3) throw ParamError("ode point: n must be at least 3");
    if (a == 0.0) throw ParamError("ode point: a must be non-zero");
    if (!(b2 > 0.0)) throw ParamError("ode point: b^2 must be positive");
}

ODEPoint ODEPoint::from_profile(const DeformationProfile& p, double b2, int n, double mu, double mubar, double a) {
    const FactorDerivs f = p.derivs(b2);
    ODEPoint pt;
    pt.b2 = b2;
    pt.delta = f.delta;
    pt.delta1 = f.delta1;
    pt.delta2 = f.delta2;
    pt.rho = f.rho;
    pt.rho1 = f.rho1;
    pt.rho2 = f.rho2;
    pt.n = n;
    pt.mu = mu;
    pt.mubar = mubar;
    pt.a = a;
    return pt;
}

std::array<double, 6> coeffs_E(const ODEPoint& pt, double t_trace, double t) {
    pt.validate();
    const double B = pt.b2, D = pt.delta, D1 = pt.delta1, D2 = pt.delta2;
    const double r1 = pt.rho1, r2 = pt.rho2, n = pt.n;
    const double P = 1.0 + 2.0 * B * r1;
    const double e2r = std::exp(2.0 * pt.rho);
    const double B2 = B * B;
    std::array<double, 6> e{};
    e[0] = 2.0 * r1 * t_trace + 2.0 * (D1 / D * r1 + 2.0 * (n - 2) * r1 * r1 + 2.0 * r2) * t +
           (n - 1) * pt.mu * P - (n - 1) * pt.mubar * e2r;
    e[1] = -(D * D - 1.0 - B * D1 - (D - 1.0) * P) / B2 * t_trace +
           (2.0 * D * (D * D - 1.0) - B * (5.0 * D - 1.0) * D1 - B2 * D1 * D1 + 2.0 * B2 * D * D2 -
            2.0 * (n - 2) * B * D * (D - 1.0) * r1 + 2.0 * B2 * ((n - 1) * D - 1.0) * D1 * r1 +
            4.0 * (n - 2) * B2 * D * (D - 1.0) * r1 * r1 + 4.0 * B2 * D * (D - 1.0) * r2) /
               (B2 * B * D) * t +
           (n - 1) / B * pt.mu * (B * D1 + (D - 1.0) * P) - (n - 1) / B * pt.mubar * (D - 1.0) * e2r;
    e[2] = 2.0 * (D - 1.0) / B2 - 2.0 * D1 / (B * D) + D1 * D1 / (D * D) - 2.0 * D2 / D +
           4.0 * (n - 2) * (r1 * r1 - r2);
    e[3] = 2.0 * (D - 1.0) / B;
    e[4] = -4.0 * (D - 1.0) / B2 + 2.0 * (3.0 * D - 1.0) * D1 / (B * D) + 4.0 * (n - 2) * (D - 1.0) * r1 / B;
    e[5] = -D1 / D - 2.0 * (n - 2) * r1;
    return e;
}

namespace {

struct Shared {
    double B, D, D1, D2, n, mu, mubar, a2, g, P, P1, e2r;
};

Shared shared_terms(const ODEPoint& pt) {
    pt.validate();
    Shared s{};
    s.B = pt.b2;
    s.D = pt.delta;
    s.D1 = pt.delta1;
    s.D2 = pt.delta2;
    s.n = pt.n;
    s.mu = pt.mu;
    s.mubar = pt.mubar;
    s.a2 = pt.a * pt.a;
    s.g = s.a2 - pt.mu * pt.b2;
    s.P = 1.0 + 2.0 * pt.b2 * pt.rho1;
    s.P1 = 2.0 * pt.rho1 + 2.0 * pt.b2 * pt.rho2;
    s.e2r = std::exp(2.0 * pt.rho);
    return s;
}

double y_coefficient(const Shared& s) {
    const double B = s.B, D = s.D, D1 = s.D1, n = s.n, g = s.g, P = s.P;
    const double num = s.a2 * D * (1.0 - D) * (n + (n - 2) * D) + (2.0 * s.a2 - 3.0 * s.mu * B) * B * D * D1 -
                       g * B * B * D1 * D1 + 2.0 * g * B * B * D * s.D2 + s.mu * B * D * (1.0 - D) * P -
                       g * B * (1.0 - (n - 1) * D) * D1 * P - (n - 2) * g * D * (1.0 - D) * P * P -
                       2.0 * g * B * D * (1.0 - D) * s.P1 - (n - 1) * s.mubar * B * D * (1.0 - D) * s.e2r;
    return -num / (B * B * D);
}

void require_gap(const Shared& s) {
    const double scale = std::max(s.a2, std::abs(s.mu * s.B));
    if (std::abs(s.g) <= 1e-10 * scale) throw LimitError("Z: a^2 - mu b^2 vanishes at this b^2");
}

}  // namespace

std::array<double, 4> coeffs_E_reduced(const ODEPoint& pt) {
    const Shared s = shared_terms(pt);
    require_gap(s);
    const double B = s.B, D = s.D, D1 = s.D1, n = s.n, g = s.g, P = s.P;
    std::array<double, 4> e{};
    e[0] = (2.0 * s.a2 * D * (1.0 - D) + (n - 2) * s.mu * B * D + g * B * D1 +
            ((n - 2) * s.a2 * D - (n - 3) * s.mu * B * D - g * B * D1) * P - (n - 2) * g * D * P * P -
            2.0 * g * B * D * s.P1 - (n - 1) * s.mubar * B * D * s.e2r) /
           (B * D);
    e[1] = y_coefficient(s);
    e[2] = -(s.a2 * D * D * (n - 2.0 * D) - (n - 2) * s.mu * B * D * D + 2.0 * g * B * D * D1 -
             g * B * B * D1 * D1 + 2.0 * g * B * B * D * s.D2 - (n - 2) * g * D * D * P * P +
             2.0 * (n - 2) * g * B * D * D * s.P1) /
           (g * B * B * D * D);
    e[3] = -D1 / D - 2.0 * (n - 2) * pt.rho1;
    return e;
}

XYZT coeffs_XYZT(const ODEPoint& pt) {
    const Shared s = shared_terms(pt);
    require_gap(s);
    const double B = s.B, D = s.D, D1 = s.D1, n = s.n, g = s.g, P = s.P;
    XYZT r;
    r.x = (s.a2 * D * (n - 2.0 * D) + B * (s.mu * D - g * D1) * P - (n - 2) * g * D * P * P -
           2.0 * g * B * D * s.P1 - (n - 1) * s.mubar * B * D * s.e2r) /
          (B * D);
    r.y = y_coefficient(s);
    // The s_0^2 coefficient carries Delta'^2 in the b^4 term; with Delta^2 there
    // the families with Delta = 1 would not solve Z = 0.
    r.z = -(s.a2 * D * D * (n - 2.0 * D) + (2.0 * s.a2 - 3.0 * s.mu * B) * B * D * D1 - g * B * B * D1 * D1 +
            2.0 * g * B * B * D * s.D2 - (n - 2) * s.mu * B * D * D * P - (n - 2) * g * D * D * P * P +
            2.0 * (n - 2) * g * B * D * D * s.P1) /
          (g * B * B * D * D);
    r.t = g * (D * D - B * D1 * P - D * P * P + 2.0 * B * D * s.P1) + s.mu * B * (D * D - D * P);
    return r;
}

double xyzt_identity_residual(const ODEPoint& pt) {
    const XYZT c = coeffs_XYZT(pt);
    const double B = pt.b2, g = pt.a * pt.a - pt.mu * pt.b2;
    return B * (1.0 - pt.delta) * c.x + B * B * c.y - g * B * B * pt.delta * c.z - (pt.n - 2) * c.t;
}

// ----------------------------------------------------------------------------
// Special functions
// ----------------------------------------------------------------------------

JacobiValues jacobi(double u, double m) {
    if (!(m >= 0.0 && m <= 1.0)) throw ParamError("jacobi: parameter m must lie in [0, 1]");
    if (m == 0.0) return {std::sin(u), std::cos(u), 1.0};
    if (m == 1.0) {
        const double sech = 1.0 / std::cosh(u);
        return {std::tanh(u), sech, sech};
    }
    constexpr int kMaxSteps = 40;
    std::array<double, kMaxSteps + 1> as{}, cs{};
    double a = 1.0, b = std::sqrt(1.0 - m), c = std::sqrt(m);
    as[0] = a;
    cs[0] = c;
    int N = 0;
    while (std::abs(c) > 1e-16 * a && N < kMaxSteps) {
        const double an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = std::sqrt(a * b);
        a = an;
        ++N;
        as[static_cast<std::size_t>(N)] = a;
        cs[static_cast<std::size_t>(N)] = c;
    }
    double phi = std::ldexp(a * u, N);
    double prev = phi;
    for (int i = N; i >= 1; --i) {
        prev = phi;
        const auto k = static_cast<std::size_t>(i);
        phi = 0.5 * (phi + std::asin(cs[k] / as[k] * std::sin(phi)));
    }
    JacobiValues v;
    v.sn = std::sin(phi);
    v.cn = std::cos(phi);
    v.dn = N > 0 ? v.cn / std::cos(prev - phi) : 1.0;
    return v;
}

double elliptic_k(double m) {
    if (!(m >= 0.0 && m < 1.0)) throw ParamError("elliptic_k: parameter m must lie in [0, 1)");
    double a = 1.0, b = std::sqrt(1.0 - m);
    for (int i = 0; i < 60 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return std::numbers::pi / (2.0 * a);
}

namespace {

using Series = std::array<double, kMaxJetOrder + 1>;

double conv(const Series& p, const Series& q, std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i <= k; ++i) s += p[i] * q[k - i];
    return s;
}

// Taylor series of sn, cn, dn about u0 from sn' = cn dn, cn' = -sn dn, dn' = -m sn cn.
std::array<Series, 3> jacobi_series(double u0, double m) {
    const JacobiValues v = jacobi(u0, m);
    Series s{}, c{}, d{};
    s[0] = v.sn;
    c[0] = v.cn;
    d[0] = v.dn;
    for (std::size_t k = 0; k < kMaxJetOrder; ++k) {
        const double kk = static_cast<double>(k + 1);
        s[k + 1] = conv(c, d, k) / kk;
        c[k + 1] = -conv(s, d, k) / kk;
        d[k + 1] = -m * conv(s, c, k) / kk;
    }
    return {s, c, d};
}

}  // namespace

Jet jacobi_sn(const Jet& u, double m) { return u.compose(jacobi_series(u.value(), m)[0]); }
Jet jacobi_cn(const Jet& u, double m) { return u.compose(jacobi_series(u.value(), m)[1]); }

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
    std::size_t lead = 0;
    while (lead < coeffs.size() && coeffs[lead] == 0.0) ++lead;
    if (lead == coeffs.size()) throw ParamError("polynomial_roots: zero polynomial");
    const int d = static_cast<int>(coeffs.size() - lead) - 1;
    if (d == 0) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) comp(0, j) = -coeffs[lead + 1 + static_cast<std::size_t>(j)] / coeffs[lead];
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<std::complex<double>> out;
    for (int i = 0; i < d; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

std::vector<double> real_polynomial_roots(const std::vector<double>& coeffs, double tol) {
    std::vector<double> out;
    for (const auto& z : polynomial_roots(coeffs)) {
        if (std::abs(z.imag()) > tol * std::max(1.0, std::abs(z))) {
            std::ostringstream msg;
            msg << "polynomial root " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
                << "i is not real";
            throw RootError(msg.str());
        }
        out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ----------------------------------------------------------------------------
// Solution families
// ----------------------------------------------------------------------------

std::vector<double> SolutionFamily::grid_b2(int count) const {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * (i + 0.5) / count);
    return out;
}

std::vector<SolutionFamily::GridPoint> SolutionFamily::grid(int count) const {
    std::vector<GridPoint> out;
    for (double t : grid_b2(count)) {
        const FactorJets f = profile.at(Jet(t));
        out.push_back({t, f.delta.value(), f.rho.value()});
    }
    return out;
}

ODEPoint SolutionFamily::ode_point(double b2) const { return ODEPoint::from_profile(profile, b2, n, mu, mubar, a); }

double SolutionFamily::gate_residual(int count) const {
    double worst = 0.0;
    for (double t : grid_b2(count)) {
        const XYZT c = coeffs_XYZT(ode_point(t));
        worst = std::max({worst, std::abs(c.x), std::abs(c.t)});
    }
    return worst;
}

nlohmann::json SolutionFamily::to_json(int count) const {
    nlohmann::json j;
    j["family"] = family;
    j["params"] = nlohmann::json::object();
    for (const auto& [k, v] : params) j["params"][k] = v;
    j["n"] = n;
    j["mu"] = mu;
    j["a"] = a;
    j["domain"] = {lo, hi};
    j["mubar"] = mubar;
    j["grid"] = nlohmann::json::array();
    for (const auto& g : grid(count)) j["grid"].push_back({g.b2, g.delta, g.rho});
    return j;
}

namespace {

using JetFn = std::function<Jet(const Jet&)>;

struct FamilySpec {
    std::string id;
    Params defaults;
};

const std::vector<FamilySpec>& family_specs() {
    static const std::vector<FamilySpec> specs = {
        {"ricciflat4d", {{"C", 1.0}, {"D", 1.0}, {"a", 1.0}}},
        {"conformal_flat", {{"n", 4.0}, {"C", 1.0}, {"D", 1.0}, {"a", 1.0}}},
        {"conformal_curved", {{"n", 4.0}, {"mu", 1.0}, {"a", 1.0}, {"C", 1.0}, {"D", 0.2}}},
        {"stretch_fs", {{"n", 4.0}, {"mu", 1.0}, {"a", 1.0}, {"rho0", 0.0}}},
        {"general_eh", {{"n", 4.0}, {"C", 1.0}, {"D", 1.0}}},
        {"fs_bergmann", {{"n", 4.0}, {"mu", 1.0}, {"a", 1.0}, {"C", 1.0}, {"D", 0.0}}},
        {"jacobi_eh", {{"F", -0.1}, {"mubar", 1.0}, {"degenerate", 0.0}}},
        {"taubnut_gen", {{"C", 1.0}, {"D", 1.0}, {"E", 0.05}}},
        {"elliptic_4d",
         {{"case", 4.0}, {"sign", 1.0}, {"C", 1.5}, {"D", 0.5}, {"p", 3.0}, {"E", 1.0}, {"F", 12.0 / 35.0},
          {"mubar", -8.0 / 7.0}}},
        {"hawking", {{"C", 1.0}, {"D", 1.0}}},
    };
    return specs;
}

class ParamReader {
public:
    ParamReader(const std::string& family, const Params& given) : family_(family), given_(given) {
        defaults_ = family_defaults(family);
        for (const auto& [k, v] : given) {
            if (k != "b2_lo" && k != "b2_hi" && !defaults_.count(k)) {
                throw ParamError("family '" + family + "': unknown parameter '" + k + "'");
            }
            if (!std::isfinite(v)) throw ParamError("family '" + family + "': parameter '" + k + "' is not finite");
        }
    }
    double operator()(const std::string& k) const {
        auto it = given_.find(k);
        return it != given_.end() ? it->second : defaults_.at(k);
    }
    int dim(const std::string& k, bool even) const {
        const double v = (*this)(k);
        const int n = static_cast<int>(std::lround(v));
        if (std::abs(v - n) > 0.0 || n < 3 || (even && n % 2 != 0)) {
            throw ParamError("family '" + family_ + "': '" + k + "' must be an integer >= 3" +
                             (even ? " and even" : ""));
        }
        return n;
    }
    [[nodiscard]] Params resolved() const {
        Params p = defaults_;
        for (const auto& [k, v] : given_) p[k] = v;
        return p;
    }
    [[nodiscard]] bool has(const std::string& k) const { return given_.count(k) != 0; }

private:
    std::string family_;
    Params given_;
    Params defaults_;
};

bool profile_valid_at(const DeformationProfile::Evaluator& eval, double t) {
    try {
        const FactorJets f = eval(Jet(t));
        return std::isfinite(f.delta.value()) && std::isfinite(f.rho.value()) && f.delta.value() > 0.0;
    } catch (const Error&) {
        return false;
    }
}

struct Interval {
    double lo, hi;
};

// Longest run of valid points on a log-spaced scan of [lo0, hi0], pulled in by
// one scan step at each end.
Interval auto_interval(const std::string& family, const DeformationProfile::Evaluator& eval, double lo0,
                       double hi0) {
    constexpr int kScan = 400;
    const double l0 = std::log(lo0), l1 = std::log(hi0);
    std::vector<double> ts, ds, rs;
    std::vector<bool> ok;
    for (int i = 0; i <= kScan; ++i) {
        const double t = std::exp(l0 + (l1 - l0) * i / kScan);
        ts.push_back(t);
        ok.push_back(profile_valid_at(eval, t));
        const FactorJets f = ok.back() ? eval(Jet(t)) : FactorJets{};
        ds.push_back(ok.back() ? f.delta.value() : 0.0);
        rs.push_back(ok.back() ? f.rho.value() : 0.0);
    }
    // Zeros and poles of Delta and logarithmic poles of rho can fall between
    // samples without a sign change; refine every interior local extremum.
    auto refine = [&](std::size_t i, bool of_delta, double sgn) {
        auto fn = [&](double t) {
            try {
                const FactorJets f = eval(Jet(t));
                const double v = of_delta ? f.delta.value() : f.rho.value();
                return std::isfinite(v) ? sgn * v : -std::numeric_limits<double>::max();
            } catch (const Error&) {
                return -std::numeric_limits<double>::max();
            }
        };
        return sgn * boost::math::tools::brent_find_minima(fn, ts[i - 1], ts[i + 1], 40).second;
    };
    // A smooth profile cannot move far between neighbouring samples 1.5% apart,
    // so an extremum far beyond its neighbours marks a zero or a pole.
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        if (!(ok[i - 1] && ok[i] && ok[i + 1])) continue;
        const double dlo = std::min(ds[i - 1], ds[i + 1]), dhi = std::max(ds[i - 1], ds[i + 1]);
        const double rlo = std::min(rs[i - 1], rs[i + 1]), rhi = std::max(rs[i - 1], rs[i + 1]);
        bool bad = false;
        if (ds[i] <= dlo) bad |= !(refine(i, true, 1.0) > 1e-4 * dlo);
        if (ds[i] >= dhi) bad |= !(refine(i, true, -1.0) < 1e4 * dhi);
        if (rs[i] <= rlo) bad |= !(refine(i, false, 1.0) > rlo - 3.0);
        if (rs[i] >= rhi) bad |= !(refine(i, false, -1.0) < rhi + 3.0);
        if (bad) ok[i] = false;
    }
    int best_start = -1, best_len = 0;
    for (int i = 0; i <= kScan;) {
        if (!ok[static_cast<std::size_t>(i)]) {
            ++i;
            continue;
        }
        int j = i;
        while (j <= kScan && ok[static_cast<std::size_t>(j)]) ++j;
        if (j - i > best_len) {
            best_len = j - i;
            best_start = i;
        }
        i = j;
    }
    if (best_len < 8) throw ParamError("family '" + family + "': no usable b^2 interval for these parameters");
    const int first = best_start, last = best_start + best_len - 1;
    // Keep an end that is valid at the scan boundary; pull in ends next to a failure.
    const double lo = first == 0 ? ts.front() : ts[static_cast<std::size_t>(first + 1)];
    const double hi = last == kScan ? ts.back() : ts[static_cast<std::size_t>(last - 1)];
    return {lo, hi};
}

struct FamilyBuild {
    int n = 4;
    double mu = 0, a = 1, mubar = 0;
    JetFn delta, rho;
    double lo0 = 0.01, hi0 = 4.0;
};

SolutionFamily finish(const std::string& id, const ParamReader& pr, FamilyBuild fb) {
    JetFn delta = fb.delta, rho = fb.rho;
    DeformationProfile::Evaluator eval = [delta, rho](const Jet& t) {
        FactorJets f;
        f.delta = delta(t);
        f.kappa = (1.0 - f.delta) / t;
        f.rho = rho(t);
        f.nu = Jet(1.0);
        return f;
    };
    Interval iv{};
    if (pr.has("b2_lo") || pr.has("b2_hi")) {
        iv.lo = pr.has("b2_lo") ? pr("b2_lo") : fb.lo0;
        iv.hi = pr.has("b2_hi") ? pr("b2_hi") : fb.hi0;
        if (!(iv.lo > 0.0 && iv.hi > iv.lo)) throw ParamError("family '" + id + "': need 0 < b2_lo < b2_hi");
        for (int i = 0; i <= 200; ++i) {
            const double t = iv.lo + (iv.hi - iv.lo) * i / 200.0;
            if (!profile_valid_at(eval, t)) {
                throw ParamError("family '" + id + "': profile degenerates inside [b2_lo, b2_hi] near b^2 = " +
                                 std::to_string(t));
            }
        }
    } else {
        iv = auto_interval(id, eval, fb.lo0, fb.hi0);
    }
    SolutionFamily s;
    s.family = id;
    s.params = pr.resolved();
    s.n = fb.n;
    s.mu = fb.mu;
    s.a = fb.a;
    s.mubar = fb.mubar;
    s.lo = iv.lo;
    s.hi = iv.hi;
    s.profile = DeformationProfile(id, std::move(eval), iv.lo, iv.hi);
    return s;
}

double upper_gap(double a, double mu, double fallback) { return mu > 0.0 ? a * a / mu : fallback; }

FamilyBuild ricciflat(const ParamReader& pr, bool nonzero) {
    const double C = pr("C"), D = pr("D");
    if (nonzero && (C == 0.0 || D == 0.0)) throw ParamError("hawking: C and D must be non-zero");
    if (C == 0.0) throw ParamError("ricciflat4d: C must be non-zero");
    FamilyBuild fb;
    fb.n = 4;
    fb.a = nonzero ? 1.0 : pr("a");
    fb.delta = [C, D](const Jet& t) { return C * C / square(C + D * t); };
    fb.rho = [C, D](const Jet& t) { return 0.5 * log(C + D * t); };
    return fb;
}

FamilyBuild conformal_flat(const ParamReader& pr) {
    const double C = pr("C"), D = pr("D"), a = pr("a");
    FamilyBuild fb;
    fb.n = pr.dim("n", false);
    fb.a = a;
    fb.mubar = 4.0 * C * D * a * a;
    fb.delta = [](const Jet&) { return Jet(1.0); };
    fb.rho = [C, D](const Jet& t) { return -log(C + D * t); };
    return fb;
}

FamilyBuild conformal_curved(const ParamReader& pr) {
    const double mu = pr("mu"), a = pr("a"), C = pr("C"), D = pr("D");
    if (mu == 0.0) throw ParamError("conformal_curved: mu must be non-zero (use conformal_flat)");
    FamilyBuild fb;
    fb.n = pr.dim("n", false);
    fb.mu = mu;
    fb.a = a;
    fb.mubar = (C * C - D * D * a * a) * mu;
    fb.delta = [](const Jet&) { return Jet(1.0); };
    fb.rho = [mu, a, C, D](const Jet& t) { return -log(C + D * sqrt(a * a - mu * t)); };
    fb.hi0 = 0.98 * upper_gap(a, mu, 4.0);
    return fb;
}

FamilyBuild stretch_fs(const ParamReader& pr) {
    const double mu = pr("mu"), a = pr("a"), rho0 = pr("rho0");
    FamilyBuild fb;
    fb.n = pr.dim("n", false);
    fb.mu = mu;
    fb.a = a;
    fb.mubar = (fb.n + 2.0) / (fb.n - 1.0) * std::exp(-2.0 * rho0) * mu;
    fb.delta = [mu, a](const Jet& t) { return 1.0 - mu * t / (a * a); };
    fb.rho = [rho0](const Jet&) { return Jet(rho0); };
    fb.hi0 = 0.98 * upper_gap(a, mu, 4.0);
    return fb;
}

FamilyBuild general_eh(const ParamReader& pr) {
    const double C = pr("C"), D = pr("D");
    FamilyBuild fb;
    fb.n = pr.dim("n", true);
    const int m = fb.n / 2;
    fb.delta = [C, D, m](const Jet& t) {
        const Jet tm = ipow(t, m);
        return square((C - D * tm) / (C + D * tm));
    };
    fb.rho = [C, D, m, n = fb.n](const Jet& t) { return -log(t) + 2.0 / n * log(C + D * ipow(t, m)); };
    // Default to the side of the bolt Delta = 0 away from the origin.
    if (C * D > 0.0) {
        const double bolt = std::pow(C / D, 1.0 / m);
        fb.lo0 = 1.05 * bolt;
        fb.hi0 = 4.0 * bolt;
    }
    return fb;
}

FamilyBuild fs_bergmann(const ParamReader& pr) {
    const double mu = pr("mu"), a = pr("a"), C = pr("C"), D = pr("D");
    FamilyBuild fb;
    fb.n = pr.dim("n", false);
    fb.mu = mu;
    fb.a = a;
    const double nn = fb.n;
    if (mu == 0.0) {
        fb.mubar = 4.0 * (nn + 2) / (nn - 1) * C * D * a * a;
        fb.delta = [C, D](const Jet& t) { return square((C - D * t) / (C + D * t)); };
        fb.rho = [C, D](const Jet& t) { return -log(C + D * t); };
    } else {
        fb.mubar = (nn + 2) / (nn - 1) * (C * C - D * D * a * a) * mu;
        fb.delta = [mu, a, C, D](const Jet& t) {
            const Jet s = sqrt(a * a - mu * t);
            return square(C * s + D * a * a) / (a * a * square(C + D * s));
        };
        fb.rho = [mu, a, C, D](const Jet& t) { return -log(C + D * sqrt(a * a - mu * t)); };
        fb.hi0 = 0.98 * upper_gap(a, mu, 4.0);
    }
    return fb;
}

FamilyBuild jacobi_eh(const ParamReader& pr) {
    FamilyBuild fb;
    fb.n = 4;
    if (pr("degenerate") != 0.0) {
        // Double root: tan form with mubar = -2.
        fb.mubar = -2.0;
        fb.delta = [](const Jet& t) {
            const Jet q = square(tan(0.5 * log(t)));
            return q * square(q + 1.0) / square(q + 1.0 / 3.0);
        };
        fb.rho = [](const Jet& t) {
            const Jet q = square(tan(0.5 * log(t)));
            return 0.5 * log(q + 1.0 / 3.0) - 0.5 * log(t);
        };
        fb.lo0 = std::exp(0.05);
        fb.hi0 = std::exp(std::numbers::pi - 0.05);
        return fb;
    }
    const double F = pr("F"), mubar = pr("mubar");
    if (!(mubar > 0.0)) throw ParamError("jacobi_eh: mubar must be positive (degenerate=1 gives the mubar<0 case)");
    if (F == 0.0) throw ParamError("jacobi_eh: F must be non-zero");
    // Roots of F + v^2 - mubar/2 v^3.
    const auto r = real_polynomial_roots({-0.5 * mubar, 1.0, 0.0, F});
    const double r1 = r[0], r2 = r[1], r3 = r[2];
    const double scale = std::max({1.0, r1 * r1, r3 * r3});
    if (std::abs(r1 * r2 + r2 * r3 + r3 * r1) > 1e-9 * scale) {
        throw RootError("jacobi_eh: root constraint v1 v2 + v2 v3 + v3 v1 = 0 violated");
    }
    if (!(r3 - r2 > 1e-12 && r2 - r1 > 1e-12)) throw ParamError("jacobi_eh: roots must be distinct");
    fb.mubar = 2.0 / (r1 + r2 + r3);
    const double xi = std::sqrt(mubar * (r3 - r1) / 8.0);
    const double m = (r3 - r2) / (r3 - r1);
    fb.delta = [=](const Jet& t) {
        const Jet u = xi * log(t);
        const Jet s2 = square(jacobi_sn(u, m));
        const Jet c2 = square(jacobi_cn(u, m));
        const double d23 = r2 - r3;
        return mubar * d23 * d23 * s2 * c2 * (d23 * s2 + (r3 - r1)) / (2.0 * square(d23 * s2 + r3));
    };
    fb.rho = [=](const Jet& t) {
        const Jet s2 = square(jacobi_sn(xi * log(t), m));
        return 0.5 * log((r2 - r3) * s2 + r3) - 0.5 * log(t);
    };
    const double K = elliptic_k(m);
    fb.lo0 = std::exp(0.05 * K / xi);
    fb.hi0 = std::exp(0.95 * K / xi);
    return fb;
}

FamilyBuild taubnut_gen(const ParamReader& pr) {
    const double C = pr("C"), D = pr("D"), E = pr("E");
    if (!(D * E > 0.0)) throw ParamError("taubnut_gen: D E must be positive");
    FamilyBuild fb;
    fb.n = 4;
    const double de = D * E;
    auto Q = [C, de](const Jet& t) {
        return ipow(t + C, 4) - 8.0 * de * (3.0 * square(t) + 2.0 * C * t + C * C - 2.0 * de);
    };
    fb.delta = [=](const Jet& t) {
        return 64.0 * de * square(t) * square(square(t) - C * C + 4.0 * de) / square(Q(t));
    };
    fb.rho = [=](const Jet& t) { return 0.5 * log(Q(t) / (16.0 * de * E * ipow(t, 3))); };
    fb.lo0 = 0.01;
    fb.hi0 = 8.0;
    return fb;
}

// Quartic case with four distinct real roots. The root order fixes the branch of
// the elliptic solution; the first order with a real modulus in (0, 1), a real
// frequency and a valid profile at the middle of the period is used.
FamilyBuild elliptic_general(double E, double F, double mubar) {
    if (E == 0.0 || mubar == 0.0) throw ParamError("elliptic_4d: E and mubar must be non-zero");
    const double k = -4.0 * E / mubar, l = -E * E * E * F / mubar;
    const auto rts = real_polynomial_roots({1.0, 0.0, k - 6.0, l, k - 3.0});
    const double sum = rts[0] + rts[1] + rts[2] + rts[3];
    double e2 = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) e2 += rts[static_cast<std::size_t>(i)] * rts[static_cast<std::size_t>(j)];
    const double e4 = rts[0] * rts[1] * rts[2] * rts[3];
    const double scale = std::max(1.0, std::abs(k));
    if (std::abs(sum) > 1e-9 * scale || std::abs(e4 - e2 - 3.0) > 1e-9 * scale) {
        throw RootError("elliptic_4d: Vieta constraints on the quartic roots violated");
    }
    for (int i = 0; i < 3; ++i) {
        if (rts[static_cast<std::size_t>(i + 1)] - rts[static_cast<std::size_t>(i)] < 1e-9) {
            throw ParamError("elliptic_4d: case 4 needs four distinct roots (use case 1-3 for double roots)");
        }
    }
    std::array<int, 4> perm{0, 1, 2, 3};
    do {
        const double i1 = rts[static_cast<std::size_t>(perm[0])], i2 = rts[static_cast<std::size_t>(perm[1])];
        const double i3 = rts[static_cast<std::size_t>(perm[2])], i4 = rts[static_cast<std::size_t>(perm[3])];
        const double xi2 = -(i1 - i3) * (i2 - i4) / (4.0 * (e4 + 3.0));
        const double m = (i1 - i2) * (i3 - i4) / ((i1 - i3) * (i2 - i4));
        if (!(xi2 > 0.0 && m > 0.0 && m < 1.0)) continue;
        const double xi = std::sqrt(xi2);
        const double prod = (i1 - i2) * (i1 - i3) * (i2 - i3);
        const double sigma = 4.0 * prod * prod / (e4 + 3.0);
        auto iota = [=](const Jet& s2) { return ((i1 - i2) * i3 * s2 - (i1 - i3) * i2) / ((i1 - i2) * s2 - (i1 - i3)); };
        FamilyBuild fb;
        fb.n = 4;
        fb.mubar = -4.0 * E / (e4 + 3.0);
        fb.delta = [=](const Jet& t) {
            const Jet u = xi * log(t);
            const Jet s2 = square(jacobi_sn(u, m));
            const Jet c2 = square(jacobi_cn(u, m));
            const Jet io = iota(s2);
            return sigma * s2 * c2 * ((i1 - i2) * (i3 - i4) * s2 - (i1 - i3) * (i2 - i4)) /
                   (square(square(io) - 1.0) * ipow((i1 - i2) * s2 - (i1 - i3), 4));
        };
        fb.rho = [=](const Jet& t) {
            const Jet io = iota(square(jacobi_sn(xi * log(t), m)));
            return 0.5 * log((square(io) - 1.0) / E) - 0.5 * log(t);
        };
        const double K = elliptic_k(m);
        fb.lo0 = std::exp(0.05 * K / xi);
        fb.hi0 = std::exp(0.95 * K / xi);
        const double mid = std::exp(0.5 * K / xi);
        try {
            const double d = fb.delta(Jet(mid)).value(), r = fb.rho(Jet(mid)).value();
            if (std::isfinite(d) && std::isfinite(r) && d > 0.0) return fb;
        } catch (const Error&) {
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    throw RootError("elliptic_4d: no root ordering gives a real solution");
}

FamilyBuild elliptic_4d(const ParamReader& pr) {
    const int which = static_cast<int>(std::lround(pr("case")));
    FamilyBuild fb;
    fb.n = 4;
    switch (which) {
        case 1: {
            // Two double roots q = r = 3: mubar = 1 with E = -3, or mubar = -1 with E = 3.
            const double sgn = pr("sign") >= 0.0 ? 1.0 : -1.0;
            fb.mubar = sgn;
            fb.delta = [sgn](const Jet& t) {
                const Jet q = square(tan(0.5 * log(t)));
                return square(q + 1.0) / (3.0 * square(sgn * (1.0 / 3.0 - q)));
            };
            fb.rho = [sgn](const Jet& t) {
                const Jet q = square(tan(0.5 * log(t)));
                return 0.5 * log(sgn * (1.0 / 3.0 - q)) - 0.5 * log(t);
            };
            const double pi = std::numbers::pi;
            if (sgn > 0) {
                fb.lo0 = std::exp(-pi / 3.0 + 0.02);
                fb.hi0 = std::exp(pi / 3.0 - 0.02);
            } else {
                fb.lo0 = std::exp(pi / 3.0 + 0.02);
                fb.hi0 = std::exp(pi - 0.02);
            }
            return fb;
        }
        case 2: {
            // One double root with r = 1 (Pedersen type).
            const double C = pr("C"), D = pr("D");
            if (C == 0.0 || D == 0.0) throw ParamError("elliptic_4d case 2: C and D must be non-zero");
            if (D == C * C) throw ParamError("elliptic_4d case 2: D = C^2 gives E = 0");
            fb.mubar = 8.0 * D;
            fb.delta = [C, D](const Jet& t) {
                const Jet t2 = square(t);
                return square(t2 - D) / square(t2 + D + 2.0 * C * t);
            };
            fb.rho = [C, D](const Jet& t) {
                const Jet t2 = square(t);
                return 0.5 * log(C * ((t2 + D) + 2.0 * C * t) / square(C * (t2 + D) + 2.0 * D * t));
            };
            return fb;
        }
        case 3: {
            // One double root with q = -3.
            const double p = pr("p"), E = pr("E");
            if (p * p == 4.0 || E == 0.0) throw ParamError("elliptic_4d case 3: needs p^2 != 4 and E != 0");
            fb.mubar = 16.0 * E / (3.0 * (p * p - 4.0));
            const double w = std::sqrt(p * p + 12.0);
            fb.delta = [p, w](const Jet& t) {
                const Jet L = log(t);
                return 144.0 * (p * p + 12.0) * square(cos(L)) / square(square(w * sin(L) + p) - 36.0);
            };
            fb.rho = [p, w, E](const Jet& t) {
                const Jet L = log(t);
                const Jet s = sin(L);
                return 0.5 * log((p * p - 4.0) * (square(w * s + p) - 36.0) / (4.0 * E * square(w * s - 2.0 * p))) -
                       0.5 * L;
            };
            fb.lo0 = std::exp(-std::numbers::pi);
            fb.hi0 = std::exp(std::numbers::pi);
            return fb;
        }
        case 4: return elliptic_general(pr("E"), pr("F"), pr("mubar"));
        default: throw ParamError("elliptic_4d: case must be 1, 2, 3 or 4");
    }
}

}  // namespace

std::vector<std::string> family_ids() {
    std::vector<std::string> out;
    for (const auto& s : family_specs()) out.push_back(s.id);
    return out;
}

Params family_defaults(const std::string& family) {
    for (const auto& s : family_specs()) {
        if (s.id == family) return s.defaults;
    }
    throw ParamError("unknown solution family '" + family + "'");
}

SolutionFamily closed_form_profile(const std::string& family, const Params& params) {
    const ParamReader pr(family, params);
    FamilyBuild fb;
    if (family == "ricciflat4d") fb = ricciflat(pr, false);
    else if (family == "hawking") fb = ricciflat(pr, true);
    else if (family == "conformal_flat") fb = conformal_flat(pr);
    else if (family == "conformal_curved") fb = conformal_curved(pr);
    else if (family == "stretch_fs") fb = stretch_fs(pr);
    else if (family == "general_eh") fb = general_eh(pr);
    else if (family == "fs_bergmann") fb = fs_bergmann(pr);
    else if (family == "jacobi_eh") fb = jacobi_eh(pr);
    else if (family == "taubnut_gen") fb = taubnut_gen(pr);
    else if (family == "elliptic_4d") fb = elliptic_4d(pr);
    else throw ParamError("unknown solution family '" + family + "'");
    return finish(family, pr, std::move(fb));
}

// ----------------------------------------------------------------------------
// General solution
// ----------------------------------------------------------------------------

namespace {

template <class T>
T power(const T& x, int k) {
    T r = T(1.0);
    for (int i = 0; i < k; ++i) r = r * x;
    return r;
}

double binom(int m, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
    return r;
}

template <class T>
T radicand_impl(int n, double E, double F, double mubar, double a, const T& v) {
    using std::sqrt;
    if (n < 4 || n % 2 != 0) throw ParamError("general solution: n must be even and at least 4");
    const int m = n / 2;
    const double mb = mubar / (a * a);
    if (E == 0.0) {
        const T lead = F * power(1.0 / v, m - 2);
        return lead + v * v - (2.0 * m - 1.0) / (2.0 * m + 2.0) * mb * v * v * v;
    }
    const T io = sqrt(1.0 + E * v);
    const T io2 = io * io;
    T bracket = mb * power(io2, m);
    for (int k = 0; k < m; ++k) {
        const double c = ((m - k) % 2 == 0 ? 1.0 : -1.0) / (2.0 * k - 1.0) * binom(m, k) *
                         (2.0 * (m - k) * E + (2.0 * m - 1.0) * mb);
        bracket = bracket + c * power(io2, k);
    }
    const T S = F * io2 * io - std::pow(E, -m - 1) * io2 * bracket;
    return S * power(1.0 / v, m - 2);
}

}  // namespace

double general_radicand(int n, double E, double F, double mubar, double a, double varrho) {
    if (E != 0.0 && !(1.0 + E * varrho > 0.0)) throw RadicandError("general solution: 1 + E varrho must be positive");
    return radicand_impl<double>(n, E, F, mubar, a, varrho);
}

Jet general_radicand(int n, double E, double F, double mubar, double a, const Jet& varrho) {
    if (E != 0.0 && !(1.0 + E * varrho.value() > 0.0)) {
        throw RadicandError("general solution: 1 + E varrho must be positive");
    }
    return radicand_impl<Jet>(n, E, F, mubar, a, varrho);
}

double general_radicand_alt(int n, double E, double F, double mubar, double a, double varrho) {
    if (E == 0.0) throw ParamError("general_radicand_alt: needs E != 0");
    if (n < 4 || n % 2 != 0) throw ParamError("general solution: n must be even and at least 4");
    if (!(1.0 + E * varrho > 0.0)) throw RadicandError("general solution: 1 + E varrho must be positive");
    const int m = n / 2;
    const double io = std::sqrt(1.0 + E * varrho);
    // Antiderivative of io^{-2}(io^2 - 1)^m with zero constant term.
    double anti = 0.0;
    for (int j = 0; j <= m; ++j) {
        anti += binom(m, j) * ((m - j) % 2 == 0 ? 1.0 : -1.0) * std::pow(io, 2 * j - 1) / (2.0 * j - 1.0);
    }
    const double S = F * io * io * io + io * io * std::pow(varrho, m) -
                     (2.0 * m - 1.0) * std::pow(E, -m - 1) * (mubar / (a * a) + E) * io * io * io * anti;
    return S / std::pow(varrho, m - 2);
}

namespace {

class GeneralSolution {
public:
    explicit GeneralSolution(const GeneralSolverConfig& cfg) : cfg_(cfg) {
        if (cfg.n < 4 || cfg.n % 2 != 0) throw ParamError("solve_general: n must be even and at least 4");
        if (!(cfg.a > 0.0)) throw ParamError("solve_general: a must be positive");
        if (cfg.sign != 1 && cfg.sign != -1) throw ParamError("solve_general: sign must be +1 or -1");
        if (!(cfg.b2_lo > 0.0 && cfg.b2_hi > cfg.b2_lo)) throw ParamError("solve_general: need 0 < b2_lo < b2_hi");
        if (cfg.mu > 0.0 && !(cfg.b2_hi < cfg.a * cfg.a / cfg.mu)) {
            throw ParamError("solve_general: interval must stay below a^2/mu");
        }
        if (!(cfg.anchor_b2 >= cfg.b2_lo && cfg.anchor_b2 <= cfg.b2_hi)) {
            throw ParamError("solve_general: anchor must lie in the interval");
        }
        anchor_varrho_ = cfg.anchor_b2 * std::exp(2.0 * cfg.anchor_rho);
        u_anchor_ = u(cfg.anchor_b2);
        if (!(radicand(anchor_varrho_) > 0.0)) {
            std::ostringstream msg;
            msg << "solve_general: radicand of f is not positive at the anchor, varrho = " << anchor_varrho_;
            throw RadicandError(msg.str());
        }
        build_table();
    }

    [[nodiscard]] FactorJets eval(const Jet& t) const {
        const double t0 = t.value();
        const double v0 = invert(t0);
        Jet v;
        if (t.is_scalar() || t.order() == 0) {
            v = Jet(v0);
        } else {
            const int K = t.order();
            const Jet s = Jet::variable(t0, 0, 1, K);
            Series coeffs{};
            coeffs[0] = v0;
            Jet r = Jet::constant(v0, 1, K);
            // Picard iteration on the Taylor coefficients; each pass fixes one more.
            for (int pass = 0; pass < K; ++pass) {
                const Jet g = slope(s, r);
                const auto gc = g.coeffs();
                std::vector<double> next(gc.size(), 0.0);
                next[0] = v0;
                for (int j = 1; j <= K; ++j) next[static_cast<std::size_t>(j)] = gc[static_cast<std::size_t>(j - 1)] / j;
                r = Jet::constant(0.0, 1, K);
                auto rc = r.coeffs();
                for (std::size_t j = 0; j < next.size(); ++j) rc[j] = next[j];
            }
            const auto rc = r.coeffs();
            for (std::size_t j = 0; j < rc.size(); ++j) coeffs[j] = rc[j];
            v = t.compose(coeffs);
        }
        const Jet G = slope(t, v);
        const Jet gap = cfg_.a * cfg_.a - cfg_.mu * t;
        FactorJets f;
        f.delta = gap * square(t * G / v) / (cfg_.a * cfg_.a * (1.0 + cfg_.E * v));
        f.kappa = (1.0 - f.delta) / t;
        f.rho = 0.5 * log(v / t);
        f.nu = Jet(1.0);
        return f;
    }

    [[nodiscard]] double invert(double t) const {
        const double target = u(t) - u_anchor_;
        // Integrals are monotone in varrho with the direction of `sign`.
        const double s = cfg_.sign;
        auto it = std::lower_bound(integrals_.begin(), integrals_.end(), target,
                                   [s](double lhs, double rhs) { return s * lhs < s * rhs; });
        std::size_t j = static_cast<std::size_t>(it - integrals_.begin());
        if (j == 0 || j >= nodes_.size()) {
            if (j < nodes_.size() && integrals_[j] == target) return nodes_[j];
            std::ostringstream msg;
            msg << "solve_general: b^2 = " << t << " lies outside the tabulated range";
            throw InversionError(msg.str());
        }
        const double v0 = nodes_[j - 1], v1 = nodes_[j];
        const double base = integrals_[j - 1];
        auto phi = [&](double v) { return base + integral(v0, v) - target; };
        double f0 = base - target, f1 = integrals_[j] - target;
        if (f0 == 0.0) return v0;
        if (f1 == 0.0) return v1;
        std::uintmax_t iters = 200;
        auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-13 * std::max(1.0, std::abs(x)); };
        const auto root = boost::math::tools::toms748_solve(phi, v0, v1, f0, f1, tol, iters);
        return 0.5 * (root.first + root.second);
    }

private:
    using Series = std::array<double, kMaxJetOrder + 1>;

    [[nodiscard]] double radicand(double v) const {
        return general_radicand(cfg_.n, cfg_.E, cfg_.F, cfg_.mubar, cfg_.a, v);
    }

    [[nodiscard]] double f(double v) const {
        const double w = radicand(v);
        if (!(w > 0.0)) {
            std::ostringstream msg;
            msg << "solve_general: radicand of f is not positive at varrho = " << v;
            throw RadicandError(msg.str());
        }
        return cfg_.sign / std::sqrt(w);
    }

    // dvarrho/db^2 = u'(b^2) / f(varrho)
    [[nodiscard]] Jet slope(const Jet& t, const Jet& v) const {
        const Jet w = general_radicand(cfg_.n, cfg_.E, cfg_.F, cfg_.mubar, cfg_.a, v);
        return du(t) * (cfg_.sign * sqrt(w));
    }

    [[nodiscard]] double u(double t) const {
        if (cfg_.mu == 0.0) return std::log(t);
        const double s = std::sqrt(cfg_.a * cfg_.a - cfg_.mu * t);
        return std::log(std::abs((cfg_.a - s) / (cfg_.a + s)));
    }

    [[nodiscard]] Jet du(const Jet& t) const {
        if (cfg_.mu == 0.0) return 1.0 / t;
        return cfg_.a / (t * sqrt(cfg_.a * cfg_.a - cfg_.mu * t));
    }

    [[nodiscard]] double integral(double v0, double v1) const {
        if (v0 == v1) return 0.0;
        auto fn = [this](double v) { return f(v); };
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, v0, v1, 15, 1e-13);
    }

    [[nodiscard]] double locate_zero(double good, double bad) const {
        for (int i = 0; i < 200 && std::abs(bad - good) > 1e-14 * std::abs(good); ++i) {
            const double mid = 0.5 * (good + bad);
            bool ok = false;
            try {
                ok = radicand(mid) > 0.0;
            } catch (const RadicandError&) {
            }
            (ok ? good : bad) = mid;
        }
        return 0.5 * (good + bad);
    }

    // March away from the anchor in one direction until the integral covers `goal`.
    void march(int dir, double goal, std::vector<double>& vs, std::vector<double>& is) const {
        double v = anchor_varrho_, I = 0.0;
        constexpr int kMaxNodes = 20000;
        for (int count = 0; count < kMaxNodes; ++count) {
            const double covered = (cfg_.sign * dir > 0) ? I - goal : goal - I;
            if (covered >= 0.0) return;
            double h = 0.02 * std::max(std::abs(v), 1e-6);
            if (dir < 0 && v - h <= 0.0) h = 0.5 * v;
            const double next = v + dir * h;
            bool ok = false;
            try {
                ok = next > 0.0 && radicand(next) > 0.0;
            } catch (const RadicandError&) {
            }
            if (!ok) {
                std::ostringstream msg;
                msg << "solve_general: radicand of f vanishes at varrho = " << locate_zero(v, next)
                    << " before the b^2 interval is covered";
                throw RadicandError(msg.str());
            }
            I += integral(v, next);
            v = next;
            vs.push_back(v);
            is.push_back(I);
        }
        std::ostringstream msg;
        msg << "solve_general: varrho ran away to " << v << " before the b^2 interval is covered";
        throw InversionError(msg.str());
    }

    void build_table() {
        const double ulo = u(cfg_.b2_lo) - u_anchor_, uhi = u(cfg_.b2_hi) - u_anchor_;
        const double umin = std::min(ulo, uhi), umax = std::max(ulo, uhi);
        std::vector<double> up_v, up_i, dn_v, dn_i;
        // Moving up in varrho moves the integral in the direction of sign.
        march(+1, cfg_.sign > 0 ? umax : umin, up_v, up_i);
        march(-1, cfg_.sign > 0 ? umin : umax, dn_v, dn_i);
        for (std::size_t k = dn_v.size(); k-- > 0;) {
            nodes_.push_back(dn_v[k]);
            integrals_.push_back(dn_i[k]);
        }
        nodes_.push_back(anchor_varrho_);
        integrals_.push_back(0.0);
        nodes_.insert(nodes_.end(), up_v.begin(), up_v.end());
        integrals_.insert(integrals_.end(), up_i.begin(), up_i.end());
        for (std::size_t k = 1; k < nodes_.size(); ++k) {
            if (!(cfg_.sign * (integrals_[k] - integrals_[k - 1]) > 0.0)) {
                std::ostringstream msg;
                msg << "solve_general: quadrature table is not monotone near varrho = " << nodes_[k];
                throw InversionError(msg.str());
            }
        }
    }

    GeneralSolverConfig cfg_;
    double anchor_varrho_ = 0;
    double u_anchor_ = 0;
    std::vector<double> nodes_;
    std::vector<double> integrals_;
};

}  // namespace

SolutionFamily solve_general(const GeneralSolverConfig& cfg) {
    auto sol = std::make_shared<const GeneralSolution>(cfg);
    SolutionFamily s;
    s.family = "general";
    s.params = {{"n", static_cast<double>(cfg.n)},
                {"mu", cfg.mu},
                {"mubar", cfg.mubar},
                {"a", cfg.a},
                {"E", cfg.E},
                {"F", cfg.F},
                {"sign", static_cast<double>(cfg.sign)},
                {"b2_lo", cfg.b2_lo},
                {"b2_hi", cfg.b2_hi},
                {"anchor_b2", cfg.anchor_b2},
                {"anchor_rho", cfg.anchor_rho}};
    s.n = cfg.n;
    s.mu = cfg.mu;
    s.a = cfg.a;
    s.mubar = cfg.mubar;
    s.lo = cfg.b2_lo;
    s.hi = cfg.b2_hi;
    // The profile interval is closed at the ends the table was built for; open
    // interval semantics need a hair of slack.
    const double pad = 1e-12 * cfg.b2_hi;
    s.profile = DeformationProfile(
        "general", [sol](const Jet& t) { return sol->eval(t); }, cfg.b2_lo - pad, cfg.b2_hi + pad);
    return s;
}

// ----------------------------------------------------------------------------
// Warped Einstein metrics
// ----------------------------------------------------------------------------

RadialProfile warped_einstein_profile(int n, double E, double F, double mubar) {
    if (n != 4 && n != 8) throw ParamError("warped_einstein_metric: n must be 4 or 8");
    RadialProfile p;
    if (n == 4 && E == 0.0) {
        p.psi = [F, mubar](const Jet& r) { return 1.0 / (1.0 + F / ipow(r, 4) - 0.5 * mubar * square(r)); };
        p.phi = [F, mubar](const Jet& r) {
            return square(r) * (1.0 + F / ipow(r, 4) - 0.5 * mubar * square(r));
        };
    } else {
        p.psi = [n, E, F, mubar](const Jet& r) {
            const Jet v = square(r);
            return square(v) / general_radicand(n, E, F, mubar, 1.0, v);
        };
        p.phi = [n, E, F, mubar](const Jet& r) {
            const Jet v = square(r);
            return general_radicand(n, E, F, mubar, 1.0, v) / ((1.0 + E * v) * v);
        };
    }
    p.rest = [](const Jet& r) { return square(r); };
    return p;
}

MetricField warped_einstein_metric(int n, double E, double F, double mubar, double r_lo, double r_hi) {
    if (n != 4 && n != 8) throw ParamError("warped_einstein_metric: n must be 4 or 8");
    auto positive = [&](double r) {
        try {
            return (E == 0.0 || 1.0 + E * r * r > 0.0) && general_radicand(n, E, F, mubar, 1.0, r * r) > 0.0;
        } catch (const RadicandError&) {
            return false;
        }
    };
    if (std::isnan(r_lo) || std::isnan(r_hi)) {
        constexpr double kStart = 0.1, kEnd = 3.0, kStep = 1e-3, kTube = 0.05;
        double r = kStart;
        while (r < kEnd && !positive(r)) r += kStep;
        if (r >= kEnd) throw RadicandError("warped_einstein_metric: radicand is not positive anywhere in [0.1, 3]");
        const double start = r;
        while (r < kEnd && positive(r)) r += kStep;
        const double lo = start == kStart ? kStart : start + kTube;
        const double hi = r >= kEnd ? kEnd : r - kStep - kTube;
        if (!(hi > lo + 0.05)) throw RadicandError("warped_einstein_metric: radicand-positive shell is too thin");
        if (std::isnan(r_lo)) r_lo = lo;
        if (std::isnan(r_hi)) r_hi = hi;
    }
    if (!(r_lo > 0.0 && r_hi > r_lo)) throw ParamError("warped_einstein_metric: need 0 < r_lo < r_hi");
    for (int i = 0; i <= 200; ++i) {
        const double r = r_lo + (r_hi - r_lo) * i / 200.0;
        if (!positive(r)) {
            std::ostringstream msg;
            msg << "warped_einstein_metric: radicand is not positive at r = " << r;
            throw RadicandError(msg.str());
        }
    }
    std::ostringstream name;
    name << "warped_einstein(n=" << n << ",E=" << E << ",F=" << F << ",mubar=" << mubar << ")";
    MetricField m = warped_metric(n, warped_einstein_profile(n, E, F, mubar), Domain::shell(n, r_lo, r_hi), name.str());
    m.declared_mu = mubar;
    return m;
}

}  // namespace betaforge
