#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "betaforge/deformation.hpp"
#include "betaforge/einstein.hpp"
#include "betaforge/errors.hpp"
#include "betaforge/gallery.hpp"

namespace betaforge {

namespace {

struct Recipe {
    CatalogItem item;
    std::function<GalleryEntry(const class Args&)> make;
};

class Args {
public:
    Args(const CatalogItem& item, const Params& given) : id_(item.id) {
        for (const auto& p : item.params) values_[p.name] = p.default_value;
        for (const auto& [k, v] : given) {
            if (!values_.count(k)) throw ParamError(id_ + ": unknown parameter '" + k + "'");
            if (!std::isfinite(v)) throw ParamError(id_ + ": parameter '" + k + "' is not finite");
            values_[k] = v;
        }
    }
    double operator()(const std::string& k) const { return values_.at(k); }
    int dim(const std::string& k = "n") const {
        const double v = values_.at(k);
        const long n = std::lround(v);
        if (static_cast<double>(n) != v || n < 2) throw ParamError(id_ + ": '" + k + "' must be an integer >= 2");
        return static_cast<int>(n);
    }
    int even_dim(const std::string& k = "n") const {
        const int n = dim(k);
        if (n % 2 != 0) throw DimensionError(id_ + ": '" + k + "' must be even");
        return n;
    }
    [[nodiscard]] const Params& values() const { return values_; }
    [[nodiscard]] const std::string& id() const { return id_; }

private:
    std::string id_;
    Params values_;
};

Jet norm2(std::span<const Jet> x) {
    Jet s(0.0);
    for (const auto& v : x) s += v * v;
    return s;
}

GalleryEntry entry(const Args& args, std::string description, MetricField metric,
                   std::optional<GeometryPair> pair, std::vector<Expectation> expectations) {
    GalleryEntry e;
    e.id = args.id();
    e.description = std::move(description);
    e.params = args.values();
    e.metric = std::move(metric);
    e.pair = std::move(pair);
    e.expectations = std::move(expectations);
    return e;
}

Expectation einstein(double mu) { return {"einstein", mu, 0}; }
Expectation sectional(double mu) { return {"sectional", mu, 0}; }
Expectation killing() { return {"killing", 0, 0}; }
Expectation condition_a(double a, double mu) { return {"condition_a", mu, a}; }
Expectation condition_b(double mu) { return {"condition_b", mu, 0}; }
Expectation t00_alpha2() { return {"t00_minus_alpha2", 0, 0}; }
Expectation rank(int n) { return {"rank", static_cast<double>(n), 0}; }

// Flat metric dr^2 + r^2 (sigma_1^2 + ... + sigma_{n-1}^2) assembled from a
// coframe that is linear in x over r^2.
GeometryPair frame_pair(int n, std::vector<std::vector<double>> (*frame)(std::span<const double>),
                        const std::string& name) {
    // frame(x)[i][k] = sum_j L[i][k][j] x_j / |x|^2; read L off the unit vectors.
    std::vector<std::vector<std::vector<double>>> lin(static_cast<std::size_t>(n - 1),
                                                       std::vector<std::vector<double>>(
                                                           static_cast<std::size_t>(n),
                                                           std::vector<double>(static_cast<std::size_t>(n), 0.0)));
    for (int j = 0; j < n; ++j) {
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(j)] = 1.0;
        const auto f = frame(e);
        for (std::size_t i = 0; i < f.size(); ++i)
            for (std::size_t k = 0; k < f[i].size(); ++k) lin[i][k][static_cast<std::size_t>(j)] = f[i][k];
    }
    auto sigma = [lin, n](std::span<const Jet> x) {
        std::vector<JetVec> out;
        for (const auto& row : lin) {
            JetVec s(static_cast<std::size_t>(n), Jet(0.0));
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) {
                    const double c = row[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                    if (c != 0.0) s[static_cast<std::size_t>(k)] += c * x[static_cast<std::size_t>(j)];
                }
            out.push_back(std::move(s));  // r^2 sigma_i
        }
        return out;
    };
    const Domain dom = sampling_shell(n, 0.1, 2.0);
    MetricField g;
    g.dim = n;
    g.name = name;
    g.domain = dom;
    g.declared_mu = 0.0;
    g.eval = [n, sigma](std::span<const Jet> x) {
        const Jet r2 = norm2(x);
        const Jet inv = 1.0 / r2;
        const auto s = sigma(x);
        JetMatrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                // dr = <x, dx>/r and r^2 sigma_i^2 = (r^2 sigma_i)^2 / r^2.
                Jet v = x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)] * inv;
                for (const auto& row : s) v += row[static_cast<std::size_t>(i)] * row[static_cast<std::size_t>(j)] * inv;
                a(i, j) = v;
                a(j, i) = v;
            }
        return a;
    };
    OneFormField b;
    b.dim = n;
    b.name = name + "_sigma1";
    b.domain = dom;
    b.eval = [sigma](std::span<const Jet> x) { return sigma(x).front(); };
    return make_pair(std::move(g), std::move(b), name);
}

SolutionFamily family(const std::string& id, Params p) { return closed_form_profile(id, p); }

// Deformed pair with the sampling box re-centred on the region the profile allows.
GeometryPair deformed(const GeometryPair& base, const DeformationProfile& prof, double r_in, double r_out) {
    GeometryPair out = apply(base, prof);
    const Domain box = sampling_shell(base.dim(), r_in, r_out);
    out.metric.domain.lo = box.lo;
    out.metric.domain.hi = box.hi;
    out.oneform.domain.lo = box.lo;
    out.oneform.domain.hi = box.hi;
    return out;
}

std::vector<Recipe> recipes() {
    std::vector<Recipe> r;
    auto add = [&r](std::string id, std::string desc, std::vector<ParamSpec> params,
                    std::function<GalleryEntry(const Args&)> make) {
        r.push_back({CatalogItem{std::move(id), std::move(desc), std::move(params), {}}, std::move(make)});
    };

    add("euclidean", "Flat metric |y| on R^n", {{"n", 4, "dimension"}}, [](const Args& a) {
        return entry(a, "Flat metric |y| on R^n", euclidean(a.dim()), std::nullopt, {einstein(0), sectional(0)});
    });

    add("symplectic_pair", "Flat metric with beta = a <Jx, y>; t00 = -a^2 alpha^2",
        {{"n", 4, "even dimension"}, {"a", 1, "scale of beta"}}, [](const Args& a) {
            const int n = a.even_dim();
            GeometryPair p = symplectic_pair(n, a("a"));
            std::vector<Expectation> ex = {einstein(0), killing(), condition_a(a("a"), 0), rank(n)};
            if (a("a") == 1.0) ex.push_back(t00_alpha2());
            return entry(a, "Flat metric with the symplectic Killing form", p.metric, p, ex);
        });

    add("const_curv_conformal", "Stereographic metric of curvature mu with Killing form 4a<Jx,y>/(1+mu|x|^2)^2",
        {{"n", 4, "even dimension"}, {"mu", 1, "sectional curvature"}, {"a", 1, "Killing form scale"}},
        [](const Args& a) {
            const double mu = a("mu"), s = a("a");
            if (s == 0.0) throw ParamError("const_curv_conformal: a must be non-zero");
            GeometryPair p = conformal_pair(a.even_dim(), mu, s);
            return entry(a, "Constant curvature metric, conformal chart", p.metric, p,
                         {sectional(mu), einstein(mu), killing(), condition_a(s, mu), condition_b(mu)});
        });

    add("const_curv_projective", "Gnomonic chart of the constant curvature metric with Killing form a<Jx,y>/(1+mu|x|^2)",
        {{"n", 4, "even dimension"}, {"mu", 1, "sectional curvature"}, {"a", 1, "Killing form scale"}},
        [](const Args& a) {
            const double mu = a("mu"), s = a("a");
            if (s == 0.0) throw ParamError("const_curv_projective: a must be non-zero");
            GeometryPair p = projective_pair(a.even_dim(), mu, s);
            return entry(a, "Constant curvature metric, projective chart", p.metric, p,
                         {sectional(mu), einstein(mu), killing(), condition_a(s, mu), condition_b(mu)});
        });

    add("cartan_maurer_s3", "dr^2 + r^2 (sigma_1^2 + sigma_2^2 + sigma_3^2) from the left-invariant S^3 coframe, beta = r^2 sigma_1",
        {}, [](const Args& a) {
            GeometryPair p = frame_pair(4, s3_frame, "cartan_maurer_s3");
            return entry(a, "Flat R^4 rebuilt from the S^3 coframe", p.metric, p,
                         {einstein(0), sectional(0), killing(), condition_a(1, 0), t00_alpha2(), rank(4)});
        });

    add("s7_frame", "dr^2 + r^2 (sigma_1^2 + ... + sigma_7^2) from the global S^7 frame, beta = r^2 sigma_1", {},
        [](const Args& a) {
            GeometryPair p = frame_pair(8, s7_frame, "s7_frame");
            return entry(a, "Flat R^8 rebuilt from the S^7 frame", p.metric, p,
                         {einstein(0), sectional(0), killing(), condition_a(1, 0), t00_alpha2(), rank(8)});
        });

    add("eguchi_hanson", "(1 + F r^-4 - mubar r^2/2)^-1 dr^2 + (1 + F r^-4 - mubar r^2/2) r^2 sigma_1^2 + r^2 (sigma_2^2 + sigma_3^2)",
        {{"F", 1, "Eguchi-Hanson parameter"}, {"mubar", 0, "Ricci constant"}}, [](const Args& a) {
            return entry(a, "Eguchi-Hanson type Einstein metrics on R^4",
                         warped_einstein_metric(4, 0.0, a("F"), a("mubar")), std::nullopt, {einstein(a("mubar"))});
        });

    add("warped_einstein", "Warped Einstein metric from the general solution radicand",
        {{"n", 4, "4 or 8"}, {"E", 8, "E"}, {"F", 0.0625, "F"}, {"mubar", -4, "Ricci constant"}}, [](const Args& a) {
            return entry(a, "Warped Einstein metric with a circle direction",
                         warped_einstein_metric(a.dim(), a("E"), a("F"), a("mubar")), std::nullopt,
                         {einstein(a("mubar"))});
        });

    add("pedersen", "Pedersen metric on the unit ball, radius t = |x|", {{"m", 1, "Pedersen parameter, m >= -1"}},
        [](const Args& a) {
            const double m = a("m");
            if (m < -1.0) throw ParamError("pedersen: m must be >= -1");
            RadialProfile prof;
            prof.psi = [m](const Jet& t) {
                const Jet t2 = square(t);
                return (1.0 + m * t2) / ((1.0 + m * square(t2)) * square(1.0 - t2));
            };
            prof.phi = [m](const Jet& t) {
                const Jet t2 = square(t);
                return t2 * (1.0 + m * square(t2)) / ((1.0 + m * t2) * square(1.0 - t2));
            };
            prof.rest = [m](const Jet& t) {
                const Jet t2 = square(t);
                return t2 * (1.0 + m * t2) / square(1.0 - t2);
            };
            MetricField g = warped_metric(4, prof, Domain::shell(4, 0.1, 0.9), "pedersen");
            g.declared_mu = -4.0;
            return entry(a, "Pedersen metrics (self-dual Einstein on the ball)", g, std::nullopt, {einstein(-4)});
        });

    add("taub_nut", "(t^2 + m) dt^2 + m^2 t^2/(t^2 + m) sigma_1^2 + t^2 (t^2 + m)(sigma_2^2 + sigma_3^2)",
        {{"m", 1, "NUT parameter, m > 0"}}, [](const Args& a) {
            const double m = a("m");
            if (!(m > 0.0)) throw ParamError("taub_nut: m must be positive");
            RadialProfile prof;
            prof.psi = [m](const Jet& t) { return square(t) + m; };
            prof.phi = [m](const Jet& t) { return m * m * square(t) / (square(t) + m); };
            prof.rest = [m](const Jet& t) { return square(t) * (square(t) + m); };
            MetricField g = warped_metric(4, prof, Domain::shell(4, 0.1, 2.0), "taub_nut");
            g.declared_mu = 0.0;
            return entry(a, "Hawking Taub-NUT metric", g, std::nullopt, {einstein(0)});
        });

    add("hawking_deformed", "Ricci-flat deformation of the flat symplectic pair with Delta = C^2/(C + D b^2)^2",
        {{"C", 1, "non-zero"}, {"D", 1, "non-zero"}}, [](const Args& a) {
            const SolutionFamily f = family("hawking", {{"C", a("C")}, {"D", a("D")}});
            const GeometryPair base = symplectic_pair(4, 1.0);
            GeometryPair p = deformed(base, f.profile, 0.0, 1.5);
            return entry(a, "Hawking Taub-NUT as a deformation of flat space", p.metric, p, {einstein(0)});
        });

    add("general_eh", "Ricci-flat general Eguchi-Hanson metric on R^n from the symplectic pair (C = 1, D = mu)",
        {{"n", 4, "even dimension >= 4"}, {"mu", 1, "positive"}}, [](const Args& a) {
            const int n = a.even_dim();
            const double mu = a("mu");
            if (!(mu > 0.0)) throw ParamError("general_eh: mu must be positive");
            if (n < 4) throw ParamError("general_eh: n must be at least 4");
            const SolutionFamily f = family("general_eh", {{"n", static_cast<double>(n)}, {"C", 1.0}, {"D", mu}});
            const double bolt = std::pow(1.0 / mu, 1.0 / n);  // |x| where Delta = 0
            const double outer = std::max(1.5, 1.6 * bolt);
            GeometryPair base = symplectic_pair(n, 1.0);
            base.metric.domain = Domain::shell(n, -1.0, outer);
            base.oneform.domain = base.metric.domain;
            GeometryPair p = deformed(base, f.profile, std::sqrt(f.lo), outer);
            return entry(a, "Generalised Eguchi-Hanson metric", p.metric, p, {einstein(0)});
        });

    auto fs_like = [](const Args& a, bool bergmann) {
        const int n = a.even_dim();
        const double mu = a("mu");
        if (bergmann ? !(mu < 0.0) : !(mu > 0.0)) {
            throw ParamError(std::string(bergmann ? "bergmann: mu must be negative" : "fubini_study: mu must be positive"));
        }
        const SolutionFamily f = family(
            "fs_bergmann", {{"n", static_cast<double>(n)}, {"mu", mu}, {"a", 1.0}, {"C", 1.0}, {"D", 0.0},
                            {"b2_lo", 1e-4}, {"b2_hi", bergmann ? 40.0 : 0.98 / mu}});
        GeometryPair base = conformal_pair(n, mu, 1.0);
        // Southern chart |x|^2 < 1/mu for mu > 0; the equator tube is cut by b2_hi.
        const double outer = bergmann ? 1.0 / std::sqrt(-mu) - 0.05 : 1.0 / std::sqrt(mu);
        base.metric.domain = base.metric.domain.intersect(Domain::shell(n, -1.0, outer));
        base.oneform.domain = base.metric.domain;
        GeometryPair p = deformed(base, f.profile, 0.0, outer);
        return entry(a, bergmann ? "Bergmann metric sqrt(alpha^2 - mu beta^2)" : "Fubini-Study metric sqrt(alpha^2 - mu beta^2)",
                     p.metric, p, {einstein((n + 2.0) / (n - 1.0) * mu)});
    };
    add("fubini_study", "sqrt(alpha^2 - mu beta^2) on the round chart; Ricci constant (n+2)/(n-1) mu",
        {{"n", 4, "even dimension"}, {"mu", 1, "positive curvature of the round metric"}},
        [fs_like](const Args& a) { return fs_like(a, false); });
    add("bergmann", "sqrt(alpha^2 - mu beta^2) on the hyperbolic ball; Ricci constant (n+2)/(n-1) mu",
        {{"n", 4, "even dimension"}, {"mu", -1, "negative curvature of the hyperbolic metric"}},
        [fs_like](const Args& a) { return fs_like(a, true); });

    add("fs_warped", "(1 - mu t^2)^-1 dt^2 + (1 - mu t^2) t^2 sigma_1^2 + t^2 (sigma_2^2 + ...)",
        {{"n", 4, "even dimension"}, {"mu", 1, "non-zero"}}, [](const Args& a) {
            const int n = a.even_dim();
            const double mu = a("mu");
            if (mu == 0.0) throw ParamError("fs_warped: mu must be non-zero");
            RadialProfile prof;
            prof.psi = [mu](const Jet& t) { return 1.0 / (1.0 - mu * square(t)); };
            prof.phi = [mu](const Jet& t) { return (1.0 - mu * square(t)) * square(t); };
            prof.rest = [](const Jet& t) { return square(t); };
            const double outer = mu > 0.0 ? 1.0 / std::sqrt(mu) - 0.05 : 2.0;
            MetricField g = warped_metric(n, prof, sampling_shell(n, 0.1, outer), "fs_warped");
            return entry(a, "Fubini-Study or Bergmann metric in warped form", g, std::nullopt,
                         {einstein((n + 2.0) / (n - 1.0) * mu)});
        });

    add("bgpp_degenerate", "Belinskii-Gibbons-Page-Pope metric with two equal parameters (Eguchi-Hanson alias)",
        {{"m1", 0, "m1"}, {"m2", 0, "m2"}, {"m3", 1, "m3"}}, [](const Args& a) {
            const double m1 = a("m1"), m2 = a("m2"), m3 = a("m3");
            if ((m1 - m2) * (m2 - m3) * (m3 - m1) != 0.0) {
                throw ParamError("bgpp_degenerate: two of m1, m2, m3 must coincide");
            }
            // The odd parameter goes with the circle direction sigma_1.
            const double odd = m1 == m2 ? m3 : (m2 == m3 ? m1 : m2);
            const double pair = m1 == m2 ? m1 : (m2 == m3 ? m2 : m1);
            auto omega = [odd, pair](const Jet& r) {
                const Jet inv4 = 1.0 / ipow(r, 4);
                return sqrt((1.0 - odd * inv4) * square(1.0 - pair * inv4));
            };
            RadialProfile prof;
            prof.psi = [omega](const Jet& r) { return 1.0 / omega(r); };
            prof.phi = [omega, odd](const Jet& r) { return omega(r) * square(r) / (1.0 - odd / ipow(r, 4)); };
            prof.rest = [omega, pair](const Jet& r) { return omega(r) * square(r) / (1.0 - pair / ipow(r, 4)); };
            const double root = std::pow(std::max({0.0, odd, pair}), 0.25);
            const double inner = std::max(0.1, root + 0.05);
            MetricField g = warped_metric(4, prof, Domain::shell(4, inner, inner + 2.0), "bgpp_degenerate");
            g.declared_mu = 0.0;
            return entry(a, "BGPP metric with a repeated parameter", g, std::nullopt, {einstein(0)});
        });

    add("warped_custom", "psi dr^2 + phi sigma_1^2 + rest (sigma_2^2 + ...) with power laws c r^k",
        {{"n", 4, "even dimension"},
         {"psi_c", 1, "psi coefficient"},
         {"psi_k", 0, "psi exponent"},
         {"phi_c", 1, "phi coefficient"},
         {"phi_k", 2, "phi exponent"},
         {"rest_c", 1, "rest coefficient"},
         {"rest_k", 2, "rest exponent"},
         {"r_lo", 0.2, "inner radius"},
         {"r_hi", 2, "outer radius"}},
        [](const Args& a) {
            const int n = a.even_dim();
            auto power_law = [](double c, double k) {
                if (!(c > 0.0)) throw ParamError("warped_custom: coefficients must be positive");
                return std::function<Jet(const Jet&)>([c, k](const Jet& r) { return c * pow(r, k); });
            };
            RadialProfile prof{power_law(a("psi_c"), a("psi_k")), power_law(a("phi_c"), a("phi_k")),
                               power_law(a("rest_c"), a("rest_k"))};
            if (!(a("r_lo") > 0.0 && a("r_hi") > a("r_lo"))) throw ParamError("warped_custom: need 0 < r_lo < r_hi");
            MetricField g = warped_metric(n, prof, sampling_shell(n, a("r_lo"), a("r_hi")), "warped_custom");
            return entry(a, "User-specified cohomogeneity-one metric", g, std::nullopt, {});
        });

    add("conformal_deformed", "Constant curvature pair deformed by Delta = 1, rho = -ln(C + D sqrt(a^2 - mu b^2))",
        {{"n", 4, "even dimension"}, {"mu", 1, "non-zero curvature"}, {"a", 1, "Killing form scale"},
         {"C", 1, "C"}, {"D", 0.2, "D"}},
        [](const Args& a) {
            const int n = a.even_dim();
            const double mu = a("mu"), s = a("a");
            const SolutionFamily f = family(
                "conformal_curved", {{"n", static_cast<double>(n)}, {"mu", mu}, {"a", s}, {"C", a("C")}, {"D", a("D")},
                                     {"b2_lo", 1e-4}, {"b2_hi", mu > 0 ? 0.98 * s * s / mu : 40.0}});
            GeometryPair base = conformal_pair(n, mu, s);
            const double outer = mu > 0.0 ? 1.0 / std::sqrt(mu) : 1.0 / std::sqrt(-mu) - 0.05;
            base.metric.domain = base.metric.domain.intersect(Domain::shell(n, -1.0, outer));
            base.oneform.domain = base.metric.domain;
            GeometryPair p = deformed(base, f.profile, 0.0, outer);
            return entry(a, "Conformally deformed constant curvature metric", p.metric, p,
                         {sectional(f.mubar), einstein(f.mubar)});
        });

    return r;
}

const std::vector<Recipe>& registry() {
    static const std::vector<Recipe> r = recipes();
    return r;
}

}  // namespace

std::vector<CatalogItem> catalog() {
    std::vector<CatalogItem> out;
    for (const auto& rec : registry()) {
        CatalogItem item = rec.item;
        item.expectations = rec.make(Args(rec.item, {})).expectations;
        out.push_back(std::move(item));
    }
    return out;
}

GalleryEntry build(const std::string& id, const Params& params) {
    for (const auto& rec : registry()) {
        if (rec.item.id == id) return rec.make(Args(rec.item, params));
    }
    throw ParamError("unknown gallery id '" + id + "'");
}

}  // namespace betaforge
