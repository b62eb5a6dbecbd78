#include <algorithm>
#include <cmath>

#include "betaforge/errors.hpp"
#include "betaforge/gallery.hpp"

namespace betaforge {

namespace {

Jet norm2(std::span<const Jet> x) {
    Jet s(0.0);
    for (const auto& v : x) s += v * v;
    return s;
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

void require_even(int n, const char* who) {
    if (n < 2 || n % 2 != 0) throw DimensionError(std::string(who) + ": dimension must be even and >= 2");
}

Domain curvature_ball(int n, double mu, double tube, double default_radius) {
    if (mu < 0.0) return sampling_shell(n, -1.0, 1.0 / std::sqrt(-mu) - tube);
    return sampling_shell(n, -1.0, default_radius);
}

}  // namespace

Domain sampling_shell(int n, double inner, double outer) {
    Domain d = Domain::shell(n, inner, outer);
    if (n > 4) {
        const double in = std::max(inner, 0.0);
        // Uniform cube of half-width h has mean |x|^2 = n h^2 / 3.
        const double h = std::min(outer, std::sqrt(3.0 * (in * in + outer * outer) / (2.0 * n)));
        d.lo.assign(static_cast<std::size_t>(n), -h);
        d.hi.assign(static_cast<std::size_t>(n), h);
    }
    return d;
}

MetricField euclidean(int n) {
    if (n < 1) throw ParamError("euclidean: dimension must be positive");
    MetricField m;
    m.dim = n;
    m.name = "euclidean";
    m.domain = sampling_shell(n, -1.0, 10.0);
    m.declared_mu = 0.0;
    m.eval = [n](std::span<const Jet>) {
        JetMatrix a(n);
        for (int i = 0; i < n; ++i) a(i, i) = Jet(1.0);
        return a;
    };
    return m;
}

GeometryPair symplectic_pair(int n, double a) {
    require_even(n, "symplectic_pair");
    OneFormField b;
    b.dim = n;
    b.name = "symplectic";
    b.domain = sampling_shell(n, -1.0, 10.0);
    b.eval = [a](std::span<const Jet> x) {
        auto v = complex_structure<Jet>(x);
        for (auto& c : v) c *= a;
        return v;
    };
    MetricField g = euclidean(n);
    g.domain = sampling_shell(n, -1.0, 1.5);
    b.domain = g.domain;
    return make_pair(std::move(g), std::move(b), "symplectic_pair");
}

GeometryPair conformal_pair(int n, double mu, double a) {
    require_even(n, "conformal_pair");
    const Domain dom = curvature_ball(n, mu, 0.05, 2.0);
    MetricField g;
    g.dim = n;
    g.name = "const_curv_conformal";
    g.domain = dom;
    g.declared_mu = mu;
    g.eval = [n, mu](std::span<const Jet> x) {
        const Jet f = 4.0 / square(1.0 + mu * norm2(x));
        JetMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = f;
        return m;
    };
    OneFormField b;
    b.dim = n;
    b.name = "conformal_killing";
    b.domain = dom;
    b.eval = [mu, a](std::span<const Jet> x) {
        const Jet f = 4.0 * a / square(1.0 + mu * norm2(x));
        auto v = complex_structure<Jet>(x);
        for (auto& c : v) c = c * f;
        return v;
    };
    GeometryPair p = make_pair(std::move(g), std::move(b), "const_curv_conformal");
    p.s0sq_over_gap = [mu, a](std::span<const double> x, std::span<const double> y) {
        double xy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) xy += x[i] * y[i];
        return 16.0 * a * a * xy * xy / std::pow(1.0 + mu * norm2(x), 4);
    };
    return p;
}

GeometryPair projective_pair(int n, double mu, double a) {
    require_even(n, "projective_pair");
    const Domain dom = curvature_ball(n, mu, 0.05, 2.0);
    MetricField g;
    g.dim = n;
    g.name = "const_curv_projective";
    g.domain = dom;
    g.declared_mu = mu;
    g.eval = [n, mu](std::span<const Jet> x) {
        const Jet w = 1.0 + mu * norm2(x);
        const Jet inv = 1.0 / square(w);
        JetMatrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Jet v = -mu * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
                if (i == j) v += w;
                m(i, j) = v * inv;
            }
        return m;
    };
    OneFormField b;
    b.dim = n;
    b.name = "projective_killing";
    b.domain = dom;
    b.eval = [mu, a](std::span<const Jet> x) {
        const Jet f = a / (1.0 + mu * norm2(x));
        auto v = complex_structure<Jet>(x);
        for (auto& c : v) c = c * f;
        return v;
    };
    return make_pair(std::move(g), std::move(b), "const_curv_projective");
}

GeometryPair generic_pair(int n) {
    if (n < 2) throw ParamError("generic_pair: dimension must be >= 2");
    const Domain dom = sampling_shell(n, -1.0, 1.0);
    MetricField g;
    g.dim = n;
    g.name = "generic";
    g.domain = dom;
    g.eval = [n](std::span<const Jet> x) {
        JetMatrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
                Jet v = 0.1 * x[ui] * x[uj] + 0.05 * sin(x[static_cast<std::size_t>((i + j) % n)]);
                if (i == j) v += 1.0 + 0.2 * x[ui] * x[ui];
                a(i, j) = v;
                a(j, i) = v;
            }
        return a;
    };
    OneFormField b;
    b.dim = n;
    b.name = "generic_form";
    b.domain = dom;
    b.eval = [n](std::span<const Jet> x) {
        JetVec v;
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            v.push_back(1.2 * x[static_cast<std::size_t>((i + 1) % n)] -
                        0.8 * x[ui] * x[static_cast<std::size_t>((i + 2) % n)] + 0.4 * cos(x[ui]));
        }
        return v;
    };
    return make_pair(std::move(g), std::move(b), "generic_pair");
}

GeometryPair perturbed_pair(const GeometryPair& p, double eps) {
    if (p.dim() < 2) throw DimensionError("perturbed_pair: dimension must be >= 2");
    GeometryPair out = p;
    const OneFormField base = p.oneform;
    out.oneform.name = base.name + "+perturbed";
    out.oneform.eval = [base, eps](std::span<const Jet> x) {
        JetVec v = base.eval(x);
        v[0] += eps * x[0] * x[0];
        v[1] += eps * x[0] * x[1];
        return v;
    };
    out.s0sq_over_gap.reset();
    out.name = p.name + "+perturbed";
    return out;
}

MetricField warped_metric(int n, RadialProfile prof, Domain domain, std::string name) {
    require_even(n, "warped_metric");
    MetricField m;
    m.dim = n;
    m.domain = std::move(domain);
    m.name = std::move(name);
    m.eval = [n, prof = std::move(prof)](std::span<const Jet> x) {
        const Jet r2 = norm2(x);
        const Jet r = sqrt(r2);
        const Jet psi = prof.psi(r), phi = prof.phi(r), rest = prof.rest(r);
        const Jet inv_r2 = 1.0 / r2;
        const Jet c_iso = rest * inv_r2;
        const Jet c_rad = (psi - c_iso) * inv_r2;
        const Jet c_sig = (phi - rest) * inv_r2 * inv_r2;
        const auto jx = complex_structure<Jet>(x);
        JetMatrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
                Jet v = c_rad * x[ui] * x[uj] + c_sig * jx[ui] * jx[uj];
                if (i == j) v += c_iso;
                a(i, j) = v;
                a(j, i) = v;
            }
        return a;
    };
    return m;
}

OneFormField warped_circle_form(int n, std::function<Jet(const Jet& r)> phi, Domain domain) {
    require_even(n, "warped_circle_form");
    OneFormField b;
    b.dim = n;
    b.domain = std::move(domain);
    b.name = "circle_dual";
    b.eval = [phi = std::move(phi)](std::span<const Jet> x) {
        const Jet r2 = norm2(x);
        const Jet f = phi(sqrt(r2)) / r2;
        auto v = complex_structure<Jet>(x);
        for (auto& c : v) c = c * f;
        return v;
    };
    return b;
}

MetricField radial_pullback(const MetricField& g, std::function<Jet(const Jet& r)> radius_map, Domain domain,
                            std::string name) {
    MetricField m;
    m.dim = g.dim;
    m.domain = std::move(domain);
    m.name = std::move(name);
    const MetricField base = g;
    m.eval = [base, radius_map = std::move(radius_map)](std::span<const Jet> x) {
        const int n = base.dim;
        int order = 0;
        std::vector<double> x0;
        for (const auto& v : x) {
            x0.push_back(v.value());
            if (!v.is_scalar()) order = std::max(order, v.order());
        }
        if (order + 1 > kMaxJetOrder) throw OrderError("radial_pullback: needs one order of headroom");
        const auto xs = seed(x0, order + 1);
        const Jet r = sqrt(norm2(xs));
        const Jet scale = radius_map(r) / r;
        std::vector<Jet> y;
        for (const auto& v : xs) y.push_back(v * scale);
        const JetMatrix gy = base.eval(y);
        JetMatrix jac(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) jac(i, j) = y[static_cast<std::size_t>(i)].derivative(j);
        JetMatrix out(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet acc(0.0);
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q) acc += jac(p, i) * gy(p, q) * jac(q, j);
                acc = acc.truncated(order);
                out(i, j) = acc;
                out(j, i) = acc;
            }
        return out;
    };
    return m;
}

std::vector<std::vector<double>> s3_frame(std::span<const double> x) {
    if (x.size() != 4) throw DimensionError("s3_frame: needs a point of R^4");
    const double r2 = norm2(x);
    const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3];
    std::vector<std::vector<double>> f = {
        {x2, -x1, x4, -x3},
        {x3, -x4, -x1, x2},
        {x4, x3, -x2, -x1},
    };
    for (auto& row : f)
        for (auto& v : row) v /= r2;
    return f;
}

std::vector<std::vector<double>> s7_frame(std::span<const double> x) {
    if (x.size() != 8) throw DimensionError("s7_frame: needs a point of R^8");
    const double r2 = norm2(x);
    const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3], x5 = x[4], x6 = x[5], x7 = x[6], x8 = x[7];
    std::vector<std::vector<double>> f = {
        {-x2, x1, -x4, x3, -x6, x5, x8, -x7},
        {-x3, x4, x1, -x2, -x7, -x8, x5, x6},
        {-x4, -x3, x2, x1, -x8, x7, -x6, x5},
        {-x5, x6, x7, x8, x1, -x2, -x3, -x4},
        {-x6, -x5, x8, -x7, x2, x1, x4, -x3},
        {-x7, -x8, -x5, x6, x3, -x4, x1, x2},
        {-x8, x7, -x6, -x5, x4, x3, -x2, x1},
    };
    for (auto& row : f)
        for (auto& v : row) v /= r2;
    return f;
}

}  // namespace betaforge
