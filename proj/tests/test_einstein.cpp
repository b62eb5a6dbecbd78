#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "betaforge/curvature.hpp"
#include "betaforge/einstein.hpp"
#include "betaforge/errors.hpp"
#include "test_util.hpp"

using namespace betaforge;

namespace {

ODEPoint random_point(std::mt19937_64& rng, int i) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ODEPoint p;
    p.b2 = 1.0 + 0.5 * U(rng) + 0.6;
    p.delta = 1.2 + U(rng);
    p.delta1 = U(rng);
    p.delta2 = U(rng);
    p.rho = U(rng);
    p.rho1 = U(rng);
    p.rho2 = U(rng);
    p.n = 3 + i % 6;
    p.mu = 0.3 * U(rng);
    p.mubar = U(rng);
    p.a = 1.0 + 0.3 * U(rng);
    return p;
}

double einstein_residual(const MetricField& g, double mubar, int count, std::uint64_t seed) {
    double worst = 0;
    for (const auto& s : testutil::points(g.domain, count, seed, 200)) {
        const CurvatureBundle cb(g, s.x);
        worst = std::max(worst, (cb.ricci() - (g.dim - 1) * mubar * cb.metric()).norm() / cb.metric().norm());
    }
    return worst;
}

// Compare Delta, rho and their first derivatives of two families on a shared grid.
double family_distance(const SolutionFamily& a, const SolutionFamily& b, double lo, double hi) {
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        const double t = lo + (hi - lo) * (i + 0.5) / 50.0;
        const FactorDerivs x = a.profile.derivs(t), y = b.profile.derivs(t);
        worst = std::max({worst, std::abs(x.delta - y.delta), std::abs(x.rho - y.rho), std::abs(x.delta1 - y.delta1),
                          std::abs(x.rho1 - y.rho1)});
    }
    return worst;
}

SolutionFamily anchored(GeneralSolverConfig cfg, const SolutionFamily& ref) {
    cfg.anchor_b2 = 0.5 * (cfg.b2_lo + cfg.b2_hi);
    cfg.anchor_rho = ref.profile.derivs(cfg.anchor_b2).rho;
    cfg.mubar = ref.mubar;
    return solve_general(cfg);
}

}  // namespace

TEST_CASE("coeffs_E: the trivial solution has vanishing coefficients") {
    for (double rho : {0.0, 0.4, -0.3}) {
        ODEPoint p;
        p.b2 = 0.7;
        p.rho = rho;
        p.n = 5;
        p.mu = 0.8;
        p.mubar = std::exp(-2.0 * rho) * p.mu;
        for (const double e : coeffs_E(p, 1.3, -0.4)) CHECK(std::abs(e) < 1e-14);
    }
}

TEST_CASE("coeffs_E: Ricci-flat 4d family solves the reduced system") {
    const SolutionFamily f = closed_form_profile("ricciflat4d", {{"C", 1.0}, {"D", 1.0}});
    for (double t : f.grid_b2(50))
        for (const double e : coeffs_E_reduced(f.ode_point(t))) CHECK(std::abs(e) < 1e-9);
}

TEST_CASE("coeffs_E: s_0|0 coefficient") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const ODEPoint p = random_point(rng, i);
        const double want = -p.delta1 / p.delta - 2.0 * (p.n - 2) * p.rho1;
        CHECK(std::abs(coeffs_E(p, 0.3, -0.2)[5] - want) < 1e-13);
        CHECK(std::abs(coeffs_E_reduced(p)[3] - want) < 1e-13);
    }
}

TEST_CASE("ODEPoint validation") {
    ODEPoint p;
    p.delta = -0.1;
    CHECK_THROWS_AS(p.validate(), ParamError);
    p.delta = 1.0;
    p.n = 2;
    CHECK_THROWS_AS(p.validate(), ParamError);
    p.n = 4;
    p.a = 0.0;
    CHECK_THROWS_AS(p.validate(), ParamError);
}

TEST_CASE("XYZT: conformal and stretch families") {
    const SolutionFamily conf = closed_form_profile("conformal_flat", {{"C", 1.0}, {"D", 0.7}, {"a", 1.3}});
    CHECK(conf.mubar == doctest::Approx(4.0 * 0.7 * 1.3 * 1.3));
    for (double t : conf.grid_b2(50)) {
        const XYZT c = coeffs_XYZT(conf.ode_point(t));
        CHECK(std::max({std::abs(c.x), std::abs(c.y), std::abs(c.z), std::abs(c.t)}) < 1e-9);
    }
    const double n = 6, mu = 0.5, rho0 = 0.2;
    const SolutionFamily st = closed_form_profile("stretch_fs", {{"n", n}, {"mu", mu}, {"a", 1.0}, {"rho0", rho0}});
    CHECK(st.mubar == doctest::Approx((n + 2) / (n - 1) * std::exp(-2.0 * rho0) * mu).epsilon(1e-12));
    for (double t : st.grid_b2(50)) {
        const XYZT c = coeffs_XYZT(st.ode_point(t));
        CHECK(std::max({std::abs(c.x), std::abs(c.y), std::abs(c.z), std::abs(c.t)}) < 1e-9);
    }
}

TEST_CASE("XYZT identity at random points") {
    std::mt19937_64 rng(2024);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) worst = std::max(worst, std::abs(xyzt_identity_residual(random_point(rng, i))));
    CHECK(worst < 1e-11);
}

TEST_CASE("XYZT refuses a vanishing gap") {
    ODEPoint p;
    p.b2 = 1.0;
    p.mu = 1.0;
    p.a = 1.0;
    CHECK_THROWS_AS(coeffs_XYZT(p), LimitError);
}

TEST_CASE("closed-form families") {
    const SolutionFamily rf = closed_form_profile("ricciflat4d", {{"C", 1.0}, {"D", 1.0}});
    CHECK(rf.mubar == 0.0);
    for (double t : {0.3, 1.0, 2.5}) {
        const FactorDerivs d = rf.profile.derivs(t);
        CHECK(d.delta == doctest::Approx(1.0 / ((1.0 + t) * (1.0 + t))).epsilon(1e-14));
        CHECK(d.rho == doctest::Approx(0.5 * std::log(1.0 + t)).epsilon(1e-14));
    }
    for (int n : {4, 6}) {
        const SolutionFamily fs = closed_form_profile("fs_bergmann", {{"n", double(n)}, {"mu", 1.0}, {"C", 1.0}, {"D", 0.0}});
        CHECK(fs.mubar == doctest::Approx(double(n + 2) / (n - 1)).epsilon(1e-14));
        // kappa = mu with a = 1: alphabar^2 = alpha^2 - mu beta^2.
        CHECK(fs.profile.derivs(0.3).kappa == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(fs.profile.derivs(0.3).rho == doctest::Approx(0.0));
    }
    CHECK(closed_form_profile("general_eh", {{"C", 1.0}, {"D", 2.0}}).mubar == 0.0);
}

TEST_CASE("every family passes the X = T = 0 gate") {
    for (const auto& id : family_ids()) {
        INFO(id);
        const SolutionFamily f = closed_form_profile(id);
        CHECK(f.gate_residual(50) <= 1e-8);
        CHECK(f.lo < f.hi);
    }
    // Variants used elsewhere.
    const std::vector<std::pair<std::string, Params>> variants = {
        {"elliptic_4d", {{"case", 1.0}}},
        {"elliptic_4d", {{"case", 2.0}, {"C", std::sqrt(0.5)}, {"D", -0.5}}},
        {"elliptic_4d", {{"case", 3.0}}},
        {"general_eh", {{"n", 6.0}}},
        {"jacobi_eh", {{"degenerate", 1.0}}},
        {"fs_bergmann", {{"mu", 0.0}, {"C", 1.0}, {"D", 0.25}}},
        {"conformal_curved", {{"mu", -1.0}, {"D", 0.3}}},
    };
    for (const auto& [id, p] : variants) {
        INFO(id);
        CHECK(closed_form_profile(id, p).gate_residual(50) <= 1e-8);
    }
}

TEST_CASE("family parameter errors") {
    CHECK_THROWS_AS(closed_form_profile("no_such_family"), ParamError);
    CHECK_THROWS_AS(closed_form_profile("ricciflat4d", {{"C", 0.0}}), ParamError);
    CHECK_THROWS_AS(closed_form_profile("conformal_curved", {{"mu", 0.0}}), ParamError);
    CHECK_THROWS_AS(closed_form_profile("ricciflat4d", {{"bogus", 1.0}}), ParamError);
}

TEST_CASE("Jacobi elliptic functions") {
    for (double u : {-1.3, 0.0, 0.4, 2.2}) {
        const JacobiValues j0 = jacobi(u, 0.0), j1 = jacobi(u, 1.0);
        CHECK(std::abs(j0.sn - std::sin(u)) < 1e-12);
        CHECK(std::abs(j0.cn - std::cos(u)) < 1e-12);
        CHECK(std::abs(j1.sn - std::tanh(u)) < 1e-12);
        CHECK(std::abs(j1.cn - 1.0 / std::cosh(u)) < 1e-12);
        for (double m : {0.1, 0.5, 0.9}) {
            const JacobiValues j = jacobi(u, m);
            CHECK(std::abs(j.sn * j.sn + j.cn * j.cn - 1.0) < 1e-12);
            CHECK(std::abs(j.dn * j.dn + m * j.sn * j.sn - 1.0) < 1e-12);
            // d sn/du = cn dn
            const Jet s = jacobi_sn(Jet::variable(u, 0, 1, 3), m);
            CHECK(std::abs(s.value() - j.sn) < 1e-12);
            CHECK(std::abs(s.d(0) - j.cn * j.dn) < 1e-11);
            const Jet c = jacobi_cn(Jet::variable(u, 0, 1, 2), m);
            CHECK(std::abs(c.d(0) + j.sn * j.dn) < 1e-11);
        }
    }
    CHECK(std::abs(elliptic_k(0.0) - std::numbers::pi / 2) < 1e-14);
    // sn(K) = 1
    CHECK(std::abs(jacobi(elliptic_k(0.7), 0.7).sn - 1.0) < 1e-12);
}

TEST_CASE("polynomial roots") {
    const auto r = real_polynomial_roots({1.0, -6.0, 11.0, -6.0});
    REQUIRE(r.size() == 3);
    CHECK(std::abs(r[0] - 1.0) < 1e-12);
    CHECK(std::abs(r[1] - 2.0) < 1e-12);
    CHECK(std::abs(r[2] - 3.0) < 1e-12);
    CHECK(polynomial_roots({1.0, 0.0, 1.0}).size() == 2);
    CHECK_THROWS_AS(real_polynomial_roots({1.0, 0.0, 1.0}), RootError);
    // Vieta on a quartic
    const auto q = real_polynomial_roots({2.0, -3.0, -11.0, 3.0, 9.0});
    double sum = 0, prod = 1;
    for (double v : q) {
        sum += v;
        prod *= v;
    }
    CHECK(std::abs(sum - 1.5) < 1e-10);
    CHECK(std::abs(prod - 4.5) < 1e-10);
}

TEST_CASE("general solver agrees with the closed forms") {
    GeneralSolverConfig eh;
    eh.E = 0.0;
    eh.F = -4.0;
    eh.b2_lo = 1.25;
    eh.b2_hi = 4.0;
    const SolutionFamily geh = closed_form_profile("general_eh", {{"C", 1.0}, {"D", 1.0}});
    CHECK(family_distance(anchored(eh, geh), geh, eh.b2_lo, eh.b2_hi) < 1e-7);

    GeneralSolverConfig fs;
    fs.E = 0.0;
    fs.F = 0.0;
    fs.b2_lo = 0.3;
    fs.b2_hi = 2.0;
    const SolutionFamily fsb = closed_form_profile("fs_bergmann", {{"mu", 0.0}, {"C", 1.0}, {"D", 0.25}});
    CHECK(fsb.mubar == doctest::Approx(2.0));
    CHECK(family_distance(anchored(fs, fsb), fsb, fs.b2_lo, fs.b2_hi) < 1e-7);

    GeneralSolverConfig hk;
    hk.E = 4.0;
    hk.F = -0.5;
    const SolutionFamily hw = closed_form_profile("hawking", {{"C", 1.0}, {"D", 1.0}});
    hk.b2_lo = std::max(hw.lo, 0.5) + 0.05;
    hk.b2_hi = std::min(hw.hi, 4.0) - 0.05;
    CHECK(family_distance(anchored(hk, hw), hw, hk.b2_lo, hk.b2_hi) < 1e-7);

    // Solver output meets the gate.
    CHECK(solve_general(eh).gate_residual(50) < 1e-7);
}

TEST_CASE("general solver errors carry the offending varrho") {
    GeneralSolverConfig c;
    c.E = 0.0;
    c.F = -4.0;
    c.b2_lo = 0.1;
    try {
        solve_general(c);
        FAIL("expected RadicandError");
    } catch (const RadicandError& e) {
        CHECK(std::string(e.what()).find("varrho") != std::string::npos);
    }
    c.n = 5;
    CHECK_THROWS_AS(solve_general(c), ParamError);
}

TEST_CASE("radicand: closed antiderivative cross-check") {
    for (int n : {4, 6})
        for (double v : {0.7, 1.5, 3.0}) {
            const double p = general_radicand(n, 2.0, -0.5, 1.0, 1.0, v);
            CHECK(std::abs(general_radicand_alt(n, 2.0, -0.5, 1.0, 1.0, v) - p) < 1e-10 * (1.0 + std::abs(p)));
        }
}

TEST_CASE("warped Einstein metrics") {
    CHECK(einstein_residual(warped_einstein_metric(4, 0.0, 0.0, 4.0), 4.0, 20, 1) < 1e-6);
    CHECK(einstein_residual(warped_einstein_metric(4, 0.0, 1.0, 0.0), 0.0, 20, 2) < 1e-6);
    const double m = 1.0;
    CHECK(einstein_residual(warped_einstein_metric(4, 4.0 * (m + 1), m / (2.0 * std::pow(m + 1, 3)), -4.0), -4.0, 20,
                            3) < 1e-6);
    CHECK(einstein_residual(warped_einstein_metric(8, 0.0, 1.0, 0.0), 0.0, 5, 4) < 1e-6);
    CHECK_THROWS_AS(warped_einstein_metric(6, 0.0, 1.0, 0.0), ParamError);
}

TEST_CASE("rescaling covariance of the warped form") {
    // (mubar, E, F) -> (k^2 mubar, k^2 E, k^-n F) is the pullback by x -> k x.
    const double k = 2.0;
    struct Case {
        double E, F, mubar, r_lo, r_hi;
    };
    for (const Case& c : {Case{0.0, 1.0, 0.0, 0.5, 2.0}, Case{4.0, -0.5, 0.0, 2.0, 3.0}, Case{0.0, 0.0, 1.0, 0.3, 1.2}}) {
        const MetricField g1 = warped_einstein_metric(4, c.E, c.F, c.mubar, c.r_lo, c.r_hi);
        const MetricField g2 =
            warped_einstein_metric(4, k * k * c.E, c.F / std::pow(k, 4), k * k * c.mubar, c.r_lo / k, c.r_hi / k);
        int compared = 0;
        for (const auto& s : testutil::points(g2.domain, 20, 5, 200)) {
            std::vector<double> kx;
            for (double v : s.x) kx.push_back(k * v);
            if (!g1.domain.contains(kx)) continue;
            CHECK(testutil::rel(g2.value(s.x), g1.value(kx)) < 1e-12);
            ++compared;
        }
        CHECK(compared >= 5);
    }
}
