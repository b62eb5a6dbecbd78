#include <doctest.h>

#include <cmath>
#include <set>

#include "betaforge/curvature.hpp"
#include "betaforge/einstein.hpp"
#include "betaforge/errors.hpp"
#include "betaforge/gallery.hpp"
#include "betaforge/verifier.hpp"
#include "test_util.hpp"

using namespace betaforge;

namespace {

// dr^2 + r^2 sum sigma_i^2 from a frame in Cartesian components.
Eigen::MatrixXd frame_metric(const std::vector<std::vector<double>>& frame, std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd dr(n);
    double r2 = 0;
    for (double v : x) r2 += v * v;
    for (int k = 0; k < n; ++k) dr(k) = x[static_cast<std::size_t>(k)] / std::sqrt(r2);
    Eigen::MatrixXd g = dr * dr.transpose();
    for (const auto& row : frame) {
        const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(row.data(), n);
        g += r2 * s * s.transpose();
    }
    return g;
}

}  // namespace

TEST_CASE("catalog: size, unique ids, buildable defaults") {
    const auto items = catalog();
    CHECK(items.size() >= 14);
    std::set<std::string> ids;
    for (const auto& it : items) {
        ids.insert(it.id);
        CHECK(!it.description.empty());
        const GalleryEntry e = build(it.id);
        CHECK(e.id == it.id);
        CHECK(e.metric.dim > 0);
        CHECK(e.expectations.size() == it.expectations.size());
    }
    CHECK(ids.size() == items.size());
    for (const char* id : {"euclidean", "symplectic_pair", "const_curv_conformal", "const_curv_projective",
                           "cartan_maurer_s3", "s7_frame", "eguchi_hanson", "pedersen", "taub_nut",
                           "hawking_deformed", "general_eh", "fubini_study", "bergmann", "fs_warped",
                           "bgpp_degenerate", "warped_custom"})
        CHECK(ids.count(id) == 1);
    // Listing is deterministic.
    const auto again = catalog();
    REQUIRE(again.size() == items.size());
    for (std::size_t i = 0; i < items.size(); ++i) CHECK(again[i].id == items[i].id);
}

TEST_CASE("every expectation kind is covered by a verifier check") {
    for (const auto& it : catalog())
        for (const auto& ex : it.expectations) {
            INFO(it.id << " " << ex.kind);
            CHECK_NOTHROW(covering_check(ex.kind));
        }
    CHECK_THROWS_AS(covering_check("holonomy"), ParamError);
}

TEST_CASE("every gallery expectation holds at default parameters") {
    SamplingPlan plan;
    plan.seed = 3;
    plan.count = 10;
    plan.budget_factor = 200;
    for (const auto& it : catalog()) {
        const GalleryEntry e = build(it.id);
        for (const auto& ex : e.expectations) {
            INFO(it.id << " " << ex.kind);
            const double tol = ex.kind == "einstein" ? 1e-6 : ex.kind == "sectional" ? 1e-7 : 1e-8;
            const VerificationReport r = check_expectation(e, ex, plan, tol, 1);
            CHECK(r.pass);
        }
    }
}

TEST_CASE("declared expectations of selected entries") {
    auto has = [](const GalleryEntry& e, const std::string& kind) {
        for (const auto& ex : e.expectations)
            if (ex.kind == kind) return true;
        return false;
    };
    const GalleryEntry sym = build("symplectic_pair", {{"n", 4.0}, {"a", 1.0}});
    CHECK(has(sym, "killing"));
    CHECK(has(sym, "condition_a"));
    CHECK(has(sym, "t00_minus_alpha2"));
    const GalleryEntry fs = build("eguchi_hanson", {{"F", 0.0}, {"mubar", 4.0}});
    REQUIRE(has(fs, "einstein"));
    for (const auto& ex : fs.expectations)
        if (ex.kind == "einstein") CHECK(ex.mu == 4.0);
    CHECK(has(build("taub_nut", {{"m", 1.0}}), "einstein"));
}

TEST_CASE("S^3 and S^7 frames reconstruct the flat metric") {
    for (int n : {4, 8}) {
        const Domain d = Domain::shell(n, 0.2, 2.0);
        for (const auto& s : testutil::points(d, 50, 17, 200)) {
            const auto frame = n == 4 ? s3_frame(s.x) : s7_frame(s.x);
            CHECK(frame.size() == static_cast<std::size_t>(n - 1));
            CHECK((frame_metric(frame, s.x) - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("conformal and projective charts are isometric") {
    for (double mu : {1.0, -1.0}) {
        const GeometryPair c = conformal_pair(4, mu, 1.0), p = projective_pair(4, mu, 1.0);
        int compared = 0;
        for (const auto& s : testutil::points(c.domain(), 60, 19, 200)) {
            double r2 = 0;
            for (double v : s.x) r2 += v * v;
            std::vector<double> u;
            for (double v : s.x) u.push_back(2.0 * v / (1.0 - mu * r2));
            if (!p.domain().contains(u)) continue;
            CHECK(std::abs(b_squared(c, s.x) - b_squared(p, u)) < 1e-8 * (1.0 + b_squared(c, s.x)));
            CHECK(std::abs(sectional_curvature(c.metric, s.x, s.y, s.v) -
                           sectional_curvature(p.metric, u, s.y, s.v)) < 1e-8);
            ++compared;
        }
        CHECK(compared >= 10);
    }
}

TEST_CASE("general Eguchi-Hanson matches the warped form at matched radii") {
    const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(4, 0), e1 = Eigen::VectorXd::Unit(4, 1),
                          e2 = Eigen::VectorXd::Unit(4, 2), e3 = Eigen::VectorXd::Unit(4, 3);
    for (double m : {0.5, 1.0, 2.0}) {
        const SolutionFamily f = closed_form_profile("general_eh", {{"C", 1.0}, {"D", m}});
        const GalleryEntry ge = build("general_eh", {{"n", 4.0}, {"mu", m}});
        const GalleryEntry eh = build("eguchi_hanson", {{"F", -4.0 * m}, {"mubar", 0.0}});
        int compared = 0;
        for (double t : f.grid_b2(12)) {
            // Warped radius r^2 = b^2 e^{2 rho}.
            const double r = std::sqrt(t * std::exp(2.0 * f.profile.derivs(t).rho));
            const std::vector<double> x = {std::sqrt(t), 0.0, 0.0, 0.0}, y = {r, 0.0, 0.0, 0.0};
            if (!ge.metric.domain.contains(x) || !eh.metric.domain.contains(y)) continue;
            INFO("m=" << m << " b2=" << t);
            for (const auto& [u, v] : {std::pair{e0, e1}, std::pair{e0, e2}, std::pair{e2, e3}, std::pair{e1, e3}})
                CHECK(std::abs(sectional_curvature(ge.metric, x, u, v) - sectional_curvature(eh.metric, y, u, v)) <
                      1e-6);
            CHECK(CurvatureBundle(ge.metric, x).ricci().norm() < 1e-6);
            ++compared;
        }
        CHECK(compared >= 4);
    }
}

TEST_CASE("gallery errors") {
    CHECK_THROWS_AS(build("no_such_metric"), ParamError);
    CHECK_THROWS_AS(build("taub_nut", {{"bogus", 1.0}}), ParamError);
    CHECK_THROWS_AS(build("symplectic_pair", {{"n", 5.0}}), DimensionError);
    CHECK_THROWS_AS(build("bergmann", {{"mu", 1.0}}), ParamError);
    CHECK_THROWS_AS(build("bgpp_degenerate", {{"m1", 1.0}, {"m2", 2.0}, {"m3", 3.0}}), ParamError);
}
