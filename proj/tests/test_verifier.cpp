#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "betaforge/errors.hpp"
#include "betaforge/verifier.hpp"

using namespace betaforge;

namespace {

SamplingPlan plan(int count, std::uint64_t seed = 1, int budget = 200) {
    SamplingPlan p;
    p.seed = seed;
    p.count = count;
    p.budget_factor = budget;
    return p;
}

}  // namespace

TEST_CASE("sampling is seeded and stays in the domain") {
    const Domain d = Domain::shell(4, 0.5, 1.5);
    const auto a = draw_samples(d, plan(50, 9)), b = draw_samples(d, plan(50, 9)), c = draw_samples(d, plan(50, 10));
    REQUIRE(a.size() == 50);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].index == static_cast<int>(i));
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        CHECK(d.contains(a[i].x));
        CHECK(std::abs(a[i].y.norm() - 1.0) < 1e-14);
        CHECK(std::abs(a[i].v.norm() - 1.0) < 1e-14);
        differs = differs || a[i].x != c[i].x;
    }
    CHECK(differs);
}

TEST_CASE("rejection budget is enforced") {
    const Domain never = Domain::box(3, -1.0, 1.0).restrict([](std::span<const double>) { return false; });
    CHECK_THROWS_AS(draw_samples(never, plan(10, 1, 10)), DomainExhaustedError);
    // A thin shell needs more than the default budget.
    const Domain thin = Domain::box(4, -2.0, 2.0).restrict([](std::span<const double> x) {
        double r2 = 0;
        for (double v : x) r2 += v * v;
        return r2 > 0.99 && r2 < 1.0;
    });
    CHECK_THROWS_AS(draw_samples(thin, plan(20, 1, 10)), DomainExhaustedError);
}

TEST_CASE("report statistics") {
    const VerificationReport r = run_check(
        "index", nlohmann::json::object(), Domain::box(2, -1.0, 1.0), plan(100), 50.0,
        [](const Sample& s) { return double(s.index); }, 3);
    CHECK(r.count == 100);
    CHECK(r.max == 99.0);
    CHECK(r.mean == doctest::Approx(49.5));
    CHECK(r.p95 == 94.0);
    REQUIRE(r.worst.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(r.worst[static_cast<std::size_t>(i)].residual == 99.0 - i);
    CHECK_FALSE(r.pass);

    const VerificationReport ok = run_check(
        "small", nlohmann::json::object(), Domain::box(2, -1.0, 1.0), plan(10), 1e-3,
        [](const Sample& s) { return 1e-4 * s.index / 10.0; }, 2);
    CHECK(ok.pass);

    const VerificationReport nan = run_check(
        "nan", nlohmann::json::object(), Domain::box(2, -1.0, 1.0), plan(10), 1.0,
        [](const Sample& s) { return s.index == 4 ? std::numeric_limits<double>::quiet_NaN() : 0.0; }, 2);
    CHECK_FALSE(nan.pass);
}

TEST_CASE("worker exceptions propagate") {
    CHECK_THROWS_AS(run_check(
                        "throws", nlohmann::json::object(), Domain::box(2, -1.0, 1.0), plan(20), 1.0,
                        [](const Sample& s) -> double {
                            if (s.index == 7) throw SignatureError("bad sample");
                            return 0.0;
                        },
                        4),
                    SignatureError);
}

TEST_CASE("report JSON schema and number formatting") {
    const VerificationReport r = check_einstein(euclidean(4), 0.0, plan(5), 1e-12, 1);
    const nlohmann::json j = r.to_json();
    for (const char* key : {"check", "params", "seed", "count", "tol", "max", "mean", "p95", "pass", "worst", "ms"})
        CHECK(j.contains(key));
    CHECK(j["ms"].is_null());
    CHECK(!r.to_json(true)["ms"].is_null());

    const nlohmann::json doc = {{"a", 0.1}, {"b", 2.0}, {"c", std::numeric_limits<double>::infinity()}, {"d", 3}};
    const std::string text = dump_json(doc, -1);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("\"b\":2.0") != std::string::npos);
    CHECK(text.find("\"c\":null") != std::string::npos);
    CHECK(text.find("\"d\":3") != std::string::npos);
    CHECK(nlohmann::json::parse(dump_json(r.to_json()))["check"] == "einstein");
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
    const GalleryEntry e = build("eguchi_hanson", {{"F", 1.0}, {"mubar", 0.0}});
    const std::string one = dump_json(check_einstein(e.metric, 0.0, plan(40, 5), 1e-6, 1).to_json());
    const std::string four = dump_json(check_einstein(e.metric, 0.0, plan(40, 5), 1e-6, 4).to_json());
    const std::string again = dump_json(check_einstein(e.metric, 0.0, plan(40, 5), 1e-6, 4).to_json());
    CHECK(one == four);
    CHECK(four == again);

    const GeometryPair g = symplectic_pair(4, 1.0);
    const std::string p1 = dump_json(check_proposition("A3", g, smooth_profile(0), plan(10, 2), 1e-5, 1).to_json());
    const std::string p4 = dump_json(check_proposition("A3", g, smooth_profile(0), plan(10, 2), 1e-5, 4).to_json());
    CHECK(p1 == p4);
}

TEST_CASE("thread count from the environment") {
    ::setenv("BETAFORGE_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    ::setenv("BETAFORGE_THREADS", "zero", 1);
    CHECK_THROWS_AS(worker_count(), ConfigError);
    ::setenv("BETAFORGE_THREADS", "0", 1);
    CHECK_THROWS_AS(worker_count(), ConfigError);
    ::unsetenv("BETAFORGE_THREADS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("Einstein check") {
    CHECK(check_einstein(euclidean(4), 0.0, plan(20), 1e-12, 2).max <= 1e-12);
    const GalleryEntry fs = build("fubini_study", {{"n", 4.0}, {"mu", 1.0}});
    CHECK(check_einstein(fs.metric, 2.0, plan(20), 1e-6, 2).pass);
    const GalleryEntry eh = build("eguchi_hanson", {{"F", 1.0}, {"mubar", 0.0}});
    CHECK(check_einstein(eh.metric, 0.0, plan(20), 1e-6, 2).pass);
    // Negative control: wrong constant.
    const VerificationReport bad = check_einstein(fs.metric, 1.5, plan(20), 1e-6, 2);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max > 1e-2);
}

TEST_CASE("sectional check") {
    CHECK(check_sectional_constant(conformal_pair(4, 1.0, 1.0).metric, 1.0, plan(20), 1e-7, 2).pass);
    CHECK(check_sectional_constant(euclidean(4), 0.0, plan(20), 1e-7, 2).max == 0.0);
    // Negative control: Eguchi-Hanson is Ricci-flat but not flat.
    const GalleryEntry eh = build("eguchi_hanson", {{"F", 1.0}, {"mubar", 0.0}});
    const VerificationReport bad = check_sectional_constant(eh.metric, 0.0, plan(20), 1e-7, 2);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max > 1e-2);
}

TEST_CASE("proposition checks") {
    const GeometryPair sym = symplectic_pair(4, 1.0);
    const DeformationProfile geh = closed_form_profile("general_eh").profile;
    CHECK(check_proposition("A3", sym, geh, plan(10), 1e-5, 2).pass);
    const VerificationReport id = check_proposition("3.3", generic_pair(4), DeformationProfile::identity(), plan(10), 1e-12, 2);
    CHECK(id.max < 1e-14);
    CHECK(check_proposition("A2", conformal_pair(4, 1.0, 1.0), smooth_profile(1), plan(10), 1e-5, 2).pass);
    for (const auto& prop : proposition_ids()) {
        INFO(prop);
        const double tol = prop[0] == 'A' ? 1e-5 : 1e-8;
        CHECK(check_proposition(prop, conformal_pair(4, 1.0, 1.0), smooth_profile(0), plan(5), tol, 2).pass);
    }
    // The Killing-form prediction is guarded: it refuses a non-Killing input.
    CHECK_THROWS_AS(check_proposition("4.1", perturbed_pair(sym, 0.1), smooth_profile(0), plan(5), 1e-8, 1),
                    NotKillingError);
    CHECK_THROWS_AS(check_proposition("9.9", sym, geh, plan(5), 1e-8, 1), ParamError);
}

TEST_CASE("condition checks") {
    const VerificationReport conf = check_conditions(conformal_pair(4, 1.0, 1.0), 1.0, 1.0, plan(20), 1e-8, 2);
    CHECK(conf.pass);
    const VerificationReport sym6 = check_conditions(symplectic_pair(6, 1.0), 1.0, 0.0, plan(20), 1e-8, 2);
    CHECK(sym6.pass);
    CHECK(sym6.params["rank_s"] == 6);
    CHECK(check_condition("rank", symplectic_pair(6, 1.0), 1.0, 0.0, plan(5), 0.5, 1).max == 0.0);
    CHECK(check_condition("t00_minus_alpha2", symplectic_pair(8, 1.0), 1.0, 0.0, plan(5), 1e-10, 1).pass);
    // Negative control: perturbed beta.
    const VerificationReport bad =
        check_conditions(perturbed_pair(conformal_pair(4, 1.0, 1.0), 0.2), 1.0, 1.0, plan(20), 1e-8, 2);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max > 1e-2);
    CHECK_FALSE(check_condition("killing", perturbed_pair(symplectic_pair(4, 1.0), 0.2), 1.0, 0.0, plan(10), 1e-8, 1).pass);
    CHECK_THROWS_AS(check_condition("holonomy", symplectic_pair(4, 1.0), 1.0, 0.0, plan(5), 1e-8, 1), ParamError);
}

TEST_CASE("deformation theorems") {
    for (const auto& th : theorem_ids()) {
        INFO(th);
        Scenario sc;
        if (th == "6.1") sc.params = {{"k", 2.0}};
        CHECK(check_deformation_theorem(th, sc, plan(10), th == "7.2" ? 1e-5 : 1e-6, 2).pass);
    }
    // Sphere deformed by the conformal family has curvature (C^2 - D^2 a^2) mu.
    Scenario s62;
    s62.params = {{"mu", 1.0}, {"a", 1.0}, {"C", 1.0}, {"D", 0.2}};
    const VerificationReport r62 = check_deformation_theorem("6.2", s62, plan(20), 1e-7, 2);
    CHECK(r62.pass);
    CHECK(r62.params["predicted_mubar"].get<double>() == doctest::Approx(0.96));

    // Negative controls: profiles outside each statement's hypotheses.
    Scenario wrong44;
    wrong44.profile = "conformal_flat";
    CHECK_FALSE(check_deformation_theorem("4.4", wrong44, plan(10), 1e-6, 2).pass);
    Scenario wrong62;
    wrong62.profile = "fs_bergmann";
    wrong62.params = {{"mu", 1.0}, {"C", 1.0}, {"D", 0.3}};
    CHECK_FALSE(check_deformation_theorem("6.2", wrong62, plan(10), 1e-7, 2).pass);
    Scenario wrong61 = wrong62;
    CHECK_FALSE(check_deformation_theorem("6.1", wrong61, plan(10), 1e-6, 2).pass);
    CHECK_THROWS_AS(check_deformation_theorem("9.9", Scenario{}, plan(5), 1e-6, 1), ParamError);
}

TEST_CASE("named inputs") {
    CHECK(named_pair("symplectic", 6, {}).metric.dim == 6);
    CHECK(named_pair("const_curv", 4, {{"mu", -1.0}}).metric.dim == 4);
    CHECK(named_pair("cartan_maurer_s3", 4, {}).metric.dim == 4);
    CHECK_THROWS_AS(named_pair("taub_nut", 4, {{"m", 2.0}}), ParamError);
    CHECK_THROWS_AS(named_pair("nowhere", 4, {}), ParamError);
    double mubar = 0;
    named_profile("fs_bergmann", {{"mu", 1.0}, {"C", 1.0}, {"D", 0.0}, {"unused_key", 3.0}}, &mubar);
    CHECK(mubar == doctest::Approx(2.0));
    CHECK_THROWS_AS(named_profile("nowhere", {}), ParamError);
}
