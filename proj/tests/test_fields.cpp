#include <doctest.h>

#include <cmath>
#include <random>

#include "betaforge/errors.hpp"
#include "betaforge/fields.hpp"
#include "betaforge/gallery.hpp"
#include "test_util.hpp"

using namespace betaforge;

namespace {

MetricField constant_metric(const Eigen::MatrixXd& m) {
    MetricField g;
    g.dim = static_cast<int>(m.rows());
    g.name = "constant";
    g.domain = Domain::box(g.dim, -5.0, 5.0);
    g.eval = [m](std::span<const Jet> x) {
        const int n = static_cast<int>(m.rows());
        JetMatrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = m(i, j) + 0.0 * x[0];
        return a;
    };
    return g;
}

OneFormField zero_form(int n) {
    OneFormField b;
    b.dim = n;
    b.name = "zero";
    b.domain = Domain::box(n, -5.0, 5.0);
    b.eval = [n](std::span<const Jet>) { return JetVec(static_cast<std::size_t>(n), Jet(0.0)); };
    return b;
}

}  // namespace

TEST_CASE("euclidean metric is the identity with vanishing derivatives") {
    const MetricField g = euclidean(4);
    const std::vector<double> x = {0.3, -0.2, 0.5, 0.1};
    const JetMatrix a = g.at(x, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(a(i, j).value() == (i == j ? 1.0 : 0.0));
            for (int k = 0; k < 4; ++k) CHECK(a(i, j).d(k) == 0.0);
        }
}

TEST_CASE("conformal constant-curvature metric at the origin is 4 delta") {
    const GeometryPair p = conformal_pair(4, 1.0, 1.0);
    const std::vector<double> x = {0.0, 0.0, 0.0, 0.0};
    CHECK((p.metric.value(x) - 4.0 * Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-15);
}

TEST_CASE("Eguchi-Hanson components match an independent frame expansion") {
    const GalleryEntry e = build("eguchi_hanson", {{"F", 1.0}, {"mubar", 0.0}});
    const std::vector<double> x = {0.5, 0.1, 0.2, -0.3};
    const Eigen::MatrixXd a = e.metric.value(x);
    CHECK(a.llt().info() == Eigen::Success);

    double r2 = 0;
    for (double v : x) r2 += v * v;
    const double V = 1.0 + 1.0 / (r2 * r2);
    const auto frame = s3_frame(x);
    Eigen::VectorXd dr(4), s1(4), s2(4), s3(4);
    for (int k = 0; k < 4; ++k) {
        dr(k) = x[static_cast<std::size_t>(k)] / std::sqrt(r2);
        s1(k) = frame[0][static_cast<std::size_t>(k)];
        s2(k) = frame[1][static_cast<std::size_t>(k)];
        s3(k) = frame[2][static_cast<std::size_t>(k)];
    }
    const Eigen::MatrixXd want = dr * dr.transpose() / V + V * r2 * s1 * s1.transpose() +
                                 r2 * (s2 * s2.transpose() + s3 * s3.transpose());
    CHECK(testutil::rel(a, want) < 1e-13);
}

TEST_CASE("raise and lower index") {
    const std::vector<double> x = {0.1, 0.2, 0.3, 0.4};
    const MetricField id = euclidean(4);
    const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
    CHECK((raise_index(id, x, w) - w).norm() == 0.0);

    const MetricField four = constant_metric(4.0 * Eigen::MatrixXd::Identity(4, 4));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
    b(0) = 1.0;
    const Eigen::VectorXd up = raise_index(four, x, b);
    CHECK(up(0) == doctest::Approx(0.25));
    CHECK(up.tail(3).norm() == 0.0);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd m(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) m(i, j) = nd(rng);
    const MetricField spd = constant_metric(m * m.transpose() + Eigen::MatrixXd::Identity(5, 5));
    const std::vector<double> x5 = {0.0, 0.1, 0.2, 0.3, 0.4};
    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v(i) = nd(rng);
    CHECK((raise_index(spd, x5, lower_index(spd, x5, v)) - v).norm() < 1e-12 * v.norm());
}

TEST_CASE("b squared on the symplectic and conformal pairs") {
    const GeometryPair sym = symplectic_pair(4, 1.0);
    const std::vector<double> e1 = {1.0, 0.0, 0.0, 0.0};
    CHECK(b_squared(sym, e1) == doctest::Approx(1.0).epsilon(1e-15));
    for (const auto& s : testutil::points(sym.domain(), 100, 3)) {
        double r2 = 0;
        for (double v : s.x) r2 += v * v;
        CHECK(std::abs(b_squared(sym, s.x) - r2) < 1e-13);
    }

    // a^2 - mu b^2 = (1 - mu|x|^2)^2 / (1 + mu|x|^2)^2 at |x| = 0.5.
    const GeometryPair conf = conformal_pair(4, 1.0, 1.0);
    const std::vector<double> half = {0.5, 0.0, 0.0, 0.0};
    CHECK(1.0 - b_squared(conf, half) == doctest::Approx(0.36).epsilon(1e-14));

    const GeometryPair flat = make_pair(euclidean(3), zero_form(3), "parallel_zero");
    const std::vector<double> x3 = {0.3, 0.1, -0.2};
    CHECK(b_squared(flat, x3) == 0.0);
}

TEST_CASE("b squared is non-negative on gallery pairs") {
    for (const auto& item : catalog()) {
        const GalleryEntry e = build(item.id);
        if (!e.pair) continue;
        for (const auto& s : testutil::points(e.pair->domain(), 20, 9)) CHECK(b_squared(*e.pair, s.x) >= 0.0);
    }
}

TEST_CASE("jet matrix inverse matches the numeric inverse and its derivative") {
    const GeometryPair p = conformal_pair(4, 1.0, 1.0);
    const std::vector<double> x = {0.2, -0.1, 0.3, 0.05};
    const JetMatrix a = p.metric.at(x, 1);
    const JetMatrix ai = inverse(a);
    CHECK((ai.values() - a.values().inverse()).norm() < 1e-13);
    // d(a^-1) = -a^-1 (da) a^-1
    for (int k = 0; k < 4; ++k) {
        Eigen::MatrixXd da(4, 4), dai(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                da(i, j) = a(i, j).d(k);
                dai(i, j) = ai(i, j).d(k);
            }
        const Eigen::MatrixXd inv = a.values().inverse();
        CHECK((dai + inv * da * inv).norm() < 1e-12);
    }
}

TEST_CASE("field errors") {
    const MetricField g = euclidean(4);
    const std::vector<double> far = {9.0, 0.0, 0.0, 0.0}, wrong = {0.1, 0.2};
    const GeometryPair sym = symplectic_pair(4, 1.0);
    CHECK_THROWS_AS(static_cast<void>(sym.metric.value(far)), DomainError);
    CHECK_THROWS_AS(static_cast<void>(g.value(wrong)), DimensionError);

    Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(3, 3);
    indefinite(2, 2) = -1.0;
    const std::vector<double> x3 = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(static_cast<void>(constant_metric(indefinite).value(x3)), PositivityError);
    CHECK_THROWS_AS(make_pair(euclidean(4), zero_form(3)), DimensionError);
    CHECK_THROWS_AS(symplectic_pair(5, 1.0), DimensionError);
}
