// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "betaforge/beta_tensors.hpp"
#include "betaforge/curvature.hpp"
#include "betaforge/deformation.hpp"
#include "betaforge/einstein.hpp"
#include "betaforge/errors.hpp"
#include "betaforge/gallery.hpp"
#include "betaforge/verifier.hpp"

using namespace betaforge;

namespace {

struct Outcome {
    bool pass = false;
    double max = 0;
    nlohmann::json doc;
    bool control = false;  // negative control: max is expected to be large
};

struct Job {
    int criterion;
    std::string label;
    std::function<Outcome(int threads)> run;
};

Outcome from_report(const VerificationReport& r) { return {r.pass, r.max, r.to_json()}; }

SamplingPlan plan(int count, std::uint64_t seed, int budget = 10) {
    SamplingPlan p;
    p.seed = seed;
    p.count = count;
    p.budget_factor = budget;
    return p;
}

// Scalar measurements outside the sampler still get a document so that the
// determinism pass can compare them.
Outcome measured(const std::string& what, double value, double tol) {
    return {std::isfinite(value) && value <= tol, value, {{"measure", what}, {"value", value}, {"tol", tol}}};
}

Outcome above(const std::string& what, double value, double floor) {
    return {value > floor, value, {{"measure", what}, {"value", value}, {"floor", floor}}, true};
}

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

Jet b2_jet(const GeometryPair& p, std::span<const double> x) {
    const JetMatrix a = p.metric.at(x, 1);
    const JetVec b = p.oneform.at(x, 1);
    return quadratic(inverse(a), b, b);
}

// ----------------------------------------------------------------------------

void constant_curvature(std::vector<Job>& jobs) {
    for (const auto& [n, mu] : std::vector<std::pair<int, double>>{{4, 1.0}, {4, -1.0}, {6, 1.0}}) {
        jobs.push_back({1, "sectional n=" + std::to_string(n) + " mu=" + std::to_string(int(mu)), [n, mu](int th) {
                            const GeometryPair p = conformal_pair(n, mu, 1.0);
                            return from_report(check_sectional_constant(p.metric, mu, plan(100, 101), 1e-7, th));
                        }});
    }
}

void conditions(std::vector<Job>& jobs) {
    const double tols[] = {1e-10, 1e-8, 1e-8};
    const char* kinds[] = {"killing", "condition_a", "condition_b"};
    for (int i = 0; i < 3; ++i) {
        const std::string kind = kinds[i];
        const double tol = tols[i];
        jobs.push_back({2, "conformal " + kind, [kind, tol](int th) {
                            const GeometryPair p = conformal_pair(4, 1.0, 1.0);
                            return from_report(check_condition(kind, p, 1.0, 1.0, plan(100, 201), tol, th));
                        }});
    }
    jobs.push_back({2, "conformal condition_a on the equator", [](int th) {
                        const GeometryPair p = conformal_pair(4, 1.0, 1.0);
                        return from_report(run_check(
                            "condition_a_equator", {{"pair", p.name}}, Domain::shell(4, 0.0, 1.0), plan(100, 202, 20),
                            1e-8,
                            [&p](const Sample& s) {
                                std::vector<double> x = s.x;
                                double r = 0;
                                for (double v : x) r += v * v;
                                r = std::sqrt(r);
                                for (double& v : x) v /= r;
                                return std::abs(condition_a_residual(p, 1.0, 1.0, x, s.y));
                            },
                            th));
                    }});
    for (int n : {4, 6, 8}) {
        jobs.push_back({2, "symplectic n=" + std::to_string(n) + " t00 = -alpha^2", [n](int th) {
                            return from_report(check_condition("t00_minus_alpha2", symplectic_pair(n, 1.0), 1.0, 0.0,
                                                               plan(100, 203), 1e-10, th));
                        }});
        jobs.push_back({2, "symplectic n=" + std::to_string(n) + " rank s = n", [n](int th) {
                            return from_report(
                                check_condition("rank", symplectic_pair(n, 1.0), 1.0, 0.0, plan(100, 204), 0.0, th));
                        }});
    }
}

void einstein_values(std::vector<Job>& jobs) {
    struct Case {
        std::string id;
        Params params;
        double mubar;
    };
    const std::vector<Case> cases = {
        {"fubini_study", {{"n", 4.0}, {"mu", 1.0}}, 2.0},
        {"taub_nut", {{"m", 1.0}}, 0.0},
        {"hawking_deformed", {{"C", 1.0}, {"D", 1.0}}, 0.0},
        {"general_eh", {{"n", 4.0}, {"mu", 1.0}}, 0.0},
        {"general_eh", {{"n", 6.0}, {"mu", 1.0}}, 0.0},
        {"eguchi_hanson", {{"F", 1.0}, {"mubar", 0.0}}, 0.0},
        {"eguchi_hanson", {{"F", 1.0}, {"mubar", 4.0}}, 4.0},
        {"eguchi_hanson", {{"F", 1.0}, {"mubar", -4.0}}, -4.0},
        {"pedersen", {{"m", 1.0}}, -4.0},
    };
    for (const auto& c : cases) {
        std::string label = c.id;
        for (const auto& [k, v] : c.params) label += " " + k + "=" + std::to_string(v).substr(0, 4);
        jobs.push_back({3, label, [c](int th) {
                            const GalleryEntry e = build(c.id, c.params);
                            return from_report(check_einstein(e.metric, c.mubar, plan(100, 301), 1e-6, th));
                        }});
    }
}

void propositions(std::vector<Job>& jobs) {
    const std::vector<std::string> pairs = {"symplectic", "conformal", "generic"};
    for (const auto& pname : pairs) {
        for (int w : {0, 1}) {
            for (const std::string prop : {"A1", "A2", "A3", "3.2", "3.3", "3.4", "4.1"}) {
                if (prop == "4.1" && pname == "generic") continue;  // needs a Killing form
                const double tol = prop[0] == 'A' ? 1e-5 : 1e-8;
                jobs.push_back({4, prop + " " + pname + " profile " + std::to_string(w), [pname, w, prop, tol](int th) {
                                    const GeometryPair g = pname == "symplectic" ? symplectic_pair(4, 1.0)
                                                           : pname == "conformal" ? conformal_pair(4, 1.0, 1.0)
                                                                                  : generic_pair(4);
                                    return from_report(
                                        check_proposition(prop, g, smooth_profile(w), plan(20, 401, 200), tol, th));
                                }});
            }
        }
    }
}

void families(std::vector<Job>& jobs) {
    std::vector<std::pair<std::string, Params>> all;
    for (const auto& id : family_ids()) all.push_back({id, {}});
    const std::vector<std::pair<std::string, Params>> variants = {
        {"elliptic_4d", {{"case", 1.0}}},
        {"elliptic_4d", {{"case", 2.0}, {"C", std::sqrt(0.5)}, {"D", -0.5}}},
        {"elliptic_4d", {{"case", 3.0}}},
        {"general_eh", {{"n", 6.0}}},
        {"jacobi_eh", {{"degenerate", 1.0}}},
        {"fs_bergmann", {{"mu", 0.0}, {"C", 1.0}, {"D", 0.25}}},
        {"conformal_curved", {{"mu", -1.0}, {"D", 0.3}}},
        {"stretch_fs", {{"n", 6.0}, {"mu", -1.0}}},
    };
    all.insert(all.end(), variants.begin(), variants.end());
    for (const auto& [id, p] : all) {
        std::string label = "gate " + id;
        for (const auto& [k, v] : p) label += " " + k + "=" + std::to_string(v).substr(0, 5);
        jobs.push_back({5, label, [id, p](int) {
                            return measured("gate " + id, closed_form_profile(id, p).gate_residual(50), 1e-8);
                        }});
    }
    jobs.push_back({5, "XYZT identity, 1000 random points", [](int th) {
                        // Coordinates of a box sample drive the ODEPoint entries.
                        return from_report(run_check(
                            "xyzt_identity", nlohmann::json::object(), Domain::box(10, -1.0, 1.0), plan(1000, 501), 1e-11,
                            [](const Sample& s) {
                                const auto& u = s.x;
                                ODEPoint p;
                                p.b2 = 1.0 + 0.5 * u[0] + 0.6;
                                p.delta = 1.2 + u[1];
                                p.delta1 = u[2];
                                p.delta2 = u[3];
                                p.rho = u[4];
                                p.rho1 = u[5];
                                p.rho2 = u[6];
                                p.n = 3 + s.index % 6;
                                p.mu = 0.3 * u[7];
                                p.mubar = u[8];
                                p.a = 1.0 + 0.3 * u[9];
                                return std::abs(xyzt_identity_residual(p));
                            },
                            th));
                    }});
}

void solver(std::vector<Job>& jobs) {
    struct Match {
        std::string label, family;
        Params params;
        GeneralSolverConfig cfg;
    };
    auto cfg = [](int n, double mu, double E, double F, double lo, double hi) {
        GeneralSolverConfig c;
        c.n = n;
        c.mu = mu;
        c.E = E;
        c.F = F;
        c.b2_lo = lo;
        c.b2_hi = hi;
        return c;
    };
    const SolutionFamily ped = closed_form_profile("elliptic_4d", {{"case", 2.0}, {"C", std::sqrt(0.5)}, {"D", -0.5}});
    const SolutionFamily hw = closed_form_profile("hawking", {{"C", 1.0}, {"D", 1.0}});
    const std::vector<Match> matches = {
        {"general_eh C=D=1 vs F=-4", "general_eh", {{"C", 1.0}, {"D", 1.0}}, cfg(4, 0, 0, -4, 1.25, 4.0)},
        {"general_eh C=2 D=0.5 vs F=-4", "general_eh", {{"C", 2.0}, {"D", 0.5}}, cfg(4, 0, 0, -4, 2.31, 8.0)},
        {"general_eh n=6 vs F=-4", "general_eh", {{"n", 6.0}, {"C", 1.0}, {"D", 1.0}}, cfg(6, 0, 0, -4, 1.25, 4.0)},
        {"fs_bergmann mu=0 D=0.25 vs E=F=0", "fs_bergmann", {{"mu", 0.0}, {"C", 1.0}, {"D", 0.25}},
         cfg(4, 0, 0, 0, 0.3, 2.0)},
        {"fs_bergmann mu=1 D=0 vs E=F=0", "fs_bergmann", {{"mu", 1.0}, {"C", 1.0}, {"D", 0.0}},
         cfg(4, 1, 0, 0, 0.1, 0.8)},
        {"hawking vs E=4 F=-0.5", "hawking", {{"C", 1.0}, {"D", 1.0}},
         cfg(4, 0, 4, -0.5, std::max(hw.lo, 0.5) + 0.05, std::min(hw.hi, 4.0) - 0.05)},
        {"Pedersen (elliptic case 2) vs E=8 F=1/16", "elliptic_4d",
         {{"case", 2.0}, {"C", std::sqrt(0.5)}, {"D", -0.5}}, cfg(4, 0, 8, 0.0625, ped.lo + 0.02, ped.hi - 0.02)},
    };
    for (const auto& m : matches) {
        jobs.push_back({6, m.label, [m](int) {
                            const SolutionFamily ref = closed_form_profile(m.family, m.params);
                            GeneralSolverConfig c = m.cfg;
                            c.anchor_b2 = 0.5 * (c.b2_lo + c.b2_hi);
                            c.anchor_rho = ref.profile.derivs(c.anchor_b2).rho;
                            c.mubar = ref.mubar;
                            return measured(m.label, family_distance(solve_general(c), ref, c.b2_lo, c.b2_hi), 1e-7);
                        }});
    }
    // End-to-end: the solver profile on the symplectic pair is Einstein at the requested constant.
    const std::vector<std::pair<std::string, Params>> e2e = {
        {"E=0 F=-4 mubar=0", {{"E", 0.0}, {"F", -4.0}, {"mubar", 0.0}}},
        {"E=F=0 mubar=2",
         {{"E", 0.0}, {"F", 0.0}, {"mubar", 2.0}, {"b2_lo", 0.3}, {"b2_hi", 2.0}, {"anchor_b2", 1.0},
          {"anchor_rho", -0.3}}},
        {"E=4 F=-0.5 mubar=0", {{"E", 4.0}, {"F", -0.5}, {"mubar", 0.0}}},
        {"Pedersen E=8 F=1/16 mubar=-4",
         {{"E", 8.0}, {"F", 0.0625}, {"mubar", -4.0}, {"anchor_rho", std::log(0.5)}}},
        {"n=6 E=0 F=-4 mubar=0", {{"n", 6.0}, {"E", 0.0}, {"F", -4.0}, {"mubar", 0.0}}},
    };
    for (const auto& [label, p] : e2e) {
        jobs.push_back({6, "end-to-end " + label, [p](int th) {
                            Scenario sc;
                            sc.pair = "symplectic";
                            sc.profile = "general";
                            sc.params = p;
                            return from_report(check_deformation_theorem("5.1", sc, plan(100, 601, 50), 1e-5, th));
                        }});
    }
}

void two_paths(std::vector<Job>& jobs) {
    const std::vector<std::pair<std::string, Params>> cases = {
        {"E=0 F=-4 mubar=0", {{"E", 0.0}, {"F", -4.0}, {"mubar", 0.0}}},
        {"Pedersen m=1", {{"E", 8.0}, {"F", 0.0625}, {"mubar", -4.0}, {"anchor_rho", std::log(0.5)}}},
    };
    for (const auto& [label, p] : cases) {
        jobs.push_back({7, label, [p](int th) {
                            Scenario sc;
                            sc.params = p;
                            return from_report(check_deformation_theorem("7.2", sc, plan(100, 701, 50), 1e-5, th));
                        }});
    }
}

void structure(std::vector<Job>& jobs) {
    for (const std::string pname : {"symplectic", "generic"}) {
        jobs.push_back({8, "composition on " + pname, [pname](int th) {
                            const GeometryPair g = pname == "symplectic" ? symplectic_pair(4, 1.0) : generic_pair(4);
                            const DeformationProfile p = smooth_profile(0), r = smooth_profile(1);
                            const GeometryPair once = apply(g, compose(r, p));
                            const GeometryPair twice = apply(apply(g, p), r);
                            return from_report(run_check(
                                "composition", {{"pair", pname}}, twice.domain().intersect(once.domain()),
                                plan(100, 801, 500), 1e-10,
                                [&](const Sample& s) {
                                    const Eigen::MatrixXd a = once.metric.value(s.x), b = twice.metric.value(s.x);
                                    const double dm = (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
                                    const Eigen::VectorXd u = once.oneform.value(s.x), v = twice.oneform.value(s.x);
                                    return std::max(dm, (u - v).cwiseAbs().maxCoeff() / (1.0 + v.cwiseAbs().maxCoeff()));
                                },
                                th));
                        }});
        for (int w : {0, 1}) {
            jobs.push_back({8, "conformal invariance on " + pname + " profile " + std::to_string(w), [pname, w](int th) {
                                const GeometryPair g =
                                    pname == "symplectic" ? symplectic_pair(4, 1.0) : generic_pair(4);
                                const DeformationProfile p = smooth_profile(w);
                                const GeometryPair q = apply(g, p);
                                return from_report(run_check(
                                    "conformal_invariance", {{"pair", pname}, {"profile", w}}, q.domain(),
                                    plan(100, 802, 500), 1e-10,
                                    [&](const Sample& s) {
                                        const Eigen::MatrixXd a = g.metric.value(s.x), ab = q.metric.value(s.x);
                                        const Eigen::VectorXd b = g.oneform.value(s.x), bb = q.oneform.value(s.x);
                                        const double b2 = b_squared(g, s.x);
                                        const double e2r = std::exp(2.0 * p.derivs(b2).rho);
                                        const Eigen::MatrixXd lhs = ab - bb * bb.transpose() / b_squared(q, s.x);
                                        const Eigen::MatrixXd rhs = e2r * (a - b * b.transpose() / b2);
                                        return (lhs - rhs).cwiseAbs().maxCoeff() / (1.0 + rhs.cwiseAbs().maxCoeff());
                                    },
                                    th));
                            }});
        }
    }
    for (const auto& item : catalog()) {
        if (!build(item.id).pair) continue;
        jobs.push_back({8, "grad b^2 = 2(r + s) on " + item.id, [id = item.id](int th) {
                            const GalleryEntry e = build(id);
                            const GeometryPair& p = *e.pair;
                            return from_report(run_check(
                                "grad_b2", {{"entry", id}}, p.domain(), plan(100, 803, 200), 1e-9,
                                [&p](const Sample& s) {
                                    const Jet b2 = b2_jet(p, s.x);
                                    const BetaBundle bb(p, s.x);
                                    double worst = 0;
                                    for (int k = 0; k < bb.n; ++k)
                                        worst = std::max(worst, std::abs(b2.d(k) - 2.0 * (bb.r_i(k) + bb.s_i(k))));
                                    return worst / (1.0 + bb.b2);
                                },
                                th));
                        }});
    }
    struct Transfer {
        std::string label, family, pair;
        Params params;
    };
    const std::vector<Transfer> transfers = {
        {"FS-type profile on the flat pair", "fs_bergmann", "symplectic", {{"mu", 0.0}, {"C", 0.5}, {"D", 0.5}}},
        {"conformal_flat on the flat pair", "conformal_flat", "symplectic", {{"C", 1.0}, {"D", 0.5}}},
        {"conformal_curved on the sphere", "conformal_curved", "conformal", {{"mu", 1.0}, {"C", 1.0}, {"D", 0.2}}},
    };
    for (const auto& t : transfers) {
        jobs.push_back({8, "Killing transfer ODE, " + t.label, [t](int) {
                            const SolutionFamily f = closed_form_profile(t.family, t.params);
                            const DeformationProfile kt = killing_transfer_nu(f.profile, 1.0);
                            double worst = 0;
                            for (double b2 : f.grid_b2(50)) worst = std::max(worst, std::abs(killing_transfer_residual(kt, b2)));
                            return measured("transfer ODE " + t.label, worst, 1e-9);
                        }});
        jobs.push_back({8, "Killing transfer output, " + t.label, [t](int th) {
                            const SolutionFamily f = closed_form_profile(t.family, t.params);
                            const GeometryPair g = t.pair == "symplectic" ? symplectic_pair(4, 1.0)
                                                                          : conformal_pair(4, 1.0, 1.0);
                            const GeometryPair q = apply(g, killing_transfer_nu(f.profile, 1.0));
                            return from_report(check_condition("killing", q, 1.0, f.mubar, plan(100, 804, 500), 1e-9, th));
                        }});
    }
    jobs.push_back({8, "Killing transfer negative control (nu = 1, kappa != 0)", [](int th) {
                        const SolutionFamily f =
                            closed_form_profile("fs_bergmann", {{"mu", 0.0}, {"C", 0.5}, {"D", 0.5}});
                        const GeometryPair q = apply(symplectic_pair(4, 1.0), f.profile);
                        const VerificationReport r =
                            check_condition("killing", q, 1.0, f.mubar, plan(100, 805, 500), 1e-9, th);
                        Outcome o = above("killing residual without transfer", r.max, 1e-3);
                        o.doc["report"] = r.to_json();
                        return o;
                    }});
}

}  // namespace

int main() {
    std::vector<Job> jobs;
    constant_curvature(jobs);
    conditions(jobs);
    einstein_values(jobs);
    propositions(jobs);
    families(jobs);
    solver(jobs);
    two_paths(jobs);
    structure(jobs);

    const char* titles[] = {"",
                            "constant-curvature identity",
                            "condition suite",
                            "Einstein reproduction",
                            "tensor identities and first-order predictions",
                            "ODE families and identity",
                            "general solver consistency",
                            "two-path equality",
                            "structural invariants",
                            "determinism"};

    std::map<int, bool> ok;
    std::map<int, double> worst;
    std::map<int, int> count;
    std::vector<std::string> first;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& job : jobs) {
        Outcome o;
        try {
            o = job.run(4);
        } catch (const std::exception& e) {
            o.pass = false;
            o.doc = {{"error", e.what()}};
            std::printf("  [criterion %d] %s: ERROR %s\n", job.criterion, job.label.c_str(), e.what());
        }
        if (!o.pass) std::printf("  [criterion %d] %s: FAIL (max %.3g)\n", job.criterion, job.label.c_str(), o.max);
        ok.try_emplace(job.criterion, true);
        ok[job.criterion] = ok[job.criterion] && o.pass;
        if (!o.control) worst[job.criterion] = std::max(worst[job.criterion], o.max);
        ++count[job.criterion];
        first.push_back(dump_json(o.doc));
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // Determinism: rerun every job with one worker and again with four.
    int mismatches = 0;
    for (int threads : {1, 4}) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            std::string text;
            try {
                text = dump_json(jobs[i].run(threads).doc);
            } catch (const std::exception& e) {
                text = dump_json(nlohmann::json{{"error", e.what()}});
            }
            if (text != first[i]) {
                ++mismatches;
                std::printf("  [criterion 9] %s differs with %d thread(s)\n", jobs[i].label.c_str(), threads);
            }
        }
    }
    ok[9] = mismatches == 0;

    bool all = true;
    for (int c = 1; c <= 9; ++c) {
        all = all && ok[c];
        if (c == 9)
            std::printf("criterion 9 (%s): %s  %zu reports compared across threads {1, 4} and two runs, %d mismatches\n",
                        titles[c], ok[c] ? "PASS" : "FAIL", jobs.size(), mismatches);
        else
            std::printf("criterion %d (%s): %s  %d checks, largest residual %.3g\n", c, titles[c],
                        ok[c] ? "PASS" : "FAIL", count[c], worst[c]);
    }
    std::printf("first pass %.1f s\n", elapsed);
    return all ? 0 : 1;
}
