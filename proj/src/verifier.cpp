#include "betaforge/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

#include "betaforge/beta_tensors.hpp"
#include "betaforge/curvature.hpp"
#include "betaforge/errors.hpp"

namespace betaforge {

// ----------------------------------------------------------------------------
// Sampling
// ----------------------------------------------------------------------------

namespace {

Eigen::VectorXd unit_direction(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd y(n);
    do {
        for (int i = 0; i < n; ++i) y(i) = normal(rng);
    } while (y.norm() < 1e-3);
    return y / y.norm();
}

}  // namespace

std::mt19937_64 sample_rng(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), 0x5eedu};
    return std::mt19937_64(seq);
}

std::vector<Sample> draw_samples(const Domain& domain, const SamplingPlan& plan) {
    if (plan.count <= 0) throw ParamError("sampling plan: count must be positive");
    if (plan.budget_factor <= 0) throw ParamError("sampling plan: budget factor must be positive");
    const int n = domain.dim;
    std::vector<double> lo = plan.box_lo.empty() ? domain.lo : plan.box_lo;
    std::vector<double> hi = plan.box_hi.empty() ? domain.hi : plan.box_hi;
    if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n) {
        throw DimensionError("sampling plan: box dimension does not match the domain");
    }
    std::mt19937_64 rng(plan.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Sample> out;
    const long budget = static_cast<long>(plan.budget_factor) * plan.count;
    long tries = 0;
    std::vector<double> x(static_cast<std::size_t>(n));
    while (static_cast<int>(out.size()) < plan.count) {
        if (tries++ >= budget) {
            throw DomainExhaustedError("sampling: rejection budget of " + std::to_string(budget) +
                                       " candidates exhausted after " + std::to_string(out.size()) + " of " +
                                       std::to_string(plan.count) + " points");
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
        if (!domain.contains(x)) continue;
        Sample s;
        s.index = static_cast<int>(out.size());
        s.x = x;
        s.y = unit_direction(rng, n);
        s.v = unit_direction(rng, n);
        out.push_back(std::move(s));
    }
    return out;
}

// ----------------------------------------------------------------------------
// Reports
// ----------------------------------------------------------------------------

namespace {

void dump_value(const nlohmann::json& j, int indent, int depth, std::string& out) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += nlohmann::json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump_value(it.value(), indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                dump_value(v, indent, depth + 1, out);
            }
            newline(depth);
            out += ']';
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            std::string s(buf);
            // Keep the float visible as a float after a round trip.
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            out += s;
            return;
        }
        default: out += j.dump();
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
    std::string out;
    dump_value(j, indent, 0, out);
    return out;
}

nlohmann::json VerificationReport::to_json(bool with_timing) const {
    nlohmann::json j;
    j["check"] = check;
    j["params"] = params;
    j["seed"] = seed;
    j["count"] = count;
    j["tol"] = tol;
    j["max"] = max;
    j["mean"] = mean;
    j["p95"] = p95;
    j["pass"] = pass;
    j["worst"] = nlohmann::json::array();
    for (const auto& w : worst) j["worst"].push_back({{"x", w.x}, {"y", w.y}, {"residual", w.residual}});
    j["ms"] = with_timing ? nlohmann::json(ms) : nlohmann::json(nullptr);
    return j;
}

int worker_count() {
    if (const char* env = std::getenv("BETAFORGE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
        throw ConfigError("BETAFORGE_THREADS must be a positive integer");
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

VerificationReport run_check(const std::string& check, nlohmann::json params, const Domain& domain,
                             const SamplingPlan& plan, double tol, const ResidualFn& residual, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Sample> samples = draw_samples(domain, plan);
    const std::size_t N = samples.size();
    std::vector<double> res(N, 0.0);
    std::vector<std::exception_ptr> errors(N);
    const int workers = std::max(1, std::min<int>(threads > 0 ? threads : worker_count(), static_cast<int>(N)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < N; i = next++) {
            try {
                res[i] = residual(samples[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    VerificationReport r;
    r.check = check;
    r.params = std::move(params);
    r.seed = plan.seed;
    r.count = static_cast<int>(N);
    r.tol = tol;
    double sum = 0.0;
    bool finite = true;
    for (double v : res) {
        if (!std::isfinite(v)) finite = false;
        sum += v;
        r.max = std::max(r.max, v);
    }
    r.mean = sum / static_cast<double>(N);
    std::vector<double> sorted = res;
    std::sort(sorted.begin(), sorted.end());
    const auto rank95 = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(N)));
    r.p95 = sorted[std::max<std::size_t>(rank95, 1) - 1];
    if (!finite) r.max = std::numeric_limits<double>::infinity();
    r.pass = finite && r.max <= tol;

    std::vector<std::size_t> order(N);
    for (std::size_t i = 0; i < N; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return res[a] > res[b]; });
    for (std::size_t k = 0; k < std::min<std::size_t>(5, N); ++k) {
        const Sample& s = samples[order[k]];
        r.worst.push_back({s.x, std::vector<double>(s.y.data(), s.y.data() + s.y.size()), res[order[k]]});
    }
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// ----------------------------------------------------------------------------
// Checks
// ----------------------------------------------------------------------------

namespace {

double einstein_residual(const MetricField& g, std::span<const double> x, double mubar) {
    const CurvatureBundle cb(g, x);
    const Eigen::MatrixXd& a = cb.metric();
    return (cb.ricci() - (g.dim - 1) * mubar * a).norm() / a.norm();
}

double sectional_residual(const MetricField& g, const Sample& s, double mu, std::uint64_t seed) {
    const CurvatureBundle cb(g, s.x);
    Eigen::VectorXd u = s.y, v = s.v;
    std::mt19937_64 rng = sample_rng(seed, s.index);
    for (int attempt = 0; attempt < 20; ++attempt) {
        try {
            return std::abs(cb.sectional(u, v) - mu);
        } catch (const DegeneratePlaneError&) {
            u = unit_direction(rng, g.dim);
            v = unit_direction(rng, g.dim);
        }
    }
    throw DegeneratePlaneError("sectional check: no non-degenerate plane after 20 draws");
}

double rel(double pred, double direct) { return std::abs(pred - direct) / (1.0 + std::abs(direct)); }

double rel(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& direct) {
    return (pred - direct).norm() / (1.0 + direct.norm());
}

nlohmann::json plan_params(const SamplingPlan& plan) {
    nlohmann::json j;
    j["budget_factor"] = plan.budget_factor;
    if (!plan.box_lo.empty()) {
        j["box_lo"] = plan.box_lo;
        j["box_hi"] = plan.box_hi;
    }
    return j;
}

nlohmann::json params_json(const Params& p) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : p) j[k] = v;
    return j;
}

}  // namespace

VerificationReport check_einstein(const MetricField& g, double mubar, const SamplingPlan& plan, double tol,
                                  int threads) {
    nlohmann::json params = {{"metric", g.name}, {"dim", g.dim}, {"mubar", mubar}, {"plan", plan_params(plan)}};
    return run_check(
        "einstein", std::move(params), g.domain, plan, tol,
        [&g, mubar](const Sample& s) { return einstein_residual(g, s.x, mubar); }, threads);
}

VerificationReport check_sectional_constant(const MetricField& g, double mu, const SamplingPlan& plan, double tol,
                                            int threads) {
    nlohmann::json params = {{"metric", g.name}, {"dim", g.dim}, {"mu", mu}, {"plan", plan_params(plan)}};
    const std::uint64_t seed = plan.seed;
    return run_check(
        "sectional", std::move(params), g.domain, plan, tol,
        [&g, mu, seed](const Sample& s) { return sectional_residual(g, s, mu, seed); }, threads);
}

const std::vector<std::string>& proposition_ids() {
    static const std::vector<std::string> ids = {"3.2", "3.3", "3.4", "4.1", "A1", "A2", "A3"};
    return ids;
}

VerificationReport check_proposition(const std::string& prop, const GeometryPair& pair,
                                     const DeformationProfile& profile, const SamplingPlan& plan, double tol,
                                     int threads) {
    const auto& ids = proposition_ids();
    if (std::find(ids.begin(), ids.end(), prop) == ids.end()) {
        throw ParamError("check_proposition: unknown proposition '" + prop + "'");
    }
    const GeometryPair deformed = apply(pair, profile);
    nlohmann::json params = {{"prop", prop},
                             {"pair", pair.name},
                             {"profile", profile.name()},
                             {"dim", pair.dim()},
                             {"plan", plan_params(plan)}};
    auto residual = [&, prop](const Sample& s) {
        const BetaBundle bb(pair, s.x);
        const BetaBundle direct(deformed, s.x);
        const FactorDerivs f = factor_derivs_at(pair, profile, s.x);
        const auto d = direct.contract(s.y);
        if (prop == "3.2") return rel(predict_rbar(bb, f), direct.r_ij);
        if (prop == "3.3") {
            const SbarPrediction p = predict_sbar(bb, f);
            return std::max(rel(p.s_ij, direct.s_ij), rel(Eigen::MatrixXd(p.s_i), Eigen::MatrixXd(direct.s_i)));
        }
        if (prop == "3.4") return rel(predict_tbar00(bb, f, s.y), d.t00);
        if (prop == "4.1") return rel(predict_ricoo_killing(bb, f, s.y).value, d.ric00);
        if (prop == "A1") return rel(predict_riemann(bb, f, s.y).value, direct.curv.directional(s.y));
        if (prop == "A2") return rel(predict_rbb(bb, f, s.y).value, d.rbb);
        return rel(predict_ricoo(bb, f, s.y).value, d.ric00);
    };
    return run_check("prop", std::move(params), deformed.domain(), plan, tol, residual, threads);
}

namespace {

double condition_value(const std::string& kind, const GeometryPair& pair, double a, double mu, const Sample& s) {
    if (kind == "killing") return killing_residual(pair, s.x);
    if (kind == "condition_a") return std::abs(condition_a_residual(pair, a, mu, s.x, s.y));
    if (kind == "condition_b") return std::abs(condition_b_residual(pair, mu, s.x, s.y));
    const EvennessWitness w = evenness_witness(pair, s.x, s.y);
    if (kind == "t00_minus_alpha2") return std::abs(w.residual);
    return std::abs(static_cast<double>(w.rank - pair.dim()));
}

}  // namespace

VerificationReport check_condition(const std::string& kind, const GeometryPair& pair, double a, double mu,
                                   const SamplingPlan& plan, double tol, int threads) {
    static const std::vector<std::string> kinds = {"killing", "condition_a", "condition_b", "t00_minus_alpha2",
                                                   "rank"};
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
        throw ParamError("check_condition: unknown condition '" + kind + "'");
    }
    nlohmann::json params = {{"condition", kind}, {"pair", pair.name}, {"dim", pair.dim()}, {"a", a}, {"mu", mu},
                             {"plan", plan_params(plan)}};
    return run_check(
        kind, std::move(params), pair.domain(), plan, tol,
        [&pair, kind, a, mu](const Sample& s) { return condition_value(kind, pair, a, mu, s); }, threads);
}

VerificationReport check_conditions(const GeometryPair& pair, double a, double mu, const SamplingPlan& plan,
                                    double tol, int threads) {
    // Rank of s at the first sample, recorded alongside the residuals.
    const std::vector<Sample> probe = draw_samples(pair.domain(), SamplingPlan{plan.seed, 1, plan.budget_factor * plan.count, plan.box_lo, plan.box_hi});
    const int rank_s = evenness_witness(pair, probe.front().x, probe.front().y).rank;
    nlohmann::json params = {{"pair", pair.name}, {"dim", pair.dim()}, {"a", a}, {"mu", mu}, {"rank_s", rank_s},
                             {"plan", plan_params(plan)}};
    return run_check(
        "conditions", std::move(params), pair.domain(), plan, tol,
        [&pair, a, mu](const Sample& s) {
            return std::max({condition_value("killing", pair, a, mu, s), condition_value("condition_a", pair, a, mu, s),
                             condition_value("condition_b", pair, a, mu, s)});
        },
        threads);
}

// ----------------------------------------------------------------------------
// Named inputs
// ----------------------------------------------------------------------------

namespace {

double param_or(const Params& p, const std::string& k, double fallback) {
    auto it = p.find(k);
    return it == p.end() ? fallback : it->second;
}

}  // namespace

GeometryPair named_pair(const std::string& name, int dim, const Params& params) {
    const double mu = param_or(params, "mu", 1.0), a = param_or(params, "a", 1.0);
    if (name == "symplectic") return symplectic_pair(dim, param_or(params, "a", 1.0));
    if (name == "const_curv" || name == "conformal") return conformal_pair(dim, mu, a);
    if (name == "projective") return projective_pair(dim, mu, a);
    if (name == "generic") return generic_pair(dim);
    for (const auto& item : catalog()) {
        if (item.id != name) continue;
        Params own;
        for (const auto& spec : item.params) {
            if (spec.name == "n") own["n"] = dim;
            else if (params.count(spec.name)) own[spec.name] = params.at(spec.name);
        }
        GalleryEntry e = build(name, own);
        if (!e.pair) throw ParamError("gallery entry '" + name + "' has no one-form");
        return *e.pair;
    }
    throw ParamError("unknown pair '" + name + "'");
}

DeformationProfile smooth_profile(int which) {
    if (which == 0) {
        return DeformationProfile::from_kappa(
            "smooth_a", [](const Jet& t) { return 0.1 + 0.05 * t + 0.02 * square(t); },
            [](const Jet& t) { return 0.1 * t - 0.05 * square(t); },
            [](const Jet& t) { return 1.0 + 0.2 * t + 0.1 * square(t); }, 0.0, 2.5);
    }
    if (which == 1) {
        return DeformationProfile::from_kappa(
            "smooth_b", [](const Jet& t) { return -0.2 + 0.1 * sin(t); }, [](const Jet& t) { return 0.2 * log(1.0 + t); },
            [](const Jet& t) { return exp(-0.3 * t); }, 0.0, 10.0);
    }
    throw ParamError("smooth_profile: index must be 0 or 1");
}

DeformationProfile named_profile(const std::string& name, const Params& params, double* mubar) {
    if (mubar) *mubar = std::numeric_limits<double>::quiet_NaN();
    if (name == "identity") return DeformationProfile::identity();
    if (name == "smooth_a") return smooth_profile(0);
    if (name == "smooth_b") return smooth_profile(1);
    if (name == "general") {
        GeneralSolverConfig cfg;
        auto num = [&](const char* k, double& dst) {
            if (params.count(k)) dst = params.at(k);
        };
        auto integer = [&](const char* k, int& dst) {
            if (!params.count(k)) return;
            const double v = params.at(k);
            if (v != std::round(v)) throw ParamError(std::string("general profile: '") + k + "' must be an integer");
            dst = static_cast<int>(v);
        };
        integer("n", cfg.n);
        integer("sign", cfg.sign);
        num("mu", cfg.mu);
        num("mubar", cfg.mubar);
        num("a", cfg.a);
        num("E", cfg.E);
        num("F", cfg.F);
        num("b2_lo", cfg.b2_lo);
        num("b2_hi", cfg.b2_hi);
        num("anchor_b2", cfg.anchor_b2);
        num("anchor_rho", cfg.anchor_rho);
        SolutionFamily s = solve_general(cfg);
        if (mubar) *mubar = s.mubar;
        return s.profile;
    }
    const auto ids = family_ids();
    if (std::find(ids.begin(), ids.end(), name) == ids.end()) throw ParamError("unknown profile '" + name + "'");
    const Params defaults = family_defaults(name);
    Params own;
    for (const auto& [k, v] : params) {
        if (defaults.count(k) || k == "b2_lo" || k == "b2_hi") own[k] = v;
    }
    SolutionFamily s = closed_form_profile(name, own);
    if (mubar) *mubar = s.mubar;
    return s.profile;
}

// ----------------------------------------------------------------------------
// Theorems
// ----------------------------------------------------------------------------

const std::vector<std::string>& theorem_ids() {
    static const std::vector<std::string> ids = {"4.4", "5.1", "6.1", "6.2", "7.2"};
    return ids;
}

VerificationReport check_deformation_theorem(const std::string& theorem, const Scenario& sc,
                                             const SamplingPlan& plan, double tol, int threads) {
    const Params& p = sc.params;
    const int n = static_cast<int>(param_or(p, "n", 4.0));
    nlohmann::json params = {{"theorem", theorem},
                             {"pair", sc.pair},
                             {"profile", sc.profile},
                             {"params", params_json(p)},
                             {"plan", plan_params(plan)}};
    auto finish = [&](VerificationReport r) {
        r.check = "theorem";
        r.params = params;
        return r;
    };

    if (theorem == "4.4") {
        const GeometryPair base = named_pair(sc.pair.empty() ? "symplectic" : sc.pair, 4, p);
        const DeformationProfile prof = named_profile(sc.profile.empty() ? "hawking" : sc.profile, p);
        const GeometryPair out = apply(base, prof);
        return finish(check_einstein(out.metric, 0.0, plan, tol, threads));
    }
    if (theorem == "5.1") {
        const GeometryPair base = named_pair(sc.pair.empty() ? "const_curv" : sc.pair, n, p);
        double mubar = 0.0;
        const DeformationProfile prof = named_profile(sc.profile.empty() ? "fs_bergmann" : sc.profile, p, &mubar);
        if (std::isnan(mubar)) mubar = param_or(p, "mubar", 0.0);
        params["predicted_mubar"] = mubar;
        const GeometryPair out = apply(base, prof);
        return finish(check_einstein(out.metric, mubar, plan, tol, threads));
    }
    if (theorem == "6.1" || theorem == "6.2") {
        const GeometryPair base = named_pair(sc.pair.empty() ? "const_curv" : sc.pair, n, p);
        double mubar = 0.0;
        const DeformationProfile prof =
            named_profile(sc.profile.empty() ? "conformal_curved" : sc.profile, p, &mubar);
        if (std::isnan(mubar)) throw ParamError("theorem " + theorem + ": profile must be a closed-form family");
        params["predicted_mubar"] = mubar;
        if (theorem == "6.2") {
            const GeometryPair out = apply(base, prof);
            return finish(check_sectional_constant(out.metric, mubar, plan, tol, threads));
        }
        const double k = param_or(p, "k", 1.0);
        const double a = param_or(p, "a", 1.0);
        const GeometryPair out = apply(base, killing_transfer_nu(prof, k));
        params["abar"] = k * a;
        return finish(run_check(
            "theorem", params, out.domain(), plan, tol,
            [out, k, a, mubar](const Sample& s) {
                return std::max(killing_residual(out, s.x),
                                std::abs(condition_a_residual(out, k * a, mubar, s.x, s.y)));
            },
            threads));
    }
    if (theorem == "7.2") {
        if (n != 4 && n != 8) throw ParamError("theorem 7.2: n must be 4 or 8");
        GeneralSolverConfig cfg;
        cfg.n = n;
        cfg.E = param_or(p, "E", 0.0);
        cfg.F = param_or(p, "F", -4.0);
        cfg.mubar = param_or(p, "mubar", 0.0);
        cfg.sign = static_cast<int>(param_or(p, "sign", 1.0));
        cfg.b2_lo = param_or(p, "b2_lo", cfg.b2_lo);
        cfg.b2_hi = param_or(p, "b2_hi", cfg.b2_hi);
        cfg.anchor_b2 = param_or(p, "anchor_b2", cfg.anchor_b2);
        cfg.anchor_rho = param_or(p, "anchor_rho", cfg.anchor_rho);
        const SolutionFamily sol = solve_general(cfg);
        GeometryPair base = symplectic_pair(n, 1.0);
        const double outer = std::sqrt(cfg.b2_hi);
        base.metric.domain = sampling_shell(n, std::sqrt(cfg.b2_lo), outer);
        base.oneform.domain = base.metric.domain;
        const GeometryPair deformed = apply(base, sol.profile);
        // The isotropic block e^{2 rho} b^2 of the deformed metric is r_w^2, so the
        // warped radius is sqrt(varrho(b^2)).
        double v_lo = std::numeric_limits<double>::infinity(), v_hi = 0.0;
        for (double t : {cfg.b2_lo, cfg.b2_hi}) {
            const FactorDerivs f = sol.profile.derivs(t);
            const double v = t * std::exp(2.0 * f.rho);
            v_lo = std::min(v_lo, v);
            v_hi = std::max(v_hi, v);
        }
        const MetricField warped = warped_einstein_metric(n, cfg.E, cfg.F, cfg.mubar, std::sqrt(v_lo), std::sqrt(v_hi));
        const ScalarProfile rho = sol.profile.rho();
        const MetricField pulled = radial_pullback(
            warped, [rho](const Jet& r) { return r * exp(rho.fn(square(r))); }, deformed.metric.domain,
            "warped_pullback");
        params["warped"] = warped.name;
        return finish(run_check(
            "theorem", params, deformed.metric.domain, plan, tol,
            [deformed, pulled](const Sample& s) {
                const Eigen::MatrixXd g1 = deformed.metric.value(s.x);
                const Eigen::MatrixXd g2 = pulled.value(s.x);
                return (g1 - g2).norm() / g2.norm();
            },
            threads));
    }
    throw ParamError("check_deformation_theorem: unknown theorem '" + theorem + "'");
}

// ----------------------------------------------------------------------------
// Expectations
// ----------------------------------------------------------------------------

std::string covering_check(const std::string& kind) {
    if (kind == "einstein") return "einstein";
    if (kind == "sectional") return "sectional";
    if (kind == "killing" || kind == "condition_a" || kind == "condition_b" || kind == "t00_minus_alpha2" ||
        kind == "rank") {
        return kind;
    }
    throw ParamError("no verifier check covers expectation '" + kind + "'");
}

VerificationReport check_expectation(const GalleryEntry& entry, const Expectation& ex, const SamplingPlan& plan,
                                     double tol, int threads) {
    const std::string check = covering_check(ex.kind);
    if (check == "einstein") return check_einstein(entry.metric, ex.mu, plan, tol, threads);
    if (check == "sectional") return check_sectional_constant(entry.metric, ex.mu, plan, tol, threads);
    if (!entry.pair) throw ParamError("expectation '" + ex.kind + "' on '" + entry.id + "' needs a one-form");
    return check_condition(check, *entry.pair, ex.a, ex.mu, plan, tol, threads);
}

}  // namespace betaforge
