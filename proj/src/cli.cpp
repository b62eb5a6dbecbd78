#include "betaforge/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "betaforge/einstein.hpp"
#include "betaforge/errors.hpp"
#include "betaforge/verifier.hpp"

namespace betaforge {

// ----------------------------------------------------------------------------
// JobConfig
// ----------------------------------------------------------------------------

nlohmann::json JobConfig::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["ids"] = nlohmann::json::object();
    for (const auto& [k, v] : ids) j["ids"][k] = v;
    j["params"] = nlohmann::json::object();
    for (const auto& [k, v] : params) j["params"][k] = v;
    j["options"] = nlohmann::json::object();
    for (const auto& [k, v] : options) j["options"][k] = v;
    j["seed"] = seed;
    j["count"] = count;
    j["tol"] = tol ? nlohmann::json(*tol) : nlohmann::json(nullptr);
    j["output"] = output;
    j["json"] = json;
    j["timing"] = timing;
    j["threads"] = threads;
    return j;
}

namespace {

Params number_map(const nlohmann::json& j, const std::string& field) {
    if (!j.is_object()) throw ConfigError("job config: '" + field + "' must be an object");
    Params out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_number()) throw ConfigError("job config: " + field + "." + it.key() + " must be a number");
        out[it.key()] = it.value().get<double>();
    }
    return out;
}

}  // namespace

JobConfig JobConfig::from_json(const nlohmann::json& j) {
    static const std::set<std::string> keys = {"command", "ids",    "params", "options", "seed",   "count",
                                               "tol",     "output", "json",   "timing",  "threads"};
    if (!j.is_object()) throw ConfigError("job config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!keys.count(it.key())) throw ConfigError("job config: unknown key '" + it.key() + "'");
    }
    JobConfig c;
    auto typed = [&](const char* k, auto check, const char* what) {
        if (j.contains(k) && !check(j.at(k))) throw ConfigError(std::string("job config: '") + k + "' must be " + what);
        return j.contains(k);
    };
    if (typed("command", [](const auto& v) { return v.is_string(); }, "a string")) c.command = j["command"];
    if (typed("ids", [](const auto& v) { return v.is_object(); }, "an object")) {
        for (auto it = j["ids"].begin(); it != j["ids"].end(); ++it) {
            if (!it.value().is_string()) throw ConfigError("job config: ids." + it.key() + " must be a string");
            c.ids[it.key()] = it.value().get<std::string>();
        }
    }
    if (j.contains("params")) c.params = number_map(j["params"], "params");
    if (j.contains("options")) c.options = number_map(j["options"], "options");
    if (typed("seed", [](const auto& v) { return v.is_number_unsigned(); }, "a non-negative integer"))
        c.seed = j["seed"].get<std::uint64_t>();
    if (typed("count", [](const auto& v) { return v.is_number_integer(); }, "an integer")) c.count = j["count"];
    if (j.contains("tol") && !j["tol"].is_null()) {
        if (!j["tol"].is_number()) throw ConfigError("job config: 'tol' must be a number or null");
        c.tol = j["tol"].get<double>();
    }
    if (typed("output", [](const auto& v) { return v.is_string(); }, "a string")) c.output = j["output"];
    if (typed("json", [](const auto& v) { return v.is_boolean(); }, "a boolean")) c.json = j["json"];
    if (typed("timing", [](const auto& v) { return v.is_boolean(); }, "a boolean")) c.timing = j["timing"];
    if (typed("threads", [](const auto& v) { return v.is_number_integer(); }, "an integer")) c.threads = j["threads"];
    return c;
}

Params parse_param_list(const std::vector<std::string>& items) {
    Params out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) throw ConfigError("--param: expected key=value, got '" + kv + "'");
            const std::string key = kv.substr(0, eq), text = kv.substr(eq + 1);
            char* end = nullptr;
            const double v = std::strtod(text.c_str(), &end);
            if (text.empty() || *end != '\0' || !std::isfinite(v)) {
                throw ConfigError("--param: value of '" + key + "' is not a finite number: '" + text + "'");
            }
            out[key] = v;
        }
    }
    return out;
}

// ----------------------------------------------------------------------------
// Jobs
// ----------------------------------------------------------------------------

namespace {

std::optional<double> option(const JobConfig& j, const std::string& k) {
    auto it = j.options.find(k);
    if (it == j.options.end()) return std::nullopt;
    return it->second;
}

int as_int(double v, const std::string& what) {
    if (v != std::round(v) || std::abs(v) > 1e9) throw ConfigError(what + " must be an integer");
    return static_cast<int>(v);
}

std::string need_id(const JobConfig& j, const std::string& k) {
    auto it = j.ids.find(k);
    if (it == j.ids.end() || it->second.empty()) throw ConfigError(j.command + ": missing --" + k);
    return it->second;
}

std::string id_or(const JobConfig& j, const std::string& k, const std::string& fallback) {
    auto it = j.ids.find(k);
    return it == j.ids.end() || it->second.empty() ? fallback : it->second;
}

SamplingPlan plan_of(const JobConfig& j) {
    if (j.count <= 0) throw ConfigError("--count must be positive");
    SamplingPlan p;
    p.seed = j.seed;
    p.count = j.count;
    return p;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json catalog_item_json(const CatalogItem& item) {
    nlohmann::json j;
    j["id"] = item.id;
    j["description"] = item.description;
    j["params"] = nlohmann::json::array();
    for (const auto& p : item.params) j["params"].push_back({{"name", p.name}, {"default", p.default_value}, {"note", p.note}});
    j["expectations"] = nlohmann::json::array();
    for (const auto& e : item.expectations) j["expectations"].push_back({{"kind", e.kind}, {"mu", e.mu}, {"a", e.a}});
    return j;
}

std::string report_line(const std::string& what, bool pass, double max, double tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: %s (max %.3e, tol %.1e)", what.c_str(), pass ? "pass" : "FAIL", max, tol);
    return buf;
}

/// Writes the document to --output (with a one-line summary on stdout) or to stdout.
int emit(const JobConfig& job, const nlohmann::json& doc, bool pass, const std::string& summary, std::ostream& out) {
    const std::string text = dump_json(doc) + "\n";
    if (job.output.empty()) {
        out << text;
    } else {
        std::ofstream f(job.output, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + job.output + "'");
        f << text;
        out << summary << "\n";
    }
    return pass ? 0 : 1;
}

int cmd_gallery_list(const JobConfig& job, std::ostream& out) {
    const auto items = catalog();
    if (job.json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& it : items) arr.push_back(catalog_item_json(it));
        out << dump_json(arr) << "\n";
        return 0;
    }
    for (const auto& it : items) {
        std::string names;
        for (const auto& p : it.params) names += (names.empty() ? "" : ",") + p.name;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-24s", it.id.c_str());
        out << buf << it.description << (names.empty() ? "" : "  [" + names + "]") << "\n";
    }
    return 0;
}

int cmd_gallery_show(const JobConfig& job, std::ostream& out) {
    const std::string id = need_id(job, "entry");
    for (const auto& it : catalog()) {
        if (it.id == id) {
            out << dump_json(catalog_item_json(it)) << "\n";
            return 0;
        }
    }
    throw ConfigError("unknown gallery entry '" + id + "'");
}

GalleryEntry build_metric(const JobConfig& job) {
    const std::string id = need_id(job, "metric");
    Params p = job.params;
    if (auto dim = option(job, "dim"); dim && !p.count("n")) {
        for (const auto& it : catalog()) {
            if (it.id != id) continue;
            for (const auto& spec : it.params)
                if (spec.name == "n") p["n"] = *dim;
        }
    }
    return build(id, p);
}

std::optional<double> expected(const GalleryEntry& e, const std::string& kind) {
    for (const auto& ex : e.expectations)
        if (ex.kind == kind) return ex.mu;
    return std::nullopt;
}

double default_tol(const std::string& check) {
    if (check == "einstein" || check == "theorem") return 1e-6;
    if (check == "sectional") return 1e-7;
    if (check == "prop") return 1e-5;
    return 1e-8;
}

double pair_mu_default(const std::string& pair, const Params& params) {
    if (params.count("mu")) return params.at("mu");
    return pair == "const_curv" || pair == "conformal" || pair == "projective" ? 1.0 : 0.0;
}

int cmd_verify(const JobConfig& job, std::ostream& out) {
    const std::string check = need_id(job, "check");
    const SamplingPlan plan = plan_of(job);
    const double tol = job.tol.value_or(default_tol(check));
    const int threads = job.threads;
    const int dim = as_int(option(job, "dim").value_or(4.0), "--dim");

    VerificationReport r;
    if (check == "einstein") {
        const GalleryEntry e = build_metric(job);
        const auto mubar = option(job, "mubar") ? option(job, "mubar") : expected(e, "einstein");
        if (!mubar) throw ConfigError("verify einstein: --mubar is required for '" + e.id + "'");
        r = check_einstein(e.metric, *mubar, plan, tol, threads);
    } else if (check == "sectional") {
        const GalleryEntry e = build_metric(job);
        const auto mu = option(job, "mu") ? option(job, "mu") : expected(e, "sectional");
        if (!mu) throw ConfigError("verify sectional: --mu is required for '" + e.id + "'");
        r = check_sectional_constant(e.metric, *mu, plan, tol, threads);
    } else if (check == "expectations") {
        const GalleryEntry e = build_metric(job);
        nlohmann::json doc;
        doc["check"] = "expectations";
        doc["metric"] = e.id;
        doc["reports"] = nlohmann::json::array();
        bool pass = true;
        for (const auto& ex : e.expectations) {
            const std::string kind = covering_check(ex.kind);
            const VerificationReport one =
                check_expectation(e, ex, plan, job.tol.value_or(default_tol(kind)), threads);
            pass = pass && one.pass;
            doc["reports"].push_back(one.to_json(job.timing));
        }
        doc["pass"] = pass;
        return emit(job, doc, pass, std::string("expectations of ") + e.id + ": " + (pass ? "pass" : "FAIL"), out);
    } else if (check == "prop") {
        const std::string prop = need_id(job, "prop");
        const GeometryPair pair = named_pair(id_or(job, "pair", "symplectic"), dim, job.params);
        Params pp = job.params;
        pp.emplace("n", dim);
        const DeformationProfile prof = named_profile(need_id(job, "profile"), pp);
        r = check_proposition(prop, pair, prof, plan, tol, threads);
    } else if (check == "condition" || check == "conditions") {
        const std::string pair_id = id_or(job, "pair", "const_curv");
        const GeometryPair pair = named_pair(pair_id, dim, job.params);
        const double a = option(job, "a").value_or(job.params.count("a") ? job.params.at("a") : 1.0);
        const double mu = option(job, "mu").value_or(pair_mu_default(pair_id, job.params));
        r = check == "conditions" ? check_conditions(pair, a, mu, plan, tol, threads)
                                  : check_condition(need_id(job, "condition"), pair, a, mu, plan, tol, threads);
    } else if (check == "theorem") {
        Scenario sc{id_or(job, "pair", ""), id_or(job, "profile", ""), job.params};
        if (option(job, "dim")) sc.params["n"] = dim;
        r = check_deformation_theorem(need_id(job, "theorem"), sc, plan, tol, threads);
    } else {
        throw ConfigError("unknown check '" + check +
                          "' (einstein, sectional, expectations, prop, condition, conditions, theorem)");
    }
    return emit(job, r.to_json(job.timing), r.pass, report_line(r.check, r.pass, r.max, r.tol), out);
}

GeneralSolverConfig solver_config(const JobConfig& job) {
    GeneralSolverConfig c;
    c.n = as_int(option(job, "n").value_or(c.n), "--n");
    c.sign = as_int(option(job, "sign").value_or(c.sign), "--sign");
    c.mu = option(job, "mu").value_or(c.mu);
    c.mubar = option(job, "mubar").value_or(c.mubar);
    c.a = option(job, "a").value_or(c.a);
    c.E = option(job, "E").value_or(c.E);
    c.F = option(job, "F").value_or(c.F);
    c.b2_lo = option(job, "b2_lo").value_or(c.b2_lo);
    c.b2_hi = option(job, "b2_hi").value_or(c.b2_hi);
    c.anchor_b2 = option(job, "anchor_b2").value_or(c.anchor_b2);
    c.anchor_rho = option(job, "anchor_rho").value_or(c.anchor_rho);
    return c;
}

int cmd_solve(const JobConfig& job, std::ostream& out) {
    GeneralSolverConfig cfg = solver_config(job);
    const int grid = as_int(option(job, "grid").value_or(50.0), "--grid");
    const double tol = job.tol.value_or(1e-7);
    // Without an explicit anchor, try a fixed list of anchor values of varrho
    // and keep the first that covers the interval.
    std::vector<double> anchors;
    const bool automatic = !option(job, "anchor_rho");
    if (automatic) {
        for (double v : {2.5, 1.0, 0.5, 5.0, 0.25, 10.0, 0.1}) anchors.push_back(0.5 * std::log(v / cfg.anchor_b2));
    } else {
        anchors.push_back(cfg.anchor_rho);
    }
    std::optional<SolutionFamily> sol;
    std::string first_error;
    for (double rho : anchors) {
        cfg.anchor_rho = rho;
        try {
            sol = solve_general(cfg);
            break;
        } catch (const RadicandError& e) {
            if (first_error.empty()) first_error = e.what();
            if (!automatic) throw;
        } catch (const InversionError& e) {
            if (first_error.empty()) first_error = e.what();
            if (!automatic) throw;
        }
    }
    if (!sol) throw RadicandError(first_error + " (no automatic anchor worked; pass --anchor-rho)");
    nlohmann::json doc = sol->to_json(grid);
    doc["config"] = {{"n", cfg.n},         {"mu", cfg.mu},       {"mubar", cfg.mubar}, {"a", cfg.a},
                     {"E", cfg.E},         {"F", cfg.F},         {"sign", cfg.sign},   {"b2_lo", cfg.b2_lo},
                     {"b2_hi", cfg.b2_hi}, {"anchor_b2", cfg.anchor_b2}, {"anchor_rho", cfg.anchor_rho}};
    doc["anchor"] = {{"b2", cfg.anchor_b2},
                     {"rho", cfg.anchor_rho},
                     {"varrho", cfg.anchor_b2 * std::exp(2.0 * cfg.anchor_rho)},
                     {"automatic", automatic}};
    const double gate = sol->gate_residual(grid);
    const bool pass = gate <= tol;
    doc["self_check"] = {{"residual", gate}, {"tol", tol}, {"pass", pass}};
    return emit(job, doc, pass, report_line("solve self-check", pass, gate, tol), out);
}

std::function<Jet(const Jet&)> polynomial(std::vector<double> c) {
    return [c](const Jet& t) {
        Jet acc(0.0);
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
        return acc;
    };
}

/// Profile file: {"kappa": [c0, c1, ...], "rho": [...], "nu": [...], "b2_lo", "b2_hi", "name"}
/// with ascending polynomial coefficients, or {"solver": {n, mu, mubar, a, E, F, ...}}.
DeformationProfile load_profile_file(const std::string& path, double* mubar) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read profile file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("profile file '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ConfigError("profile file must hold a JSON object");
    if (j.contains("solver")) {
        JobConfig tmp;
        tmp.options = number_map(j["solver"], "solver");
        SolutionFamily s = solve_general(solver_config(tmp));
        *mubar = s.mubar;
        return s.profile;
    }
    auto coeffs = [&](const char* k, std::vector<double> fallback) {
        if (!j.contains(k)) return fallback;
        if (!j[k].is_array() || j[k].empty()) throw ConfigError(std::string("profile file: '") + k + "' must be a non-empty array");
        std::vector<double> c;
        for (const auto& v : j[k]) {
            if (!v.is_number()) throw ConfigError(std::string("profile file: '") + k + "' must hold numbers");
            c.push_back(v.get<double>());
        }
        return c;
    };
    if (!j.contains("kappa")) throw ConfigError("profile file: needs 'kappa' or 'solver'");
    const double lo = j.value("b2_lo", 0.0);
    const double hi = j.contains("b2_hi") ? j["b2_hi"].get<double>() : std::numeric_limits<double>::infinity();
    return DeformationProfile::from_kappa(j.value("name", std::string("file")), polynomial(coeffs("kappa", {})),
                                          polynomial(coeffs("rho", {0.0})), polynomial(coeffs("nu", {1.0})), lo, hi);
}

nlohmann::json pair_values(const GeometryPair& p, std::span<const double> x) {
    return {{"metric", matrix_json(p.metric.value(x))}, {"oneform", vector_json(p.oneform.value(x))}};
}

int cmd_deform(const JobConfig& job, std::ostream& out) {
    const int dim = as_int(option(job, "dim").value_or(4.0), "--dim");
    const GeometryPair pair = named_pair(id_or(job, "pair", "symplectic"), dim, job.params);
    double mubar = std::numeric_limits<double>::quiet_NaN();
    DeformationProfile prof;
    if (job.ids.count("profile_file")) {
        prof = load_profile_file(job.ids.at("profile_file"), &mubar);
    } else {
        Params pp = job.params;
        pp.emplace("n", dim);
        prof = named_profile(need_id(job, "profile"), pp, &mubar);
    }
    const GeometryPair deformed = apply(pair, prof);
    const std::vector<Sample> ref = draw_samples(deformed.domain(), SamplingPlan{job.seed, 1, 1000, {}, {}});
    const std::vector<double>& x = ref.front().x;

    nlohmann::json doc;
    doc["pair"] = pair.name;
    doc["profile"] = prof.name();
    doc["dim"] = dim;
    doc["b2_interval"] = {prof.lo(), prof.hi()};
    doc["predicted_mubar"] = std::isnan(mubar) ? nlohmann::json(nullptr) : nlohmann::json(mubar);
    doc["reference"] = {{"x", x}, {"input", pair_values(pair, x)}, {"output", pair_values(deformed, x)}};

    const std::string then = id_or(job, "then_check", "");
    if (then.empty()) return emit(job, doc, true, "deformed " + pair.name + " by " + prof.name(), out);

    const SamplingPlan plan = plan_of(job);
    const double tol = job.tol.value_or(default_tol(then));
    VerificationReport r;
    if (then == "einstein") {
        const double m = option(job, "mubar").value_or(mubar);
        if (std::isnan(m)) throw ConfigError("deform --then-check einstein: --mubar is required for this profile");
        r = check_einstein(deformed.metric, m, plan, tol, job.threads);
    } else if (then == "sectional") {
        const double m = option(job, "mu").value_or(mubar);
        if (std::isnan(m)) throw ConfigError("deform --then-check sectional: --mu is required for this profile");
        r = check_sectional_constant(deformed.metric, m, plan, tol, job.threads);
    } else if (then == "conditions") {
        r = check_conditions(deformed, option(job, "a").value_or(1.0), option(job, "mu").value_or(0.0), plan, tol,
                             job.threads);
    } else {
        r = check_condition(then, deformed, option(job, "a").value_or(1.0), option(job, "mu").value_or(0.0), plan, tol,
                            job.threads);
    }
    doc["check"] = r.to_json(job.timing);
    return emit(job, doc, r.pass, report_line(then, r.pass, r.max, r.tol), out);
}

}  // namespace

int run_job(const JobConfig& job, std::ostream& out, std::ostream& err) {
    try {
        if (job.command == "gallery_list") return cmd_gallery_list(job, out);
        if (job.command == "gallery_show") return cmd_gallery_show(job, out);
        if (job.command == "verify") return cmd_verify(job, out);
        if (job.command == "solve") return cmd_solve(job, out);
        if (job.command == "deform") return cmd_deform(job, out);
        throw ConfigError("unknown command '" + job.command + "'");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParamError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"betaforge: beta-deformations of Riemannian metrics"};
    app.require_subcommand(0, 1);
    std::string config_path;
    std::vector<std::function<void(JobConfig&)>> edits;
    app.add_option("--config", config_path, "job file in the JobConfig schema");

    auto id_opt = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
        sub->add_option_function<std::string>(
            flag, [&edits, key](const std::string& v) { edits.push_back([key, v](JobConfig& j) { j.ids[key] = v; }); },
            help);
    };
    auto num_opt = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
        sub->add_option_function<double>(
            flag, [&edits, key](double v) { edits.push_back([key, v](JobConfig& j) { j.options[key] = v; }); }, help);
    };
    auto common = [&](CLI::App* sub, bool sampling) {
        sub->add_option("--config", config_path, "job file in the JobConfig schema");
        sub->add_option_function<std::vector<std::string>>(
            "--param",
            [&edits](const std::vector<std::string>& v) {
                edits.push_back([v](JobConfig& j) {
                    for (const auto& [k, x] : parse_param_list(v)) j.params[k] = x;
                });
            },
            "key=value[,key=value...]");
        sub->add_option_function<std::string>(
            "--output", [&edits](const std::string& v) { edits.push_back([v](JobConfig& j) { j.output = v; }); },
            "write the JSON document to this file");
        sub->add_option_function<double>(
            "--tol", [&edits](double v) { edits.push_back([v](JobConfig& j) { j.tol = v; }); }, "tolerance");
        if (!sampling) return;
        sub->add_option_function<std::uint64_t>(
            "--seed", [&edits](std::uint64_t v) { edits.push_back([v](JobConfig& j) { j.seed = v; }); }, "RNG seed");
        sub->add_option_function<int>(
            "--count", [&edits](int v) { edits.push_back([v](JobConfig& j) { j.count = v; }); }, "sample count");
        sub->add_option_function<int>(
            "--threads", [&edits](int v) { edits.push_back([v](JobConfig& j) { j.threads = v; }); },
            "worker count (default BETAFORGE_THREADS or hardware)");
        sub->add_flag_callback(
            "--timing", [&edits] { edits.push_back([](JobConfig& j) { j.timing = true; }); },
            "record wall-clock ms in reports");
    };

    CLI::App* gallery = app.add_subcommand("gallery", "list or show gallery entries");
    gallery->require_subcommand(1);
    CLI::App* list = gallery->add_subcommand("list", "list catalog entries");
    list->add_flag_callback("--json", [&edits] { edits.push_back([](JobConfig& j) { j.json = true; }); }, "JSON output");
    CLI::App* show = gallery->add_subcommand("show", "parameter schema and expectations of one entry");
    show->add_option_function<std::string>(
            "id", [&edits](const std::string& v) { edits.push_back([v](JobConfig& j) { j.ids["entry"] = v; }); },
            "entry id")
        ->required();

    CLI::App* verify = app.add_subcommand("verify", "run a sampled verification check");
    common(verify, true);
    id_opt(verify, "--check", "check", "einstein, sectional, expectations, prop, condition, conditions, theorem");
    id_opt(verify, "--metric", "metric", "gallery id");
    id_opt(verify, "--pair", "pair", "symplectic, const_curv, projective, generic or a gallery id");
    id_opt(verify, "--profile", "profile", "profile or family id");
    id_opt(verify, "--prop", "prop", "3.2, 3.3, 3.4, 4.1, A1, A2, A3");
    id_opt(verify, "--theorem", "theorem", "4.4, 5.1, 6.1, 6.2, 7.2");
    id_opt(verify, "--condition", "condition", "killing, condition_a, condition_b, t00_minus_alpha2, rank");
    num_opt(verify, "--dim", "dim", "dimension");
    num_opt(verify, "--mubar", "mubar", "Einstein constant");
    num_opt(verify, "--mu", "mu", "curvature constant");
    num_opt(verify, "--a", "a", "constant of condition A");

    CLI::App* solve = app.add_subcommand("solve", "general solver for X = T = 0");
    common(solve, false);
    for (const char* k : {"n", "mu", "mubar", "a", "E", "F", "sign", "grid"}) num_opt(solve, std::string("--") + k, k, k);
    num_opt(solve, "--b2-lo", "b2_lo", "lower end of the b^2 interval");
    num_opt(solve, "--b2-hi", "b2_hi", "upper end of the b^2 interval");
    num_opt(solve, "--anchor-b2", "anchor_b2", "b^2 at which rho is pinned");
    num_opt(solve, "--anchor-rho", "anchor_rho", "rho at the anchor (automatic when omitted)");

    CLI::App* deform = app.add_subcommand("deform", "apply a profile to a pair, optionally followed by a check");
    common(deform, true);
    id_opt(deform, "--pair", "pair", "symplectic, const_curv, projective, generic or a gallery id");
    id_opt(deform, "--profile", "profile", "profile or family id");
    id_opt(deform, "--profile-file", "profile_file", "JSON profile (polynomial kappa/rho/nu or solver block)");
    id_opt(deform, "--then-check", "then_check", "einstein, sectional, conditions or a single condition");
    num_opt(deform, "--dim", "dim", "dimension");
    num_opt(deform, "--mubar", "mubar", "Einstein constant");
    num_opt(deform, "--mu", "mu", "curvature constant");
    num_opt(deform, "--a", "a", "constant of condition A");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    std::string command;
    if (list->parsed()) command = "gallery_list";
    else if (show->parsed()) command = "gallery_show";
    else if (verify->parsed()) command = "verify";
    else if (solve->parsed()) command = "solve";
    else if (deform->parsed()) command = "deform";

    JobConfig job;
    try {
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("cannot read config '" + config_path + "'");
            job = JobConfig::from_json(nlohmann::json::parse(f));
        }
        if (!command.empty()) job.command = command;
        if (job.command.empty()) {
            err << app.help();
            return 2;
        }
        for (const auto& edit : edits) edit(job);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    }
    return run_job(job, out, err);
}

}  // namespace betaforge
