#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "betaforge/deformation.hpp"
#include "betaforge/einstein.hpp"
#include "betaforge/gallery.hpp"

namespace betaforge {

/// Seeded sampling of points uniform in a box intersected with a domain, with
/// unit directions. An empty box means the domain's own lo/hi.
struct SamplingPlan {
    std::uint64_t seed = 1;
    int count = 100;
    int budget_factor = 10;  // at most budget_factor * count candidate points
    std::vector<double> box_lo, box_hi;
};

struct Sample {
    int index = 0;
    std::vector<double> x;
    Eigen::VectorXd y;  // unit direction
    Eigen::VectorXd v;  // second unit direction, spans a plane with y
};

/// Points in sorted order of acceptance; DomainExhaustedError past the budget.
std::vector<Sample> draw_samples(const Domain& domain, const SamplingPlan& plan);

/// Per-sample generator for resampling, independent of the worker schedule.
std::mt19937_64 sample_rng(std::uint64_t seed, int index);

struct WorstSample {
    std::vector<double> x, y;
    double residual = 0;
};

struct VerificationReport {
    std::string check;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    int count = 0;
    double tol = 0;
    double max = 0, mean = 0, p95 = 0;
    bool pass = false;
    std::vector<WorstSample> worst;  // up to five, largest residual first
    double ms = 0;                   // wall-clock of the evaluation

    /// Report document. Timing is left null unless requested so that reruns
    /// are byte-identical.
    [[nodiscard]] nlohmann::json to_json(bool with_timing = false) const;
};

/// JSON text with every floating-point number at 17 significant digits.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// Worker count from BETAFORGE_THREADS, else hardware concurrency.
int worker_count();

using ResidualFn = std::function<double(const Sample&)>;

/// Evaluate `residual` on the plan's samples in parallel and reduce in sample
/// order. `threads` <= 0 means worker_count().
VerificationReport run_check(const std::string& check, nlohmann::json params, const Domain& domain,
                             const SamplingPlan& plan, double tol, const ResidualFn& residual, int threads = 0);

// ----------------------------------------------------------------------------
// Checks
// ----------------------------------------------------------------------------

/// ||Ric - (n-1) mubar a||_F / ||a||_F.
VerificationReport check_einstein(const MetricField& g, double mubar, const SamplingPlan& plan, double tol = 1e-6,
                                  int threads = 0);

/// |K(y, v) - mu| over random planes; degenerate planes are redrawn.
VerificationReport check_sectional_constant(const MetricField& g, double mu, const SamplingPlan& plan,
                                            double tol = 1e-7, int threads = 0);

/// Predictions 3.2 (rbar), 3.3 (sbar), 3.4 (tbar00), 4.1 (Ric00, Killing
/// form), A1 (Riemann), A2 (Rbb), A3 (Ric00) against recomputation on the
/// deformed pair; residual |pred - direct| / (1 + |direct|).
VerificationReport check_proposition(const std::string& prop, const GeometryPair& pair,
                                     const DeformationProfile& profile, const SamplingPlan& plan, double tol = 1e-5,
                                     int threads = 0);
const std::vector<std::string>& proposition_ids();

/// Single structural condition of a pair: killing, condition_a, condition_b,
/// t00_minus_alpha2 or rank (|rank s - expected|).
VerificationReport check_condition(const std::string& kind, const GeometryPair& pair, double a, double mu,
                                   const SamplingPlan& plan, double tol = 1e-8, int threads = 0);
/// Killing, condition A and condition B together; the residual is the largest
/// of the three and params record rank s.
VerificationReport check_conditions(const GeometryPair& pair, double a, double mu, const SamplingPlan& plan,
                                    double tol = 1e-8, int threads = 0);

/// Scenario of a deformation theorem: a pair, a profile and numbers.
struct Scenario {
    std::string pair = "";
    std::string profile = "";
    Params params;
};

/// End-to-end theorem checks:
///   4.4 flat symplectic pair + hawking profile, output Ricci-flat;
///   5.1 pair + family profile, output Einstein at the family's mubar;
///   6.1 constant curvature pair + conformal_curved profile with the Killing
///       transfer nu (factor k), output satisfies condition A with k a and is Killing;
///   6.2 constant curvature pair + conformal_curved profile, constant curvature output;
///   7.2 solve_general on the symplectic pair against the warped Einstein metric.
VerificationReport check_deformation_theorem(const std::string& theorem, const Scenario& scenario,
                                             const SamplingPlan& plan, double tol = 1e-6, int threads = 0);
const std::vector<std::string>& theorem_ids();

/// Check that covers an expectation kind on a gallery entry.
VerificationReport check_expectation(const GalleryEntry& entry, const Expectation& ex, const SamplingPlan& plan,
                                     double tol, int threads = 0);
/// Name of the check covering `kind`; ParamError when nothing covers it.
std::string covering_check(const std::string& kind);

// ----------------------------------------------------------------------------
// Named inputs shared by the CLI and the tests
// ----------------------------------------------------------------------------

/// symplectic, const_curv, projective, generic, or any gallery id with a pair.
/// Reads n/dim, mu and a from params where relevant.
GeometryPair named_pair(const std::string& name, int dim, const Params& params);

/// identity, smooth_a, smooth_b (test profiles), general (solve_general with
/// params n, mu, mubar, a, E, F, sign, b2_lo, b2_hi, anchor_b2, anchor_rho) or
/// any closed-form family id. Only keys the profile knows are passed on.
DeformationProfile named_profile(const std::string& name, const Params& params, double* mubar = nullptr);

/// Two distinct smooth profiles with kappa, rho and nu all non-trivial.
DeformationProfile smooth_profile(int which);

}  // namespace betaforge
