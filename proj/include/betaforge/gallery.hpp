#pragma once

#include <functional>
#include <map>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "betaforge/fields.hpp"

namespace betaforge {

using Params = std::map<std::string, double>;

/// Claim attached to a gallery entry that the verifier can check.
struct Expectation {
    std::string kind;  // einstein, sectional, killing, condition_a, condition_b, t00_minus_alpha2, rank
    double mu = 0;     // Einstein constant or curvature
    double a = 0;      // for condition_a
};

struct GalleryEntry {
    std::string id;
    std::string description;
    Params params;
    MetricField metric;
    std::optional<GeometryPair> pair;
    std::vector<Expectation> expectations;
};

struct ParamSpec {
    std::string name;
    double default_value;
    std::string note;
};

struct CatalogItem {
    std::string id;
    std::string description;
    std::vector<ParamSpec> params;
    std::vector<Expectation> expectations;  // at the default parameters
};

/// Deterministic listing, one item per constructor id.
std::vector<CatalogItem> catalog();
/// Build an entry by id; unknown ids and invalid parameters raise ParamError.
GalleryEntry build(const std::string& id, const Params& params = {});

// ----------------------------------------------------------------------------
// Direct constructors
// ----------------------------------------------------------------------------

/// Standard complex structure on R^n: (Jx)_{2k} = x_{2k+1}, (Jx)_{2k+1} = -x_{2k}.
template <class T>
std::vector<T> complex_structure(std::span<const T> x) {
    std::vector<T> out(x.size());
    for (std::size_t k = 0; k + 1 < x.size(); k += 2) {
        out[k] = x[k + 1];
        out[k + 1] = -x[k];
    }
    return out;
}

MetricField euclidean(int n);
/// Euclidean metric with beta = a <Jx, y>.
GeometryPair symplectic_pair(int n, double a);
/// Stereographic constant-curvature metric 2|y|/(1 + mu|x|^2) with
/// beta = 4a <Jx, y> / (1 + mu|x|^2)^2.
GeometryPair conformal_pair(int n, double mu, double a);
/// Gnomonic constant-curvature metric with beta = a <Jx, y> / (1 + mu|x|^2).
GeometryPair projective_pair(int n, double mu, double a);

/// Smooth pair with no special structure: beta is not Killing and the metric
/// is not Einstein. Used as the generic case of the tensor identity checks.
GeometryPair generic_pair(int n);
/// Same metric, beta + eps * x_0 (x_0 dx_0 + x_1 dx_1); breaks the Killing
/// property for eps != 0.
GeometryPair perturbed_pair(const GeometryPair& p, double eps);

/// Radial data of a cohomogeneity-one metric
/// psi(r) dr^2 + phi(r) sigma_1^2 + rest(r) (sigma_2^2 + ...) in terms of r.
struct RadialProfile {
    std::function<Jet(const Jet& r)> psi, phi, rest;
};
/// Cartesian metric on R^n (n even) from radial data; sigma_1 = <Jx, dx>/r^2.
MetricField warped_metric(int n, RadialProfile prof, Domain domain, std::string name);
/// One-form phi(r) sigma_1, dual to the circle action under the warped metric.
OneFormField warped_circle_form(int n, std::function<Jet(const Jet& r)> phi, Domain domain);

/// Pullback of a metric under x -> x * R(|x|)/|x|.
MetricField radial_pullback(const MetricField& g, std::function<Jet(const Jet& r)> radius_map, Domain domain,
                            std::string name);

/// Shell domain whose sampling box (lo/hi) keeps uniform rejection sampling
/// efficient: the full bounding cube up to n = 4, beyond that a centred cube
/// whose mean |x|^2 sits mid-shell.
Domain sampling_shell(int n, double inner, double outer);

/// Global coframes on S^3 (left-invariant) and S^7 extended to R^4 and R^8:
/// component k of form i at x, so that sigma_i = sum_k frame[i][k] dx_k.
std::vector<std::vector<double>> s3_frame(std::span<const double> x);
std::vector<std::vector<double>> s7_frame(std::span<const double> x);

}  // namespace betaforge
