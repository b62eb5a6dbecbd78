#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "betaforge/beta_tensors.hpp"
#include "betaforge/fields.hpp"

namespace betaforge {

/// Smooth function of t = b^2 on the open interval (lo, hi).
struct ScalarProfile {
    std::function<Jet(const Jet& t)> fn;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool contains(double t) const { return t > lo && t < hi; }
    /// Value and derivatives in t up to `order`.
    [[nodiscard]] Jet at(double t, int order) const;
    /// One-variable program usable with jet_eval and fd_oracle.
    [[nodiscard]] ScalarProgram as_program() const;
};

/// Factor jets at one value of b^2; delta = 1 - b^2 kappa.
struct FactorJets {
    Jet kappa, delta, rho, nu;
};

/// Factors and their first two b^2-derivatives at one value of b^2.
struct FactorDerivs {
    double b2 = 0;
    double kappa = 0, kappa1 = 0, kappa2 = 0;
    double delta = 1, delta1 = 0, delta2 = 0;
    double rho = 0, rho1 = 0, rho2 = 0;
    double nu = 1, nu1 = 0, nu2 = 0;
};

/// Deformation factors (kappa, rho, nu) as functions of b^2.
///
/// The deformed data are a_ij -> e^{2 rho}(a_ij - kappa b_i b_j) and
/// b_i -> nu b_i. One evaluator produces all factors so that profiles built
/// from an expensive inversion share the work.
class DeformationProfile {
public:
    using Evaluator = std::function<FactorJets(const Jet& t)>;

    DeformationProfile() = default;
    DeformationProfile(std::string name, Evaluator eval, double lo = 0.0,
                       double hi = std::numeric_limits<double>::infinity());

    static DeformationProfile identity();
    static DeformationProfile from_kappa(std::string name, std::function<Jet(const Jet&)> kappa,
                                         std::function<Jet(const Jet&)> rho, std::function<Jet(const Jet&)> nu,
                                         double lo = 0.0, double hi = std::numeric_limits<double>::infinity());
    /// kappa = (1 - delta)/t; the interval must stay away from t = 0.
    static DeformationProfile from_delta(std::string name, std::function<Jet(const Jet&)> delta,
                                         std::function<Jet(const Jet&)> rho, std::function<Jet(const Jet&)> nu,
                                         double lo = 0.0, double hi = std::numeric_limits<double>::infinity());

    /// Factor jets at t; DomainError outside the interval or where nu = 0,
    /// SignatureError where delta <= 0.
    [[nodiscard]] FactorJets at(const Jet& t) const;
    [[nodiscard]] FactorDerivs derivs(double t) const;

    [[nodiscard]] ScalarProfile kappa() const;
    [[nodiscard]] ScalarProfile rho() const;
    [[nodiscard]] ScalarProfile nu() const;
    [[nodiscard]] ScalarProfile delta() const;

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] double lo() const { return lo_; }
    [[nodiscard]] double hi() const { return hi_; }
    [[nodiscard]] bool contains(double t) const { return t > lo_ && t < hi_; }
    [[nodiscard]] DeformationProfile with_nu(std::function<Jet(const Jet&)> nu, std::string name) const;

private:
    std::string name_ = "identity";
    Evaluator eval_;
    double lo_ = 0.0;
    double hi_ = std::numeric_limits<double>::infinity();
};

/// Deformed pair (e^{2 rho}(a - kappa b b), nu b). The output domain is the
/// input domain restricted to b^2 inside the profile interval; evaluation
/// raises SignatureError where delta <= 0.
GeometryPair apply(const GeometryPair& g, const DeformationProfile& p);

/// Single profile equivalent to applying `inner` and then `outer`.
DeformationProfile compose(const DeformationProfile& outer, const DeformationProfile& inner);

/// Replace nu by k (1 - b^2 kappa) e^{2 rho}.
DeformationProfile killing_transfer_nu(const DeformationProfile& p, double k);

/// Residual of nu (kappa + b^2 kappa')/delta - 2 nu rho' + nu' at t.
double killing_transfer_residual(const DeformationProfile& p, double t);

// ----------------------------------------------------------------------------
// Predictors. All take the undeformed bundle at x and the factor derivatives
// at b^2(x).
// ----------------------------------------------------------------------------

struct SbarPrediction {
    Eigen::MatrixXd s_ij;
    Eigen::VectorXd s_i;
};

Eigen::MatrixXd predict_rbar(const BetaBundle& bb, const FactorDerivs& f);
SbarPrediction predict_sbar(const BetaBundle& bb, const FactorDerivs& f);
double predict_tbar00(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y);

/// One coefficient of a predictor table.
struct NamedCoefficient {
    std::string id;
    double value = 0;
};

/// Scalar prediction with its term list (coefficient times tensor factor).
struct ScalarPrediction {
    double value = 0;
    std::vector<NamedCoefficient> coefficients;
    std::vector<double> factors;  // factors[i] multiplies coefficients[i]
};

struct MatrixPrediction {
    Eigen::MatrixXd value;
    std::vector<NamedCoefficient> coefficients;
    std::vector<Eigen::MatrixXd> factors;
};

/// Coefficient tables, exposed so each entry can be tested on its own.
std::vector<NamedCoefficient> tbar00_coefficients(const FactorDerivs& f);
std::vector<NamedCoefficient> riemann_coefficients(const FactorDerivs& f);
std::vector<NamedCoefficient> rbb_coefficients(const FactorDerivs& f);
std::vector<NamedCoefficient> ricci_coefficients(const FactorDerivs& f, int n);
std::vector<NamedCoefficient> ricci_killing_coefficients(const FactorDerivs& f, int n);

/// Deformed R^i_k(y) as a matrix (row i, column k).
MatrixPrediction predict_riemann(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y);
/// Deformed R^i_k bbar_i bbar^k.
ScalarPrediction predict_rbb(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y);
/// Deformed Ric_00 for arbitrary beta.
ScalarPrediction predict_ricoo(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y);
/// Deformed Ric_00 for Killing beta; NotKillingError when max|r_ij| exceeds `killing_tol`.
ScalarPrediction predict_ricoo_killing(const BetaBundle& bb, const FactorDerivs& f, const Eigen::VectorXd& y,
                                       double killing_tol = 1e-9);

/// Profile for a deformed pair at x: derivatives at b^2(x) of the undeformed pair.
FactorDerivs factor_derivs_at(const GeometryPair& g, const DeformationProfile& p, std::span<const double> x);

}  // namespace betaforge
