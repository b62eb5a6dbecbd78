#pragma once

#include <array>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "betaforge/deformation.hpp"
#include "betaforge/gallery.hpp"

namespace betaforge {

/// Data of the Einstein ODE system at one value of b^2. `a` is the constant
/// of condition A (t_00 = -(a^2 - mu b^2) alpha^2 + ...).
struct ODEPoint {
    double b2 = 1;
    double delta = 1, delta1 = 0, delta2 = 0;
    double rho = 0, rho1 = 0, rho2 = 0;
    int n = 4;
    double mu = 0, mubar = 0, a = 1;

    /// ParamError unless delta > 0, n >= 3, a != 0 and b2 > 0.
    void validate() const;
    static ODEPoint from_profile(const DeformationProfile& p, double b2, int n, double mu, double mubar, double a);
};

/// Coefficients of alpha^2, beta^2, s_0^2, t_00, beta t_0, s_0|0 in the Einstein
/// condition for a Killing form; t_trace = t^i_i and t are pointwise data.
std::array<double, 6> coeffs_E(const ODEPoint& pt, double t_trace, double t);

/// Same condition after substituting condition A: coefficients of
/// alpha^2, beta^2, s_0^2, s_0|0.
std::array<double, 4> coeffs_E_reduced(const ODEPoint& pt);

struct XYZT {
    double x = 0, y = 0, z = 0, t = 0;
};

/// X, Y, Z under conditions A and B, plus the combination T. LimitError when
/// a^2 - mu b^2 is too small for Z.
XYZT coeffs_XYZT(const ODEPoint& pt);

/// b^2(1 - delta) X + b^4 Y - (a^2 - mu b^2) b^4 delta Z - (n - 2) T.
double xyzt_identity_residual(const ODEPoint& pt);

// ----------------------------------------------------------------------------
// Special functions
// ----------------------------------------------------------------------------

struct JacobiValues {
    double sn = 0, cn = 1, dn = 1;
};

/// sn, cn, dn with parameter m = k^2 in [0, 1], by descending AGM.
JacobiValues jacobi(double u, double m);
/// Complete elliptic integral K(m) via the AGM.
double elliptic_k(double m);
/// Jet versions, built from the Taylor series of the Jacobi system.
Jet jacobi_sn(const Jet& u, double m);
Jet jacobi_cn(const Jet& u, double m);

/// Roots of c[0] x^d + c[1] x^(d-1) + ... + c[d] via the companion matrix.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);
/// Real roots in ascending order; RootError if any root has a relative
/// imaginary part above `tol`.
std::vector<double> real_polynomial_roots(const std::vector<double>& coeffs, double tol = 1e-9);

// ----------------------------------------------------------------------------
// Solution families
// ----------------------------------------------------------------------------

/// Deformation profile solving X = T = 0 together with its parameters.
struct SolutionFamily {
    std::string family;
    Params params;
    int n = 4;
    double mu = 0;
    double a = 1;
    double mubar = 0;  // predicted Ricci constant of the deformed metric
    double lo = 0, hi = 0;
    DeformationProfile profile;

    struct GridPoint {
        double b2, delta, rho;
    };
    /// `count` points spread evenly over the open interval (lo, hi).
    [[nodiscard]] std::vector<double> grid_b2(int count = 50) const;
    [[nodiscard]] std::vector<GridPoint> grid(int count = 50) const;
    [[nodiscard]] ODEPoint ode_point(double b2) const;
    /// max(|X|, |T|) over the grid.
    [[nodiscard]] double gate_residual(int count = 50) const;
    [[nodiscard]] nlohmann::json to_json(int count = 50) const;
};

std::vector<std::string> family_ids();
/// Parameter names and defaults of a family.
Params family_defaults(const std::string& family);
/// Closed-form family by id; ParamError on invalid parameters, RootError when
/// a required polynomial root is complex. Every family accepts b2_lo/b2_hi to
/// override its interval.
SolutionFamily closed_form_profile(const std::string& family, const Params& params = {});

/// Settings of the general solver. ϱ = b^2 e^{2 rho} is pinned to
/// anchor_b2 * e^{2 anchor_rho} at b^2 = anchor_b2.
struct GeneralSolverConfig {
    int n = 4;
    double mu = 0, mubar = 0, a = 1;
    double E = 0, F = 0;
    int sign = 1;
    double b2_lo = 1.25, b2_hi = 4.0;
    double anchor_b2 = 2.0;
    double anchor_rho = 0.11157177565710488;  // ϱ = 2.5 at b^2 = 2
};

/// 1/f(ϱ)^2 of the general solution; positive where the solution exists.
double general_radicand(int n, double E, double F, double mubar, double a, double varrho);
Jet general_radicand(int n, double E, double F, double mubar, double a, const Jet& varrho);
/// Same quantity through the closed antiderivative of ι^{-2}(ι^2 - 1)^m; E != 0.
double general_radicand_alt(int n, double E, double F, double mubar, double a, double varrho);

/// Quadrature-and-inversion solution; RadicandError or InversionError with
/// the offending ϱ in the message.
SolutionFamily solve_general(const GeneralSolverConfig& cfg);

/// Radial data psi, phi, rest of the warped Einstein metric in the radius r.
RadialProfile warped_einstein_profile(int n, double E, double F, double mubar);
/// Warped Einstein metric on a shell of R^n, n in {4, 8}. With r_lo/r_hi left
/// as NaN the shell is the first radicand-positive interval beyond r = 0.1,
/// shrunk by 0.05 next to each radicand zero.
MetricField warped_einstein_metric(int n, double E, double F, double mubar,
                                   double r_lo = std::numeric_limits<double>::quiet_NaN(),
                                   double r_hi = std::numeric_limits<double>::quiet_NaN());

}  // namespace betaforge
