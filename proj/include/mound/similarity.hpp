#pragma once
//
// Self-similar solutions h = C_h t^{-(1-2 beta)} f(x / (C_x t^beta)).
//
// With the normalization C_h = C_x^2 / kappa1 the profile obeys
//
//   (f^2)'' = -c(s) s,   s = (1 - 2 beta) f + beta xi f',
//
// where c = 1 while the water advances (s < 0) and c = kappa1/kappa2 while it
// recedes (s > 0). The tip conditions f(1) = 0, f'(1) = -beta/2 fix the
// solution from the right; the exponent beta is the value for which the
// profile also vanishes at xi = 0. Integration runs on g = f^2, which stays
// regular where f has square-root behaviour.

#include <cstddef>
#include <optional>
#include <vector>

#include "mound/core.hpp"

namespace mound {

struct EigenProblem {
    double ratio = 1.0;
    /// Offset from the tip where the series start hands over to Runge-Kutta.
    double eps_tip = 1e-6;
    /// Largest Runge-Kutta step in xi.
    double step = 1e-3;
    /// Bracket width on beta at which bisection stops.
    double beta_tol = 1e-6;
    /// Near the tip the step is limited to tip_grading * (1 - xi).
    double tip_grading = 0.25;
};

void validate(const EigenProblem& prob);

/// g and dg/dxi at xi = 1 - eps from the series
/// g = (beta^2/4) eps^2 - beta (1 - beta)/8 eps^3.
struct TipValues {
    double g = 0.0;
    double dg = 0.0;
};
TipValues taylor_start(double beta, double eps);

/// Branch indicator s = (1 - 2 beta) f + beta xi f' in terms of g.
double branch_indicator(double beta, double xi, double g, double dg);

struct ShotResult {
    /// Samples ordered from the tip (xi = 1) toward the origin.
    std::vector<double> xi;
    std::vector<double> g;
    std::vector<double> dg;
    /// g(0) when the profile reaches the origin, -lambda when f vanishes at
    /// lambda > 0 first. Continuous and monotone through the eigenvalue.
    double residual = 0.0;
    std::optional<double> crossing;
    std::optional<double> switch_point;
};

ShotResult integrate_profile(double beta, const EigenProblem& prob);

struct EigenResult {
    double ratio = 1.0;
    double beta = 0.25;
    double residual = 0.0;
    std::vector<double> xi;  ///< ascending, [0, 1]
    std::vector<double> f;
    std::optional<double> switch_point;
    std::size_t iterations = 0;

    double alpha() const noexcept { return 1.0 - 2.0 * beta; }
    double gamma() const noexcept { return 4.0 * alpha() - 2.0; }
    double epsilon_exp() const noexcept { return 1.0 - 4.0 * beta; }
};

/// Bisection on beta over [0.05, 0.45], widened toward (0, 0.5) if the
/// residual does not change sign. Throws ConvergenceError when no bracket
/// exists.
EigenResult shoot_beta(const EigenProblem& prob);

/// A self-similar solution with its prefactors; x_l = lambda x_r.
struct SimilarityProfile {
    double beta = 0.25;
    double lambda = 0.0;
    std::vector<double> xi;  ///< ascending, [lambda, 1]
    std::vector<double> g;
    /// (f^2)'(lambda)
    double dg_left = 0.0;
    double c_x = 1.0;
    double c_h = 1.0;

    double x_right(double t) const;
    double x_left(double t) const;
    double amplitude(double t) const;
    /// d(h^2)/dx at the left front.
    double normalized_flux(double t) const;
    /// Discharge m kappa1 d(h^2)/dx; equals m C_h C_x t^{3 beta - 2} (f^2)'(lambda).
    double physical_flux(double t, const PhysicalParams& params) const;
    double f(double xi) const;
};

/// Drainage similarity solution for kappa1 = kappa2: integrates from the tip
/// and stops where f first vanishes. Throws ConvergenceError when f reaches
/// the origin (beta >= 0.25).
SimilarityProfile drainage_similarity(double beta, const EigenProblem& prob = {}, double c_x = 1.0,
                                      double kappa1 = 1.0);

/// Dipole similarity solution built from a converged eigen solution.
SimilarityProfile similarity_profile(const EigenResult& eigen, double c_x = 1.0, double kappa1 = 1.0);

/// h(x, t) = C_h t^{-(1-2 beta)} f(x / (C_x t^beta)); zero outside the fronts.
double eval_similarity(const SimilarityProfile& sim, double x, double t);

/// Samples the solution at time t on [x_left(t), x_right(t)].
Profile sample_similarity(const SimilarityProfile& sim, double t, std::size_t n_cells);

}  // namespace mound
