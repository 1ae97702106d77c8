#include "mound/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mound/errors.hpp"

namespace mound {

namespace {

struct State {
    double g;
    double dg;
};

/// Right-hand side of the first-order system; nullopt where f is not real.
std::optional<State> derivative(double beta, double coef, double xi, const State& y) {
    if (!(y.g > 0.0)) return std::nullopt;
    return State{y.dg, -coef * branch_indicator(beta, xi, y.g, y.dg)};
}

/// Classical RK4 step of signed length h (negative toward the origin).
std::optional<State> rk4(double beta, double coef, double xi, const State& y, double h) {
    const auto k1 = derivative(beta, coef, xi, y);
    if (!k1) return std::nullopt;
    const auto k2 = derivative(beta, coef, xi + 0.5 * h, {y.g + 0.5 * h * k1->g, y.dg + 0.5 * h * k1->dg});
    if (!k2) return std::nullopt;
    const auto k3 = derivative(beta, coef, xi + 0.5 * h, {y.g + 0.5 * h * k2->g, y.dg + 0.5 * h * k2->dg});
    if (!k3) return std::nullopt;
    const auto k4 = derivative(beta, coef, xi + h, {y.g + h * k3->g, y.dg + h * k3->dg});
    if (!k4) return std::nullopt;
    State out{y.g + h / 6.0 * (k1->g + 2.0 * k2->g + 2.0 * k3->g + k4->g),
              y.dg + h / 6.0 * (k1->dg + 2.0 * k2->dg + 2.0 * k3->dg + k4->dg)};
    if (!std::isfinite(out.g) || !std::isfinite(out.dg)) return std::nullopt;
    return out;
}

bool usable(const std::optional<State>& y) { return y && y->g > 0.0; }

constexpr double switch_resolution = 1e-10;
constexpr double crossing_resolution = 1e-13;

}  // namespace

void validate(const EigenProblem& prob) {
    if (!(prob.ratio > 0.0 && prob.ratio <= 1.0)) throw std::invalid_argument("ratio must lie in (0, 1]");
    if (!(prob.eps_tip > 0.0 && prob.eps_tip < 1e-2)) throw std::invalid_argument("eps_tip must lie in (0, 1e-2)");
    if (!(prob.step > 0.0 && prob.step <= 0.1)) throw std::invalid_argument("integration step must lie in (0, 0.1]");
    if (!(prob.beta_tol > 0.0)) throw std::invalid_argument("beta tolerance must be positive");
    if (!(prob.tip_grading > 0.0 && prob.tip_grading <= 1.0))
        throw std::invalid_argument("tip grading must lie in (0, 1]");
}

TipValues taylor_start(double beta, double eps) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in [0, 1)");
    // f = a e + b e^2 with a = beta/2 (tip slope) and b = -(1 - beta)/8 from
    // the first-order balance of the advancing branch.
    const double c2 = beta * beta / 4.0;
    const double c3 = -beta * (1.0 - beta) / 8.0;
    // d/dxi = -d/de
    return {c2 * eps * eps + c3 * eps * eps * eps, -(2.0 * c2 * eps + 3.0 * c3 * eps * eps)};
}

double branch_indicator(double beta, double xi, double g, double dg) {
    const double f = std::sqrt(std::max(g, 0.0));
    if (f == 0.0) return 0.0;
    const double advect = xi == 0.0 ? 0.0 : beta * xi * dg / (2.0 * f);
    return (1.0 - 2.0 * beta) * f + advect;
}

ShotResult integrate_profile(double beta, const EigenProblem& prob) {
    validate(prob);
    if (!(beta > 0.0 && beta < 0.5)) throw std::invalid_argument("beta must lie in (0, 0.5)");

    ShotResult out;
    const bool two_branches = prob.ratio != 1.0;
    auto coef_for = [&](double s, double current) {
        if (s < 0.0) return 1.0;
        if (s > 0.0) return prob.ratio;
        return current;
    };
    auto push = [&](double xi, const State& y) {
        out.xi.push_back(xi);
        out.g.push_back(y.g);
        out.dg.push_back(y.dg);
    };

    push(1.0, {0.0, 0.0});
    double xi = 1.0 - prob.eps_tip;
    const TipValues tip = taylor_start(beta, prob.eps_tip);
    State y{tip.g, tip.dg};
    push(xi, y);
    double coef = 1.0;

    while (xi > 0.0) {
        const double h = std::min({prob.step, prob.tip_grading * (1.0 - xi), xi});
        auto next = rk4(beta, coef, xi, y, -h);

        if (!usable(next)) {
            // f vanishes inside this step: shrink to the last real point
            double lo = 0.0;
            double hi = h;
            while (hi - lo > crossing_resolution) {
                const double mid = 0.5 * (lo + hi);
                const auto trial = rk4(beta, coef, xi, y, -mid);
                if (usable(trial))
                    lo = mid;
                else
                    hi = mid;
            }
            const double lambda = xi - lo;
            // the RK4 slope next to f = 0 is unreliable; close the last interval with int s = (1 - 3 beta) int f + beta [xi f]
            // and f ~ sqrt(xi - lambda).
            const double f_xi = std::sqrt(y.g);
            const double dg = y.dg + coef * ((1.0 - 3.0 * beta) * 2.0 / 3.0 * f_xi * (xi - lambda) + beta * xi * f_xi);
            push(lambda, {0.0, dg});
            out.crossing = lambda;
            out.residual = -lambda;
            return out;
        }

        if (two_branches) {
            const double s_new = branch_indicator(beta, xi - h, next->g, next->dg);
            if (coef_for(s_new, coef) != coef && xi - h > 0.0) {
                // bracket the sign change of s inside the step
                double lo = 0.0;
                double hi = h;
                State at_hi = *next;
                while (hi - lo > switch_resolution) {
                    const double mid = 0.5 * (lo + hi);
                    const auto trial = rk4(beta, coef, xi, y, -mid);
                    if (!usable(trial)) {
                        hi = mid;
                        continue;
                    }
                    const double s_mid = branch_indicator(beta, xi - mid, trial->g, trial->dg);
                    if (coef_for(s_mid, coef) == coef) {
                        lo = mid;
                    } else {
                        hi = mid;
                        at_hi = *trial;
                    }
                }
                xi -= hi;
                y = at_hi;
                if (!out.switch_point) out.switch_point = xi;
                coef = coef_for(branch_indicator(beta, xi, y.g, y.dg), coef);
                push(xi, y);
                continue;
            }
        }

        xi = (h == xi) ? 0.0 : xi - h;
        y = *next;
        push(xi, y);
    }
    out.residual = y.g;
    return out;
}

EigenResult shoot_beta(const EigenProblem& prob) {
    validate(prob);
    double lo = 0.05;
    double hi = 0.45;
    double r_lo = integrate_profile(lo, prob).residual;
    double r_hi = integrate_profile(hi, prob).residual;
    std::size_t iterations = 2;

    // widen toward the admissible limits (0, 0.5)
    for (int k = 0; k < 12 && (r_lo > 0.0) == (r_hi > 0.0); ++k) {
        lo *= 0.5;
        hi = 0.5 - 0.5 * (0.5 - hi);
        r_lo = integrate_profile(lo, prob).residual;
        r_hi = integrate_profile(hi, prob).residual;
        iterations += 2;
    }
    if ((r_lo > 0.0) == (r_hi > 0.0)) {
        std::ostringstream msg;
        msg << "no sign change of the shooting residual for ratio " << prob.ratio << ": residual(" << lo
            << ") = " << r_lo << ", residual(" << hi << ") = " << r_hi;
        throw ConvergenceError(msg.str());
    }

    while (hi - lo > prob.beta_tol) {
        const double mid = 0.5 * (lo + hi);
        const double r_mid = integrate_profile(mid, prob).residual;
        ++iterations;
        if (r_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((r_mid > 0.0) == (r_lo > 0.0)) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }

    EigenResult result;
    result.ratio = prob.ratio;
    result.beta = 0.5 * (lo + hi);
    const ShotResult shot = integrate_profile(result.beta, prob);
    result.residual = shot.residual;
    result.switch_point = shot.switch_point;
    result.iterations = iterations + 1;

    const std::size_t n = shot.xi.size();
    result.xi.reserve(n + 1);
    result.f.reserve(n + 1);
    for (std::size_t k = n; k-- > 0;) {
        result.xi.push_back(shot.xi[k]);
        result.f.push_back(std::sqrt(std::max(shot.g[k], 0.0)));
    }
    if (result.xi.front() > 0.0) {
        // the converged shot stopped a hair short of the origin
        result.xi.insert(result.xi.begin(), 0.0);
        result.f.insert(result.f.begin(), 0.0);
    }
    return result;
}

double SimilarityProfile::x_right(double t) const { return c_x * std::pow(t, beta); }

double SimilarityProfile::x_left(double t) const { return lambda * x_right(t); }

double SimilarityProfile::amplitude(double t) const { return c_h * std::pow(t, -(1.0 - 2.0 * beta)); }

double SimilarityProfile::normalized_flux(double t) const {
    return c_h * c_h / c_x * std::pow(t, 3.0 * beta - 2.0) * dg_left;
}

double SimilarityProfile::physical_flux(double t, const PhysicalParams& params) const {
    return params.porosity() * params.kappa1() * normalized_flux(t);
}

double SimilarityProfile::f(double s) const {
    if (xi.size() < 2 || s <= xi.front() || s >= xi.back()) return 0.0;
    const auto it = std::upper_bound(xi.begin(), xi.end(), s);
    const auto k = static_cast<std::size_t>(it - xi.begin());
    const double w = (s - xi[k - 1]) / (xi[k] - xi[k - 1]);
    const double gv = (1.0 - w) * g[k - 1] + w * g[k];
    return std::sqrt(std::max(gv, 0.0));
}

SimilarityProfile drainage_similarity(double beta, const EigenProblem& prob, double c_x, double kappa1) {
    if (!(beta > 0.0 && beta < 0.25)) throw std::invalid_argument("drainage similarity needs 0 < beta < 0.25");
    if (!(c_x > 0.0 && kappa1 > 0.0)) throw std::invalid_argument("prefactors must be positive");
    EigenProblem p = prob;
    p.ratio = 1.0;
    const ShotResult shot = integrate_profile(beta, p);
    if (!shot.crossing) {
        std::ostringstream msg;
        msg << "profile for beta = " << beta << " reaches the origin without vanishing";
        throw ConvergenceError(msg.str());
    }

    SimilarityProfile sim;
    sim.beta = beta;
    sim.lambda = *shot.crossing;
    sim.c_x = c_x;
    sim.c_h = c_x * c_x / kappa1;
    const std::size_t n = shot.xi.size();
    for (std::size_t k = n; k-- > 0;) {
        sim.xi.push_back(shot.xi[k]);
        sim.g.push_back(std::max(shot.g[k], 0.0));
    }
    sim.dg_left = shot.dg.back();
    return sim;
}

SimilarityProfile similarity_profile(const EigenResult& eigen, double c_x, double kappa1) {
    SimilarityProfile sim;
    sim.beta = eigen.beta;
    sim.lambda = 0.0;
    sim.c_x = c_x;
    sim.c_h = c_x * c_x / kappa1;
    sim.xi = eigen.xi;
    sim.g.reserve(eigen.f.size());
    for (double v : eigen.f) sim.g.push_back(v * v);
    if (sim.xi.size() >= 2) sim.dg_left = (sim.g[1] - sim.g[0]) / (sim.xi[1] - sim.xi[0]);
    return sim;
}

double eval_similarity(const SimilarityProfile& sim, double x, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("similarity solution needs t > 0");
    return sim.amplitude(t) * sim.f(x / sim.x_right(t));
}

Profile sample_similarity(const SimilarityProfile& sim, double t, std::size_t n_cells) {
    Profile p;
    p.time = t;
    p.x_left = sim.x_left(t);
    p.x_right = sim.x_right(t);
    p.heights.resize(n_cells + 1);
    for (std::size_t i = 0; i <= n_cells; ++i) p.heights[i] = eval_similarity(sim, p.x_at(i), t);
    p.heights.front() = 0.0;
    p.heights.back() = 0.0;
    return p;
}

}  // namespace mound
