#pragma once

// Nehari projection and projected-gradient descent.
//
// For w with |w^+|_{eps,p} > 0 the scale t(w) is the unique positive root of
//   ||w||^2 + t^2 omega G(w) - t^{p-2} |w^+|^p = 0
// and t(w) w lies on the Nehari set. Descent iterates
//   u <- project( u - s grad I_eps(u) )
// with Barzilai-Borwein step seeds and Armijo backtracking on the projected
// energy; accepted energies are non-increasing by construction.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "sms/concentration.hpp"
#include "sms/energy.hpp"

namespace sms {

// unique positive root of a + b t^2 - c t^{p-2} (a,c > 0, b >= 0)
inline double nehari_scale_from_scalars(double a, double b, double c, double p) {
    if (!(c > 0.0))
        throw std::invalid_argument("nehari projection undefined: positive part vanishes");
    if (!(a > 0.0)) throw std::invalid_argument("nehari projection undefined: zero field");
    const double pm2 = p - 2.0;
    auto f = [&](double t) { return a + b * t * t - c * std::pow(t, pm2); };
    double hi = 1.0;
    int guard = 0;
    while (f(hi) > 0.0 && guard++ < 2000) hi *= 2.0;
    if (f(hi) > 0.0) throw std::runtime_error("nehari scale: bracketing failed");
    double lo = 0.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {  // Newton polish
        const double ft = f(t);
        const double dft = 2.0 * b * t - pm2 * c * std::pow(t, pm2 - 1.0);
        if (dft == 0.0) break;
        const double tn = t - ft / dft;
        if (tn > 0.0 && std::isfinite(tn)) t = tn;
    }
    return t;
}

inline double nehari_scale(const NehariScalars& s, const SystemParams& P) {
    return nehari_scale_from_scalars(s.norm_sq, P.omega * s.g, s.pot_pow, P.p);
}

inline double nehari_scale(const ScalarField& w, const SystemParams& P) {
    P.check();
    return nehari_scale(nehari_scalars(w, P), P);
}

inline ScalarField nehari_project(const ScalarField& w, const SystemParams& P) {
    const double t = nehari_scale(w, P);
    ScalarField u = w;
    u.scale(t);
    return u;
}

enum class DescendStatus { Converged, IterationCap, Stagnated, NanDetected };

inline const char* to_string(DescendStatus s) {
    switch (s) {
        case DescendStatus::Converged: return "converged";
        case DescendStatus::IterationCap: return "iteration-cap";
        case DescendStatus::Stagnated: return "stagnated";
        case DescendStatus::NanDetected: return "nan";
    }
    return "?";
}

struct DescendConfig {
    int max_iter = 1500;
    double tol_g_rel = 1e-6;   // stop at ||grad||_eps <= tol_g_rel * sqrt(E)
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 40;
    int positivity_polish = 50;
    bool record_history = false;
};

struct CriticalPoint {
    ScalarField u;
    ScalarField psi;
    EnergyBreakdown energy;
    double grad_norm = 0.0;
    int iterations = 0;
    std::array<double, 3> barycenter{};
    std::array<double, 3> peak{};
    std::string ancestry;
    DescendStatus status = DescendStatus::Converged;
    std::vector<double> history;   // accepted energies
    int psi_solves = 0;

    bool converged() const { return status == DescendStatus::Converged; }
    // contract checks on a converged record
    bool residual_ok() const {
        return std::abs(energy.nehari_residual) <= 1e-8 * (2.0 * energy.quad);
    }
    bool positivity_ok() const { return u.min_value() >= -1e-10 * std::max(u.max_value(), 0.0); }
    bool norm_lower_bound_ok() const { return std::sqrt(2.0 * energy.quad) >= 1e-3; }
};

namespace detail {

// crude upper bound for the largest curvature of the assembled gradient map;
// its inverse seeds the very first trial step
inline double stiffness_bound(const ScalarField& u, const ScalarField& psi, const SystemParams& P) {
    const double h = u.grid->h;
    const double inv_eps3 = 1.0 / (P.eps * P.eps * P.eps);
    const double umax = std::max(u.max_value(), 0.0);
    const double pm2 = P.p - 2.0;
    const double nl = (P.p - 1.0) * (umax > 0.0 ? std::pow(umax, pm2) : 0.0);
    double psimax = 0.0;
    for (auto x : psi.v) psimax = std::max(psimax, x);
    return inv_eps3 * (12.0 * P.eps * P.eps / (h * h) + 1.0 + P.omega * psimax + nl);
}

} // namespace detail

// Projected-gradient descent from initializer u0 (needs |u0^+| > 0).
inline CriticalPoint descend(const ScalarField& u0, const SystemParams& P, const DescendConfig& cfg,
                             std::string ancestry = "") {
    P.check();
    const DomainGrid& g = *u0.grid;

    CriticalPoint out;
    out.ancestry = std::move(ancestry);

    // initial projection onto the Nehari set
    LinSolveStats stats;
    ScalarField w = u0;
    ScalarField psi_w = P.omega != 0.0 ? solve_potential(w, P, stats) : ScalarField(g);
    int psi_solves = P.omega != 0.0 ? 1 : 0;
    NehariScalars sc = nehari_scalars_with_psi(w, psi_w, P);
    double t = nehari_scale(sc, P);  // throws for invalid initializers

    ScalarField u = w;
    u.scale(t);
    ScalarField psi_u = psi_w;
    psi_u.scale(t * t);
    NehariScalars scu{t * t * sc.norm_sq, t * t * t * t * sc.g, std::pow(t, P.p) * sc.pot_pow};
    double E = 0.5 * scu.norm_sq + 0.25 * P.omega * scu.g - scu.pot_pow / P.p;

    ScalarField u_prev(g), g_prev(g);
    bool have_prev = false;
    double step = 0.0;
    const double h3 = g.h * g.h * g.h;

    if (cfg.record_history) out.history.push_back(E);

    int it = 0;
    DescendStatus status = DescendStatus::IterationCap;
    double gnorm = 0.0;
    ScalarField grad(g);
    while (it < cfg.max_iter) {
        grad = grad_i_eps_with_psi(u, psi_u, P);
        gnorm = norm_eps(grad, P.eps);
        if (!std::isfinite(gnorm) || !std::isfinite(E)) {
            status = DescendStatus::NanDetected;
            break;
        }
        const double tol = cfg.tol_g_rel * std::sqrt(std::max(E, 0.0));
        if (gnorm <= tol) {
            status = DescendStatus::Converged;
            break;
        }

        // step seed: BB1 when history is available, inverse stiffness otherwise
        if (have_prev) {
            double num = 0.0, den = 0.0;
            num = reduce_sum(u.size(), [&](std::size_t c) {
                const double du = u.v[c] - u_prev.v[c];
                return du * du;
            });
            den = reduce_sum(u.size(), [&](std::size_t c) {
                const double du = u.v[c] - u_prev.v[c];
                const double dg = grad.v[c] - g_prev.v[c];
                return du * dg;
            });
            step = (den > 0.0 && std::isfinite(num / den)) ? num / den : step;
        }
        if (!(step > 0.0) || !std::isfinite(step))
            step = 1.0 / detail::stiffness_bound(u, psi_u, P);

        const double gg = dot(grad.v, grad.v) * h3;  // = I'(u)[grad] (L2 pairing)

        u_prev = u;
        g_prev = grad;

        bool accepted = false;
        double s = step;
        ScalarField w_try(g), psi_try(g);
        for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
            lin_comb(w_try, 1.0, u, -s, grad);
            const double cpow = lp_norm_eps_pow_pos(w_try, P.p, P.eps);
            if (cpow > 0.0) {
                if (P.omega != 0.0) {
                    CgOptions opt;
                    opt.warm_start = &psi_u;
                    psi_try = solve_potential(w_try, P, stats, opt);
                    ++psi_solves;
                } else {
                    psi_try.fill(0.0);
                }
                NehariScalars st;
                st.norm_sq = norm_eps_sq(w_try, P.eps);
                st.g = P.omega != 0.0 ? g_eps_with_psi(w_try, psi_try, P.eps) : 0.0;
                st.pot_pow = cpow;
                const double tt = nehari_scale(st, P);
                const double E_try = 0.5 * tt * tt * st.norm_sq + 0.25 * P.omega * tt * tt * tt * tt * st.g -
                                     std::pow(tt, P.p) * st.pot_pow / P.p;
                if (std::isfinite(E_try) && E_try <= E - cfg.armijo_c1 * s * gg) {
                    // accept: u = tt * w_try, psi scales exactly with tt^2
                    lin_comb(u, tt, w_try, 0.0, w_try);
                    psi_u = psi_try;
                    psi_u.scale(tt * tt);
                    scu = NehariScalars{tt * tt * st.norm_sq, tt * tt * tt * tt * st.g,
                                        std::pow(tt, P.p) * st.pot_pow};
                    E = E_try;
                    accepted = true;
                    step = s;
                    break;
                }
            }
            s *= cfg.backtrack;
        }
        if (!accepted) {
            status = DescendStatus::Stagnated;
            break;
        }
        have_prev = true;
        ++it;
        if (cfg.record_history) out.history.push_back(E);
    }

    // scrub stray negative cells with safe plain-gradient steps; energies
    // keep decreasing so the record stays consistent
    int polish = 0;
    while (status == DescendStatus::Converged && polish < cfg.positivity_polish &&
           u.min_value() < -1e-10 * std::max(u.max_value(), 0.0)) {
        grad = grad_i_eps_with_psi(u, psi_u, P);
        const double s = 1.0 / detail::stiffness_bound(u, psi_u, P);
        ScalarField w_try(g);
        lin_comb(w_try, 1.0, u, -s, grad);
        ScalarField psi_try = P.omega != 0.0 ? solve_potential(w_try, P, stats) : ScalarField(g);
        if (P.omega != 0.0) ++psi_solves;
        NehariScalars st = nehari_scalars_with_psi(w_try, psi_try, P);
        const double tt = nehari_scale(st, P);
        const double E_try = 0.5 * tt * tt * st.norm_sq + 0.25 * P.omega * tt * tt * tt * tt * st.g -
                             std::pow(tt, P.p) * st.pot_pow / P.p;
        if (!(E_try <= E + 1e-12 * std::abs(E))) break;
        lin_comb(u, tt, w_try, 0.0, w_try);
        psi_u = psi_try;
        psi_u.scale(tt * tt);
        scu = NehariScalars{tt * tt * st.norm_sq, tt * tt * tt * tt * st.g, std::pow(tt, P.p) * st.pot_pow};
        E = E_try;
        ++polish;
    }

    if (polish > 0) {
        grad = grad_i_eps_with_psi(u, psi_u, P);
        gnorm = norm_eps(grad, P.eps);
    }

    out.u = std::move(u);
    if (P.omega != 0.0) {
        out.psi = std::move(psi_u);
    } else {
        // report the actual potential of the solution even when it does not
        // enter the energy
        out.psi = solve_potential(out.u, P);
        ++psi_solves;
    }
    out.energy = breakdown_from_scalars(scu, P);
    out.grad_norm = gnorm;
    out.iterations = it;
    out.status = status;
    out.psi_solves = psi_solves;
    const std::size_t pc = out.u.argmax_cell();
    const int pi = static_cast<int>(pc % g.nx);
    const int pj = static_cast<int>((pc / g.nx) % g.ny);
    const int pk = static_cast<int>(pc / (static_cast<std::size_t>(g.nx) * g.ny));
    out.peak = g.center(pi, pj, pk);
    out.barycenter = barycenter(out.u, P.eps, P.p);
    return out;
}

} // namespace sms
