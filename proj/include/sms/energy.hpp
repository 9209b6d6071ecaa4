#pragma once

// The reduced functional
//   I_eps(u) = 1/2 ||u||_eps^2 + (omega/4) G_eps(u) - (1/p) |u^+|_{eps,p}^p,
//   G_eps(u) = eps^-3 int u^2 psi(u),
// its L2-representative gradient, and the Nehari residual
//   N_eps(u) = I'_eps(u)[u] = ||u||_eps^2 + omega G_eps(u) - |u^+|_{eps,p}^p.
//
// The same code drives the limit problem: with free_space_psi set the
// potential comes from the Newtonian kernel instead of the Dirichlet solve.

#include <optional>
#include <string>

#include "sms/io.hpp"
#include "sms/norms.hpp"
#include "sms/poisson.hpp"

namespace sms {

struct SystemParams {
    double eps = 1.0;
    double omega = 1.0;
    double q = 1.0;
    double p = 5.0;
    bool free_space_psi = false;  // limit problem: psi from the Coulomb kernel
    double lin_tol = 1e-10;

    void check() const {
        if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
        if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
        if (!(omega >= 0.0)) throw std::invalid_argument("omega must be nonnegative");
        if (!(p > 4.0 && p < 6.0)) throw std::invalid_argument("p must lie in (4,6)");
    }
};

// Potential of the second equation for the current mode. The map is
// 2-homogeneous: psi(t u) = t^2 psi(u), which callers exploit to avoid
// re-solving along rays.
inline ScalarField solve_potential(const ScalarField& u, const SystemParams& P, LinSolveStats& stats,
                                   const CgOptions& opt = {}) {
    if (P.free_space_psi) {
        ScalarField u2(*u.grid);
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < static_cast<long long>(u2.size()); ++c) u2.v[c] = u.v[c] * u.v[c];
        ScalarField psi = coulomb_free(u2, P.q);
        psi.scale(1.0 / (P.eps * P.eps));
        stats = LinSolveStats{0, 0.0, true};
        return psi;
    }
    CgOptions o = opt;
    o.tol = P.lin_tol;
    return solve_psi_eps(u, P.eps, P.q, stats, o);
}

inline ScalarField solve_potential(const ScalarField& u, const SystemParams& P) {
    LinSolveStats stats;
    return solve_potential(u, P, stats);
}

// G_eps(u) = eps^-3 int u^2 psi  (>= 0)
inline double g_eps_with_psi(const ScalarField& u, const ScalarField& psi, double eps) {
    const double h = u.grid->h;
    const double s = reduce_sum(u.size(), [&](std::size_t c) { return u.v[c] * u.v[c] * psi.v[c]; });
    return s * h * h * h / (eps * eps * eps);
}

inline double g_eps(const ScalarField& u, double eps, double q) {
    if (u.max_abs() == 0.0) return 0.0;
    ScalarField psi = solve_psi_eps(u, eps, q);
    return g_eps_with_psi(u, psi, eps);
}

struct EnergyBreakdown {
    double eps = 0, omega = 0, q = 0, p = 0;
    double quad = 0;             // 1/2 ||u||_eps^2
    double coul = 0;             // (omega/4) G_eps(u)
    double pot = 0;              // (1/p) |u^+|_{eps,p}^p
    double total = 0;            // quad + coul - pot
    double nehari_residual = 0;  // ||u||^2 + omega G - |u^+|^p
    double g_eps = 0;            // G_eps(u)

    static std::string csv_header() {
        return "eps,omega,q,p,quad,coul,pot,total,nehari_residual,g_eps";
    }
    std::string csv_row() const {
        return fmt_g17(eps) + "," + fmt_g17(omega) + "," + fmt_g17(q) + "," + fmt_g17(p) + "," +
               fmt_g17(quad) + "," + fmt_g17(coul) + "," + fmt_g17(pot) + "," + fmt_g17(total) + "," +
               fmt_g17(nehari_residual) + "," + fmt_g17(g_eps);
    }
};

// scalar data of u entering every Nehari computation
struct NehariScalars {
    double norm_sq = 0;  // a = ||u||_eps^2
    double g = 0;        // G_eps(u)
    double pot_pow = 0;  // c = |u^+|_{eps,p}^p
};

inline NehariScalars nehari_scalars_with_psi(const ScalarField& u, const ScalarField& psi,
                                             const SystemParams& P) {
    NehariScalars s;
    s.norm_sq = norm_eps_sq(u, P.eps);
    s.g = g_eps_with_psi(u, psi, P.eps);
    s.pot_pow = lp_norm_eps_pow_pos(u, P.p, P.eps);
    return s;
}

inline NehariScalars nehari_scalars(const ScalarField& u, const SystemParams& P) {
    NehariScalars s;
    s.norm_sq = norm_eps_sq(u, P.eps);
    s.g = P.omega != 0.0 ? g_eps_with_psi(u, solve_potential(u, P), P.eps) : 0.0;
    s.pot_pow = lp_norm_eps_pow_pos(u, P.p, P.eps);
    return s;
}

inline EnergyBreakdown breakdown_from_scalars(const NehariScalars& s, const SystemParams& P) {
    EnergyBreakdown e;
    e.eps = P.eps;
    e.omega = P.omega;
    e.q = P.q;
    e.p = P.p;
    e.quad = 0.5 * s.norm_sq;
    e.coul = 0.25 * P.omega * s.g;
    e.pot = s.pot_pow / P.p;
    e.total = e.quad + e.coul - e.pot;
    e.nehari_residual = s.norm_sq + P.omega * s.g - s.pot_pow;
    e.g_eps = s.g;
    return e;
}

inline EnergyBreakdown i_eps_with_psi(const ScalarField& u, const ScalarField& psi, const SystemParams& P) {
    P.check();
    return breakdown_from_scalars(nehari_scalars_with_psi(u, psi, P), P);
}

inline EnergyBreakdown i_eps(const ScalarField& u, const SystemParams& P) {
    P.check();
    if (u.max_abs() == 0.0) return breakdown_from_scalars(NehariScalars{}, P);
    ScalarField psi = solve_potential(u, P);
    return i_eps_with_psi(u, psi, P);
}

// L2 representative of I'_eps(u): the field gr with I'_eps(u)[phi] =
// sum gr phi h^3 for all mesh phi,
//   gr = eps^-3 ( -eps^2 lap u + u + omega u psi - (u^+)^{p-1} ).
inline ScalarField grad_i_eps_with_psi(const ScalarField& u, const ScalarField& psi,
                                       const SystemParams& P) {
    const DomainGrid& g = *u.grid;
    ScalarField gr(g);
    detail::apply_neg_lap(g, P.eps, u.v, gr.v);  // eps^2 (-lap u)
    const double inv_eps3 = 1.0 / (P.eps * P.eps * P.eps);
    const double pm1 = P.p - 1.0;
    const int pint = detail::integer_exponent(pm1);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(gr.size()); ++c) {
        if (!g.mask[c]) {
            gr.v[c] = 0.0;
            continue;
        }
        const double uc = u.v[c];
        const double up = uc > 0.0 ? detail::pow_abs(uc, pm1, pint) : 0.0;
        gr.v[c] = inv_eps3 * (gr.v[c] + uc + P.omega * uc * psi.v[c] - up);
    }
    return gr;
}

inline ScalarField grad_i_eps(const ScalarField& u, const SystemParams& P) {
    P.check();
    if (P.omega == 0.0) {
        ScalarField zero_psi(*u.grid);
        return grad_i_eps_with_psi(u, zero_psi, P);
    }
    ScalarField psi = solve_potential(u, P);
    return grad_i_eps_with_psi(u, psi, P);
}

} // namespace sms
