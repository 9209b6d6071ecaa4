#pragma once

// The eps-scaled norms and inner product:
//   ||u||_eps^2   = eps^-3 * sum( eps^2 |grad u|^2 + u^2 ) h^3
//   |u|_{eps,p}^p = eps^-3 * sum |u|^p h^3
// Gradients are forward differences with zero Dirichlet extension; every
// lattice edge touching the box is counted once (including the low-side
// boundary edges, which carry u^2/h^2 against the zero ghost).

#include <cmath>

#include "sms/field.hpp"

namespace sms {

namespace detail {

// sum over all edges of (D_a u)(D_a w); edge (c, c+e_a) assigned to cell c,
// low-side box edges assigned to the first cell of each line.
inline double dirichlet_form(const ScalarField& u, const ScalarField& w) {
    const DomainGrid& g = *u.grid;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const std::size_t sx = 1, sy = static_cast<std::size_t>(nx), sz = static_cast<std::size_t>(nx) * ny;
    return reduce_sum(g.ncells(), [&](std::size_t c) {
        const int i = static_cast<int>(c % nx);
        const int j = static_cast<int>((c / sx / nx) % ny);
        const int k = static_cast<int>(c / sz);
        const double uc = u.v[c], wc = w.v[c];
        double s = 0.0;
        const double uxp = (i + 1 < nx) ? u.v[c + sx] : 0.0;
        const double wxp = (i + 1 < nx) ? w.v[c + sx] : 0.0;
        const double uyp = (j + 1 < ny) ? u.v[c + sy] : 0.0;
        const double wyp = (j + 1 < ny) ? w.v[c + sy] : 0.0;
        const double uzp = (k + 1 < nz) ? u.v[c + sz] : 0.0;
        const double wzp = (k + 1 < nz) ? w.v[c + sz] : 0.0;
        s += (uxp - uc) * (wxp - wc) + (uyp - uc) * (wyp - wc) + (uzp - uc) * (wzp - wc);
        if (i == 0) s += uc * wc;
        if (j == 0) s += uc * wc;
        if (k == 0) s += uc * wc;
        return s;
    });
}

inline double pow_abs(double x, double p, int pint) {
    const double a = std::abs(x);
    if (pint > 0) {
        double r = 1.0;
        for (int t = 0; t < pint; ++t) r *= a;
        return r;
    }
    return a > 0.0 ? std::pow(a, p) : 0.0;
}

inline int integer_exponent(double p) {
    const double r = std::round(p);
    return (std::abs(p - r) < 1e-14 && r >= 1.0 && r <= 8.0) ? static_cast<int>(r) : -1;
}

} // namespace detail

inline void check_p_range(double p, double lo, double hi) {
    if (!(p >= lo && p <= hi)) throw std::invalid_argument("exponent p out of range");
}

inline double inner_eps(const ScalarField& u, const ScalarField& w, double eps) {
    check_same_grid(u, w);
    if (!(eps > 0.0)) throw std::invalid_argument("inner_eps: eps must be positive");
    const DomainGrid& g = *u.grid;
    const double h = g.h;
    const double grad = detail::dirichlet_form(u, w) / (h * h);
    const double mass = dot(u.v, w.v);
    return (eps * eps * grad + mass) * h * h * h / (eps * eps * eps);
}

inline double norm_eps_sq(const ScalarField& u, double eps) { return inner_eps(u, u, eps); }

inline double norm_eps(const ScalarField& u, double eps) { return std::sqrt(norm_eps_sq(u, eps)); }

// |u|_{eps,p}^p  (note: returns the p-th power)
inline double lp_norm_eps_pow(const ScalarField& u, double p, double eps) {
    check_p_range(p, 2.0, 6.0);
    if (!(eps > 0.0)) throw std::invalid_argument("lp_norm_eps: eps must be positive");
    const int pint = detail::integer_exponent(p);
    const double s = reduce_sum(u.size(), [&](std::size_t c) { return detail::pow_abs(u.v[c], p, pint); });
    const double h = u.grid->h;
    return s * h * h * h / (eps * eps * eps);
}

inline double lp_norm_eps(const ScalarField& u, double p, double eps) {
    return std::pow(lp_norm_eps_pow(u, p, eps), 1.0 / p);
}

// |u^+|_{eps,p}^p without materializing the positive part
inline double lp_norm_eps_pow_pos(const ScalarField& u, double p, double eps) {
    check_p_range(p, 2.0, 6.0);
    const int pint = detail::integer_exponent(p);
    const double s = reduce_sum(u.size(), [&](std::size_t c) {
        return u.v[c] > 0.0 ? detail::pow_abs(u.v[c], p, pint) : 0.0;
    });
    const double h = u.grid->h;
    return s * h * h * h / (eps * eps * eps);
}

// plain L2 integral sum(u*w) h^3 (no eps scaling)
inline double l2_pairing(const ScalarField& u, const ScalarField& w) {
    check_same_grid(u, w);
    const double h = u.grid->h;
    return dot(u.v, w.v) * h * h * h;
}

} // namespace sms
