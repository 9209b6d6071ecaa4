#pragma once

// Test-side oracles, deliberately independent of the library internals:
// plain serial loops, a radial shooting integrator, and the eigenfunction
// series for the unit-cube Poisson problem.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "sms/field.hpp"

namespace oracle {

// ---- naive energy pieces (straight serial loops, no pairwise trees) ----

inline double naive_norm_eps_sq(const sms::ScalarField& u, double eps) {
    const sms::DomainGrid& g = *u.grid;
    const double h = g.h;
    double grad = 0.0, mass = 0.0;
    auto at = [&](int i, int j, int k) -> double {
        if (i < 0 || j < 0 || k < 0 || i >= g.nx || j >= g.ny || k >= g.nz) return 0.0;
        return u.v[g.idx(i, j, k)];
    };
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double uc = at(i, j, k);
                mass += uc * uc;
                // forward edges, including the ghost edges out of the box
                const double dx = at(i + 1, j, k) - uc;
                const double dy = at(i, j + 1, k) - uc;
                const double dz = at(i, j, k + 1) - uc;
                grad += dx * dx + dy * dy + dz * dz;
                if (i == 0) grad += uc * uc;
                if (j == 0) grad += uc * uc;
                if (k == 0) grad += uc * uc;
            }
    return (eps * eps * grad / (h * h) + mass) * h * h * h / (eps * eps * eps);
}

inline double naive_lp_pow(const sms::ScalarField& u, double p, double eps, bool positive_only) {
    const sms::DomainGrid& g = *u.grid;
    double s = 0.0;
    for (std::size_t c = 0; c < g.ncells(); ++c) {
        const double x = positive_only ? std::max(u.v[c], 0.0) : std::abs(u.v[c]);
        if (x > 0.0) s += std::pow(x, p);
    }
    return s * g.h * g.h * g.h / (eps * eps * eps);
}

inline double naive_l2_pairing(const sms::ScalarField& a, const sms::ScalarField& b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += a.v[c] * b.v[c];
    const double h = a.grid->h;
    return s * h * h * h;
}

// ---- scalar bisection for the Nehari scale ----

inline double bisect_nehari_scale(double a, double b, double c, double p) {
    auto f = [&](double t) { return a + b * t * t - c * std::pow(t, p - 2.0); };
    double lo = 0.0, hi = 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---- radial shooting for -u'' - (2/r) u' + u = u^{p-1}, p = 5 ----
// Ground-state amplitude by bisection on u(0); returns the H1 energy
// ingredients by quadrature along the profile.

struct ShootingResult {
    double amplitude = 0.0;
    double h1_sq = 0.0;     // int |u'|^2 + u^2 over R^3
    double l2_sq = 0.0;
    double lp_pow = 0.0;    // int u^p
    double m_energy = 0.0;  // (1/2 - 1/p) * h1_sq
};

inline ShootingResult shoot_scalar_ground_state(double p = 5.0) {
    auto rhs = [&](double r, double u, double v, double& du, double& dv) {
        du = v;
        dv = u - std::pow(std::abs(u), p - 2.0) * u + (r > 0.0 ? -2.0 / r * v : 0.0);
    };
    // classify: -1 crossed zero (too big), +1 turned up (too small)
    auto run = [&](double a, std::vector<std::array<double, 2>>* traj) -> int {
        const double dr = 1e-3;
        double r = 1e-8;
        double u = a, v = 0.0;
        for (int step = 0; step < 40000; ++step) {
            double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
            rhs(r, u, v, k1u, k1v);
            rhs(r + dr / 2, u + dr / 2 * k1u, v + dr / 2 * k1v, k2u, k2v);
            rhs(r + dr / 2, u + dr / 2 * k2u, v + dr / 2 * k2v, k3u, k3v);
            rhs(r + dr, u + dr * k3u, v + dr * k3v, k4u, k4v);
            u += dr / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
            v += dr / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
            r += dr;
            if (traj) traj->push_back({u, v});
            if (u < 0.0) return -1;
            if (v > 1e-12 && r > 0.5 && u > 1e-12) return +1;
            if (u < 1e-14) return 0;
        }
        return 0;
    };
    double lo = 1.2, hi = 16.0;
    for (int it = 0; it < 70; ++it) {
        const double mid = 0.5 * (lo + hi);
        (run(mid, nullptr) < 0 ? hi : lo) = mid;
    }
    const double a = 0.5 * (lo + hi);
    std::vector<std::array<double, 2>> traj;
    run(a, &traj);
    ShootingResult out;
    out.amplitude = a;
    const double dr = 1e-3;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double r = (i + 1) * dr;
        const double u = std::max(traj[i][0], 0.0);
        const double v = traj[i][1];
        const double w = 4.0 * M_PI * r * r * dr;
        out.h1_sq += (v * v + u * u) * w;
        out.l2_sq += u * u * w;
        out.lp_pow += std::pow(u, p) * w;
    }
    out.m_energy = (0.5 - 1.0 / p) * out.h1_sq;
    return out;
}

// ---- eigenfunction series for -lap psi = 1 on the unit cube, value at x ----

inline double cube_poisson_series(double x, double y, double z, int terms = 79) {
    double s = 0.0;
    for (int i = terms; i >= 1; i -= 2)
        for (int j = terms; j >= 1; j -= 2)
            for (int k = terms; k >= 1; k -= 2) {
                const double pi = M_PI;
                const double coeff = 64.0 / (pi * pi * pi * pi * pi * ((double)i * i + (double)j * j + (double)k * k) * i * j * k);
                s += coeff * std::sin(i * pi * x) * std::sin(j * pi * y) * std::sin(k * pi * z);
            }
    return s;
}

// ---- deterministic random fields ----

inline sms::ScalarField random_field(const sms::DomainGrid& g, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amp, amp);
    sms::ScalarField u(g);
    for (std::size_t c = 0; c < g.ncells(); ++c)
        if (g.mask[c]) u.v[c] = dist(rng);
    return u;
}

// smooth positive blob, handy as a generic initializer
inline sms::ScalarField gaussian_blob(const sms::DomainGrid& g, std::array<double, 3> c0, double sigma,
                                      double amp) {
    sms::ScalarField u(g);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!g.mask[c]) continue;
                const auto x = g.center(i, j, k);
                const double d2 = (x[0] - c0[0]) * (x[0] - c0[0]) + (x[1] - c0[1]) * (x[1] - c0[1]) +
                                  (x[2] - c0[2]) * (x[2] - c0[2]);
                u.v[c] = amp * std::exp(-d2 / (sigma * sigma));
            }
    return u;
}

} // namespace oracle
