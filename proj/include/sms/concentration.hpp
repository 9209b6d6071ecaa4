#pragma once

// Concentration diagnostics built on the energy density
//   Gamma(u) = 1/4 [ (1/eps)|grad u|^2 + (1/eps^3) u^2 ]
//            + (1/4 - 1/p) (1/eps^3) (u^+)^p            (>= 0 for 4<p<6)
// whose integral equals I_eps(u) on the Nehari set. Edge gradient energy
// is split half/half between interior endpoints; edges crossing into the
// exterior assign fully to the interior cell, so the total is exact.

#include <array>

#include "sms/energy.hpp"
#include "sms/partition.hpp"

namespace sms {

inline ScalarField gamma_density(const ScalarField& u, double eps, double p) {
    check_p_range(p, 4.0, 6.0);
    const DomainGrid& g = *u.grid;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const std::size_t sx = 1, sy = static_cast<std::size_t>(nx), sz = static_cast<std::size_t>(nx) * ny;
    const double inv_e = 1.0 / eps, inv_e3 = 1.0 / (eps * eps * eps);
    const double h2 = g.h * g.h;
    const double cp = 0.25 - 1.0 / p;
    const int pint = detail::integer_exponent(p);
    ScalarField gam(g);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!g.mask[c]) continue;
                const double uc = u.v[c];
                double gsq = 0.0;
                auto edge = [&](bool has_nbr, std::size_t nidx) {
                    const double un = has_nbr ? u.v[nidx] : 0.0;
                    const bool nbr_in = has_nbr && g.mask[nidx];
                    const double d2 = (un - uc) * (un - uc);
                    gsq += nbr_in ? 0.5 * d2 : d2;
                };
                edge(i + 1 < nx, c + sx);
                edge(i > 0, c - sx);
                edge(j + 1 < ny, c + sy);
                edge(j > 0, c - sy);
                edge(k + 1 < nz, c + sz);
                edge(k > 0, c - sz);
                gsq /= h2;
                const double up = uc > 0.0 ? detail::pow_abs(uc, p, pint) : 0.0;
                gam.v[c] = 0.25 * (inv_e * gsq + inv_e3 * uc * uc) + cp * inv_e3 * up;
            }
    return gam;
}

inline std::array<double, 3> barycenter_of_density(const ScalarField& gam) {
    const DomainGrid& g = *gam.grid;
    const double mass = sum(gam.v);
    if (!(mass > 0.0)) throw std::runtime_error("barycenter: density integrates to zero");
    std::array<double, 3> b{};
    for (int a = 0; a < 3; ++a) {
        b[a] = reduce_sum(gam.size(), [&](std::size_t c) {
            const int i = static_cast<int>(c % g.nx);
            const int j = static_cast<int>((c / g.nx) % g.ny);
            const int k = static_cast<int>(c / (static_cast<std::size_t>(g.nx) * g.ny));
            const double x = a == 0 ? g.origin[0] + (i + 0.5) * g.h
                           : a == 1 ? g.origin[1] + (j + 0.5) * g.h
                                    : g.origin[2] + (k + 0.5) * g.h;
            return x * gam.v[c];
        }) / mass;
    }
    return b;
}

inline std::array<double, 3> barycenter(const ScalarField& u, double eps, double p) {
    return barycenter_of_density(gamma_density(u, eps, p));
}

struct CellMasses {
    std::vector<double> mass;  // eps^-3 int_{P_j} (u^+)^p per piece
    std::size_t argmax = 0;
    double max_mass = 0.0;
};

inline CellMasses cell_masses(const ScalarField& u, const Partition& part, double eps, double p) {
    if (std::abs(part.cell_size - eps) > 1e-12 * eps)
        throw std::invalid_argument("cell_masses: partition was built at a different eps");
    const double h = u.grid->h;
    const double scale = h * h * h / (eps * eps * eps);
    const int pint = detail::integer_exponent(p);
    CellMasses out;
    out.mass.resize(part.pieces.size(), 0.0);
    for (std::size_t j = 0; j < part.pieces.size(); ++j) {
        double s = 0.0;
        for (const std::size_t c : part.pieces[j]) {
            const double uc = u.v[c];
            if (uc > 0.0) s += detail::pow_abs(uc, p, pint);
        }
        out.mass[j] = s * scale;
        if (out.mass[j] > out.max_mass) {
            out.max_mass = out.mass[j];
            out.argmax = j;
        }
    }
    return out;
}

// d(boundary, argmax piece) / eps, distance taken as the minimum of the
// grid distance field over the piece's cells.
inline double boundary_ratio(const ScalarField& u, const Partition& part, const DomainGrid& g, double eps,
                             double p) {
    const CellMasses cm = cell_masses(u, part, eps, p);
    double dmin = 1e300;
    for (const std::size_t c : part.pieces[cm.argmax]) dmin = std::min(dmin, g.dist(c));
    return dmin / eps;
}

// share of int Gamma inside B(q_star, r/2)
inline double ball_concentration(const ScalarField& u, const std::array<double, 3>& q_star, double r,
                                 double eps, double p) {
    const ScalarField gam = gamma_density(u, eps, p);
    const DomainGrid& g = *u.grid;
    const double total = sum(gam.v);
    if (!(total > 0.0)) return 0.0;
    const double rad2 = 0.25 * r * r;
    const double inside = reduce_sum(gam.size(), [&](std::size_t c) {
        const int i = static_cast<int>(c % g.nx);
        const int j = static_cast<int>((c / g.nx) % g.ny);
        const int k = static_cast<int>(c / (static_cast<std::size_t>(g.nx) * g.ny));
        const auto x = g.center(i, j, k);
        const double dx = x[0] - q_star[0], dy = x[1] - q_star[1], dz = x[2] - q_star[2];
        return (dx * dx + dy * dy + dz * dz <= rad2) ? gam.v[c] : 0.0;
    });
    return inside / total;
}

struct ConcentrationReport {
    std::array<double, 3> barycenter{};
    bool in_omega_plus = false;     // beta within distance r of the domain
    bool borderline = false;        // beta within one cell of the shell boundary
    double gamma_mass_max = 0.0;    // max_j eps^-3 int_{P_j} (u^+)^p
    std::size_t argmax_piece = 0;
    double piece_boundary_dist_over_eps = 0.0;
    double ball_fraction = 0.0;     // Gamma share in B(q_star, r/2)
    std::array<double, 3> q_star{};

    static std::string csv_header() {
        return "beta_x,beta_y,beta_z,in_omega_plus,borderline,gamma_mass_max,argmax_piece,"
               "piece_dist_over_eps,ball_fraction,qstar_x,qstar_y,qstar_z";
    }
    std::string csv_row() const {
        return fmt_g17(barycenter[0]) + "," + fmt_g17(barycenter[1]) + "," + fmt_g17(barycenter[2]) + "," +
               std::to_string(in_omega_plus ? 1 : 0) + "," + std::to_string(borderline ? 1 : 0) + "," +
               fmt_g17(gamma_mass_max) + "," + std::to_string(argmax_piece) + "," +
               fmt_g17(piece_boundary_dist_over_eps) + "," + fmt_g17(ball_fraction) + "," +
               fmt_g17(q_star[0]) + "," + fmt_g17(q_star[1]) + "," + fmt_g17(q_star[2]);
    }
};

// distance from a point to the voxel domain (0 inside), via cell centers
inline double distance_to_domain(const DomainGrid& g, const std::array<double, 3>& x) {
    double best2 = 1e300;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!g.mask[c]) continue;
                const auto cc = g.center(i, j, k);
                const double dx = cc[0] - x[0], dy = cc[1] - x[1], dz = cc[2] - x[2];
                const double d2 = dx * dx + dy * dy + dz * dz;
                if (d2 < best2) best2 = d2;
            }
    const double d = std::sqrt(best2) - 0.5 * g.h;
    return d > 0.0 ? d : 0.0;
}

inline ConcentrationReport concentration_report(const ScalarField& u, const Partition& part, double r,
                                                const SystemParams& P) {
    const DomainGrid& g = *u.grid;
    ConcentrationReport rep;
    const ScalarField gam = gamma_density(u, P.eps, P.p);
    rep.barycenter = barycenter_of_density(gam);
    const double dist_b = distance_to_domain(g, rep.barycenter);
    rep.in_omega_plus = dist_b <= r;
    rep.borderline = std::abs(dist_b - r) <= g.h;
    const CellMasses cm = cell_masses(u, part, P.eps, P.p);
    rep.gamma_mass_max = cm.max_mass;
    rep.argmax_piece = cm.argmax;
    double dmin = 1e300;
    for (const std::size_t c : part.pieces[cm.argmax]) dmin = std::min(dmin, g.dist(c));
    rep.piece_boundary_dist_over_eps = dmin / P.eps;
    // q_star: cell of maximal Gamma density
    const std::size_t qc = gam.argmax_cell();
    const int qi = static_cast<int>(qc % g.nx);
    const int qj = static_cast<int>((qc / g.nx) % g.ny);
    const int qk = static_cast<int>(qc / (static_cast<std::size_t>(g.nx) * g.ny));
    rep.q_star = g.center(qi, qj, qk);
    rep.ball_fraction = ball_concentration(u, rep.q_star, r, P.eps, P.p);
    return rep;
}

} // namespace sms
