#pragma once

// The limit problem on R^3: ground state U, its energy m_inf, the scaled
// cut-off bump W_{xi,eps}(x) = U((x-xi)/eps) chi(|x-xi|), and the projected
// bump Phi_eps(xi) = t(W) W.

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "sms/io.hpp"
#include "sms/nehari.hpp"

namespace sms {

struct GroundState {
    std::shared_ptr<DomainGrid> grid;  // centered cube, side box_size
    ScalarField U;
    SystemParams params;    // eps = 1, free-space potential
    double m_inf = 0.0;         // energy at the fine resolution
    double m_inf_coarse = 0.0;  // companion coarse-resolution energy
    double m_inf_extrap = 0.0;  // h^2 Richardson extrapolation of the two
    double g_U = 0.0;           // G(U)
    double norm_h1_sq = 0.0;    // ||U||_{H1}^2
    double lp_pow = 0.0;        // |U|_p^p
    double l2_sq = 0.0;         // |U|_2^2
    double peak = 0.0;          // max U
    double boundary_decay = 0.0;  // max |U| on box-adjacent cells / peak
    double box_size = 0.0;
    int resolution = 0;
    std::string config_hash;
};

struct GroundStateOptions {
    double box_size = 12.0;
    int resolution = 128;
    double coarse_factor = 0.75;   // companion resolution for Richardson
    double decay_tol = 1e-3;       // admissible boundary value relative to the peak
    DescendConfig descend;
    bool verbose = false;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string ground_state_key(double omega, double q, double p, double box, int res) {
    return "omega=" + fmt_g17(omega) + ";q=" + fmt_g17(q) + ";p=" + fmt_g17(p) +
           ";box=" + fmt_g17(box) + ";res=" + std::to_string(res);
}

// deterministic radial seed wide enough to land in the ground-state basin
inline ScalarField radial_seed(const DomainGrid& g, double amplitude) {
    ScalarField u(g);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!g.mask[c]) continue;
                const auto x = g.center(i, j, k);
                const double rr = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
                u.v[c] = amplitude * std::exp(-rr);
            }
    return u;
}

inline double boundary_decay_of(const ScalarField& u) {
    const DomainGrid& g = *u.grid;
    double worst = 0.0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (i != 0 && j != 0 && k != 0 && i != g.nx - 1 && j != g.ny - 1 && k != g.nz - 1)
                    continue;
                worst = std::max(worst, std::abs(u.v[g.idx(i, j, k)]));
            }
    const double pk = u.max_value();
    return pk > 0.0 ? worst / pk : 0.0;
}

inline CriticalPoint limit_solve(const DomainGrid& g, double omega, double q, double p,
                                 const DescendConfig& dcfg) {
    SystemParams P;
    P.eps = 1.0;
    P.omega = omega;
    P.q = q;
    P.p = p;
    P.free_space_psi = true;
    // stage 1: omega = 0 (no potential solves) to land near the profile
    SystemParams P0 = P;
    P0.omega = 0.0;
    ScalarField seed = radial_seed(g, 5.0);
    DescendConfig c0 = dcfg;
    CriticalPoint stage0 = descend(seed, P0, c0, "limit-seed");
    if (omega == 0.0) return stage0;
    return descend(stage0.u, P, dcfg, "limit-from-omega0");
}

} // namespace detail

inline GroundState ground_state(double omega, double q, double p, const GroundStateOptions& opt = {}) {
    if (!(opt.box_size > 0.0) || opt.resolution < 16)
        throw std::invalid_argument("ground_state: box must be positive and resolution >= 16");

    GroundState gs;
    gs.grid = std::make_shared<DomainGrid>(build_centered_cube(opt.box_size, opt.resolution));
    gs.box_size = opt.box_size;
    gs.resolution = opt.resolution;
    gs.params = SystemParams{1.0, omega, q, p, true, 1e-10};
    gs.config_hash =
        std::to_string(detail::fnv1a(detail::ground_state_key(omega, q, p, opt.box_size, opt.resolution)));

    CriticalPoint fine = detail::limit_solve(*gs.grid, omega, q, p, opt.descend);
    if (!fine.converged())
        throw std::runtime_error(std::string("ground_state: descent did not converge (") +
                                 to_string(fine.status) + ")");

    const int nc = std::max(16, static_cast<int>(std::lround(opt.resolution * opt.coarse_factor)));
    DomainGrid gc = build_centered_cube(opt.box_size, nc);
    CriticalPoint coarse = detail::limit_solve(gc, omega, q, p, opt.descend);

    gs.U = std::move(fine.u);
    gs.m_inf = fine.energy.total;
    gs.m_inf_coarse = coarse.energy.total;
    const double hf = opt.box_size / opt.resolution, hc = opt.box_size / nc;
    gs.m_inf_extrap = gs.m_inf + (gs.m_inf - gs.m_inf_coarse) * hf * hf / (hc * hc - hf * hf);
    gs.g_U = fine.energy.g_eps;
    gs.norm_h1_sq = 2.0 * fine.energy.quad;
    gs.lp_pow = fine.energy.pot * p;
    gs.l2_sq = reduce_sum(gs.U.size(), [&](std::size_t c) { return gs.U.v[c] * gs.U.v[c]; }) *
               gs.grid->h * gs.grid->h * gs.grid->h;
    gs.peak = gs.U.max_value();
    gs.boundary_decay = detail::boundary_decay_of(gs.U);
    if (gs.boundary_decay > opt.decay_tol)
        throw std::runtime_error("ground_state: profile does not decay at the box boundary; enlarge the box");
    return gs;
}

// ---------------------------------------------------------------------------
// cache

inline void save_ground_state(const GroundState& gs, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::string base = dir + "/ground_state_" + gs.config_hash;
    save_field(base + ".smsf", gs.U);
    nlohmann::json j;
    j["m_inf"] = gs.m_inf;
    j["m_inf_coarse"] = gs.m_inf_coarse;
    j["m_inf_extrap"] = gs.m_inf_extrap;
    j["g_U"] = gs.g_U;
    j["norm_h1_sq"] = gs.norm_h1_sq;
    j["lp_pow"] = gs.lp_pow;
    j["l2_sq"] = gs.l2_sq;
    j["peak"] = gs.peak;
    j["boundary_decay"] = gs.boundary_decay;
    j["box_size"] = gs.box_size;
    j["resolution"] = gs.resolution;
    j["omega"] = gs.params.omega;
    j["q"] = gs.params.q;
    j["p"] = gs.params.p;
    j["config_hash"] = gs.config_hash;
    std::ofstream os(base + ".json");
    os << j.dump(2) << "\n";
}

inline bool load_ground_state(GroundState& gs, double omega, double q, double p, double box, int res,
                              const std::string& dir) {
    const std::string hash =
        std::to_string(detail::fnv1a(detail::ground_state_key(omega, q, p, box, res)));
    const std::string base = dir + "/ground_state_" + hash;
    if (!std::filesystem::exists(base + ".smsf") || !std::filesystem::exists(base + ".json")) return false;
    std::ifstream is(base + ".json");
    nlohmann::json j;
    is >> j;
    LoadedField lf = load_field(base + ".smsf");
    gs.grid = lf.grid;
    gs.U = std::move(lf.field);
    gs.params = SystemParams{1.0, omega, q, p, true, 1e-10};
    gs.m_inf = j["m_inf"];
    gs.m_inf_coarse = j["m_inf_coarse"];
    gs.m_inf_extrap = j["m_inf_extrap"];
    gs.g_U = j["g_U"];
    gs.norm_h1_sq = j["norm_h1_sq"];
    gs.lp_pow = j["lp_pow"];
    gs.l2_sq = j["l2_sq"];
    gs.peak = j["peak"];
    gs.boundary_decay = j["boundary_decay"];
    gs.box_size = j["box_size"];
    gs.resolution = j["resolution"];
    gs.config_hash = j["config_hash"];
    return true;
}

inline GroundState obtain_ground_state(double omega, double q, double p, const GroundStateOptions& opt,
                                       const std::string& cache_dir) {
    GroundState gs;
    if (!cache_dir.empty() &&
        load_ground_state(gs, omega, q, p, opt.box_size, opt.resolution, cache_dir))
        return gs;
    gs = ground_state(omega, q, p, opt);
    if (!cache_dir.empty()) save_ground_state(gs, cache_dir);
    return gs;
}

// ---------------------------------------------------------------------------
// bumps

// C1 cubic taper: 1 on [0, r/2], 0 beyond r
inline double bump_cutoff(double s, double r) {
    if (s <= 0.5 * r) return 1.0;
    if (s >= r) return 0.0;
    const double tau = (s - 0.5 * r) / (0.5 * r);
    return 1.0 - tau * tau * (3.0 - 2.0 * tau);
}

// W_{xi,eps} on the target grid. xi must lie in the eroded set {dist >= r};
// eps <= r/2 keeps a usable core inside the cutoff (eps <= r/4 for the
// asymptotic diagnostics).
inline ScalarField make_bump(const GroundState& gs, const std::array<double, 3>& xi, double eps,
                             const DomainGrid& grid, double r) {
    if (!(eps > 0.0 && r > 0.0)) throw std::invalid_argument("make_bump: eps and r must be positive");
    if (eps > 0.5 * r) throw std::invalid_argument("make_bump: need eps <= r/2");
    const int ci = static_cast<int>(std::floor((xi[0] - grid.origin[0]) / grid.h));
    const int cj = static_cast<int>(std::floor((xi[1] - grid.origin[1]) / grid.h));
    const int ck = static_cast<int>(std::floor((xi[2] - grid.origin[2]) / grid.h));
    if (ci < 0 || cj < 0 || ck < 0 || ci >= grid.nx || cj >= grid.ny || ck >= grid.nz)
        throw std::invalid_argument("make_bump: center outside the box");
    if (grid.sdist[grid.idx(ci, cj, ck)] < r)
        throw std::invalid_argument("make_bump: center not in the eroded set (dist < r)");

    ScalarField w(grid);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < grid.nz; ++k)
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const std::size_t c = grid.idx(i, j, k);
                if (!grid.mask[c]) continue;
                const auto x = grid.center(i, j, k);
                const double dx = x[0] - xi[0], dy = x[1] - xi[1], dz = x[2] - xi[2];
                const double s = std::sqrt(dx * dx + dy * dy + dz * dz);
                if (s >= r) continue;
                const double chi = bump_cutoff(s, r);
                const double uval = sample_trilinear(gs.U, dx / eps, dy / eps, dz / eps);
                w.v[c] = chi * uval;
            }
    return w;
}

struct ProjectedBump {
    ScalarField u;
    double t_factor = 0.0;
    EnergyBreakdown energy;
};

// Phi_eps(xi) = t(W) W with its energy record
inline ProjectedBump phi_eps(const GroundState& gs, const std::array<double, 3>& xi, double eps,
                             const DomainGrid& grid, double r, const SystemParams& P) {
    ProjectedBump out;
    ScalarField w = make_bump(gs, xi, eps, grid, r);
    LinSolveStats stats;
    ScalarField psi = P.omega != 0.0 ? solve_potential(w, P, stats) : ScalarField(grid);
    NehariScalars sc = nehari_scalars_with_psi(w, psi, P);
    const double t = nehari_scale(sc, P);
    out.t_factor = t;
    out.u = std::move(w);
    out.u.scale(t);
    NehariScalars scu{t * t * sc.norm_sq, t * t * t * t * sc.g, std::pow(t, P.p) * sc.pot_pow};
    out.energy = breakdown_from_scalars(scu, P);
    return out;
}

} // namespace sms
