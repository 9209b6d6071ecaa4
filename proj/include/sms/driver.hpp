#pragma once

// Experiment orchestration: multiplicity census, epsilon sweeps, the T_eps
// energy bound, the higher-energy search and the slab repulsion probe.
// Reports are plain CSV with a fixed column order; doubles render as %.17g
// and every reduction in the pipeline is deterministic, so identical
// configs produce byte-identical files. Wall times go to the log only.

#include <chrono>
#include <filesystem>
#include <random>

#include "sms/concentration.hpp"
#include "sms/config.hpp"
#include "sms/limit.hpp"
#include "sms/nehari.hpp"

namespace sms {

struct RunRow {
    int run_id = 0;
    std::string kind;       // census | sweep | teps | higher | slab
    std::string ancestry;
    std::string status;
    int iterations = 0;
    double grad_norm = 0.0;
    EnergyBreakdown energy;
    std::array<double, 3> beta{};
    std::array<double, 3> peak{};
    int class_id = -1;
    bool in_band = false;
    ConcentrationReport conc;
    double t_factor = 0.0;
    double g_gap = 0.0;       // |G_eps(W) - G(U)| for sweep rows
    double theta = 0.0;       // teps rows
    std::array<double, 3> anchor{};
    int resolution = 0;
    std::string note;

    static std::string csv_header() {
        return "run_id,kind,ancestry,status,iterations,grad_norm," + EnergyBreakdown::csv_header() +
               ",beta_x,beta_y,beta_z,peak_x,peak_y,peak_z,class_id,in_band," +
               ConcentrationReport::csv_header() +
               ",t_factor,g_gap,theta,anchor_x,anchor_y,anchor_z,resolution,note";
    }
    std::string csv_row() const {
        return std::to_string(run_id) + "," + kind + "," + ancestry + "," + status + "," +
               std::to_string(iterations) + "," + fmt_g17(grad_norm) + "," + energy.csv_row() + "," +
               fmt_g17(beta[0]) + "," + fmt_g17(beta[1]) + "," + fmt_g17(beta[2]) + "," +
               fmt_g17(peak[0]) + "," + fmt_g17(peak[1]) + "," + fmt_g17(peak[2]) + "," +
               std::to_string(class_id) + "," + std::to_string(in_band ? 1 : 0) + "," + conc.csv_row() +
               "," + fmt_g17(t_factor) + "," + fmt_g17(g_gap) + "," + fmt_g17(theta) + "," +
               fmt_g17(anchor[0]) + "," + fmt_g17(anchor[1]) + "," + fmt_g17(anchor[2]) + "," +
               std::to_string(resolution) + "," + note;
    }
};

struct CensusClass {
    int class_id = 0;
    double energy = 0.0;
    std::array<double, 3> beta{};
    int members = 0;
    int rep_run = 0;
};

struct ExperimentReport {
    std::string kind;
    std::vector<RunRow> rows;
    std::vector<CensusClass> classes;
    double m_eps = 0.0;
    double m_inf = 0.0;
    double c_eps = 0.0;
    std::string config_hash;
    bool partial = false;

    void write(const std::string& dir) const {
        std::filesystem::create_directories(dir);
        {
            std::ofstream os(dir + "/report.csv", std::ios::binary);
            os << RunRow::csv_header() << "\n";
            for (const auto& r : rows) os << r.csv_row() << "\n";
        }
        {
            std::ofstream os(dir + "/classes.csv", std::ios::binary);
            os << "class_id,energy,beta_x,beta_y,beta_z,members,rep_run\n";
            for (const auto& c : classes)
                os << c.class_id << "," << fmt_g17(c.energy) << "," << fmt_g17(c.beta[0]) << ","
                   << fmt_g17(c.beta[1]) << "," << fmt_g17(c.beta[2]) << "," << c.members << ","
                   << c.rep_run << "\n";
        }
        {
            std::ofstream os(dir + "/summary.csv", std::ios::binary);
            os << "key,value\n";
            os << "kind," << kind << "\n";
            os << "m_eps," << fmt_g17(m_eps) << "\n";
            os << "m_inf," << fmt_g17(m_inf) << "\n";
            os << "c_eps," << fmt_g17(c_eps) << "\n";
            os << "classes," << classes.size() << "\n";
            os << "runs," << rows.size() << "\n";
            os << "partial," << (partial ? 1 : 0) << "\n";
            os << "config_hash," << config_hash << "\n";
        }
    }
};

// ---------------------------------------------------------------------------
// deterministic Poisson-disk sampling over a cell set

inline std::vector<std::array<double, 3>> poisson_disk_centers(const DomainGrid& g,
                                                               const std::vector<std::size_t>& cells,
                                                               int count, std::uint64_t seed) {
    std::vector<std::array<double, 3>> pts;
    if (count <= 0 || cells.empty()) return pts;
    const double vol = static_cast<double>(cells.size()) * g.h * g.h * g.h;
    double min_dist = 0.7 * std::cbrt(vol / count);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    while (static_cast<int>(pts.size()) < count && min_dist > g.h) {
        for (int attempt = 0; attempt < 4000 && static_cast<int>(pts.size()) < count; ++attempt) {
            const std::size_t c = cells[pick(rng)];
            const int i = static_cast<int>(c % g.nx);
            const int j = static_cast<int>((c / g.nx) % g.ny);
            const int k = static_cast<int>(c / (static_cast<std::size_t>(g.nx) * g.ny));
            const auto x = g.center(i, j, k);
            bool ok = true;
            for (const auto& y : pts) {
                const double dx = x[0] - y[0], dy = x[1] - y[1], dz = x[2] - y[2];
                if (dx * dx + dy * dy + dz * dz < min_dist * min_dist) {
                    ok = false;
                    break;
                }
            }
            if (ok) pts.push_back(x);
        }
        min_dist *= 0.8;
    }
    return pts;
}

// ---------------------------------------------------------------------------
// dedup

struct DedupThresholds {
    double norm_rel = 0.1;
    double energy_abs = 0.0;  // pass dedup_energy_rel * m_inf
    double beta_abs = 0.0;    // pass dedup_beta_factor * eps
};

// Union-find closure of the pairwise identification; class order is
// (energy, lexicographic beta) of the representative, deterministic.
inline std::vector<int> dedup_assign(const std::vector<const CriticalPoint*>& pts, double eps,
                                     const DedupThresholds& th) {
    const int n = static_cast<int>(pts.size());
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const CriticalPoint& A = *pts[a];
            const CriticalPoint& B = *pts[b];
            if (std::abs(A.energy.total - B.energy.total) >= th.energy_abs) continue;
            const double db = std::sqrt(
                (A.barycenter[0] - B.barycenter[0]) * (A.barycenter[0] - B.barycenter[0]) +
                (A.barycenter[1] - B.barycenter[1]) * (A.barycenter[1] - B.barycenter[1]) +
                (A.barycenter[2] - B.barycenter[2]) * (A.barycenter[2] - B.barycenter[2]));
            if (db >= th.beta_abs) continue;
            ScalarField diff(*A.u.grid);
            lin_comb(diff, 1.0, A.u, -1.0, B.u);
            const double nd = norm_eps(diff, eps) /
                              std::max(std::sqrt(2.0 * A.energy.quad), std::sqrt(2.0 * B.energy.quad));
            if (nd >= th.norm_rel) continue;
            parent[find(a)] = find(b);
        }
    // canonical class ids ordered by (energy, lex beta) of representatives
    std::vector<int> root(n);
    for (int i = 0; i < n; ++i) root[i] = find(i);
    std::vector<int> reps;
    for (int i = 0; i < n; ++i)
        if (root[i] == i) reps.push_back(i);
    std::vector<int> best(n, -1);  // min-energy member per root
    for (int i = 0; i < n; ++i) {
        int& b = best[root[i]];
        if (b < 0 || pts[i]->energy.total < pts[b]->energy.total) b = i;
    }
    std::sort(reps.begin(), reps.end(), [&](int a, int b) {
        const CriticalPoint& A = *pts[best[a]];
        const CriticalPoint& B = *pts[best[b]];
        if (A.energy.total != B.energy.total) return A.energy.total < B.energy.total;
        return A.barycenter < B.barycenter;
    });
    std::vector<int> class_of_root(n, -1);
    for (int cid = 0; cid < static_cast<int>(reps.size()); ++cid) class_of_root[reps[cid]] = cid;
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i) out[i] = class_of_root[root[i]];
    return out;
}

// ---------------------------------------------------------------------------
// shared run helpers

namespace detail {

inline double effective_r(const SolverConfig& cfg, const DomainGrid& g) {
    return cfg.r > 0.0 ? cfg.r : g.inradius() / 3.0;
}

inline std::array<double, 3> deepest_cell(const DomainGrid& g) {
    std::size_t best = 0;
    double d = -1.0;
    for (std::size_t c = 0; c < g.ncells(); ++c)
        if (g.mask[c] && g.sdist[c] > d) {
            d = g.sdist[c];
            best = c;
        }
    const int i = static_cast<int>(best % g.nx);
    const int j = static_cast<int>((best / g.nx) % g.ny);
    const int k = static_cast<int>(best / (static_cast<std::size_t>(g.nx) * g.ny));
    return g.center(i, j, k);
}

inline RunRow row_from_point(const CriticalPoint& cp, const Partition& part, double r,
                             const SystemParams& P, const std::string& kind, int run_id) {
    RunRow row;
    row.run_id = run_id;
    row.kind = kind;
    row.ancestry = cp.ancestry;
    row.status = to_string(cp.status);
    row.iterations = cp.iterations;
    row.grad_norm = cp.grad_norm;
    row.energy = cp.energy;
    row.beta = cp.barycenter;
    row.peak = cp.peak;
    row.conc = concentration_report(cp.u, part, r, P);
    return row;
}

inline GroundStateOptions gs_options(const SolverConfig& cfg) {
    GroundStateOptions o;
    o.box_size = cfg.gs_box;
    o.resolution = cfg.gs_resolution;
    o.descend = cfg.descend_config();
    o.descend.max_iter = std::max(o.descend.max_iter, 2000);
    return o;
}

} // namespace detail

// ---------------------------------------------------------------------------
// census

inline ExperimentReport multiplicity_census(const SolverConfig& cfg, const GroundState& gs,
                                            std::ostream* log = nullptr) {
    DomainGrid grid = build_domain(cfg);
    const auto warnings = validate(cfg, grid);
    const double r = detail::effective_r(cfg, grid);
    const SystemParams P = cfg.system();
    const double m_inf = gs.m_inf_extrap;
    const double band = m_inf * (1.0 + cfg.delta_band_rel);

    ExperimentReport rep;
    rep.kind = "census";
    rep.config_hash = cfg.hash();
    rep.m_inf = m_inf;

    Partition part = cube_partition(grid, cfg.eps);
    const auto centers = poisson_disk_centers(grid, erode(grid, r), cfg.multistart, cfg.seed);

    std::vector<CriticalPoint> points;
    points.reserve(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto& xi = centers[i];
        const auto t0 = std::chrono::steady_clock::now();
        ProjectedBump phi = phi_eps(gs, xi, cfg.eps, grid, r, P);
        CriticalPoint cp = descend(phi.u, P, cfg.descend_config(),
                                   "phi[" + std::to_string(i) + "]@(" + fmt_g17(xi[0]) + " " +
                                       fmt_g17(xi[1]) + " " + fmt_g17(xi[2]) + ")");
        const auto t1 = std::chrono::steady_clock::now();
        if (log)
            *log << "census run " << i << ": status=" << to_string(cp.status)
                 << " iters=" << cp.iterations << " E=" << cp.energy.total << " psi_solves=" << cp.psi_solves
                 << " wall=" << std::chrono::duration<double>(t1 - t0).count() << "s\n";
        if (cp.status == DescendStatus::NanDetected) {
            RunRow row = detail::row_from_point(cp, part, r, P, "census", static_cast<int>(i));
            row.t_factor = phi.t_factor;
            row.note = "hard-failure";
            rep.rows.push_back(row);
            rep.partial = true;
            rep.m_eps = 0.0;
            return rep;  // hard stop, partial report preserved
        }
        RunRow row = detail::row_from_point(cp, part, r, P, "census", static_cast<int>(i));
        row.t_factor = phi.t_factor;
        row.resolution = cfg.resolution;
        rep.rows.push_back(row);
        points.push_back(std::move(cp));
    }

    // census bookkeeping: converged, inside the low-energy band
    std::vector<const CriticalPoint*> band_pts;
    std::vector<std::size_t> band_idx;
    double m_eps = 0.0;
    bool has_converged = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].converged()) continue;
        if (!has_converged || points[i].energy.total < m_eps) m_eps = points[i].energy.total;
        has_converged = true;
        if (points[i].energy.total <= band) {
            band_pts.push_back(&points[i]);
            band_idx.push_back(i);
        }
    }
    DedupThresholds th;
    th.norm_rel = cfg.dedup_norm_rel;
    th.energy_abs = cfg.dedup_energy_rel * m_inf;
    th.beta_abs = cfg.dedup_beta_factor * cfg.eps;
    const std::vector<int> cls = dedup_assign(band_pts, cfg.eps, th);
    int nclasses = 0;
    for (int c : cls) nclasses = std::max(nclasses, c + 1);
    rep.classes.resize(nclasses);
    for (std::size_t t = 0; t < band_pts.size(); ++t) {
        rep.rows[band_idx[t]].class_id = cls[t];
        rep.rows[band_idx[t]].in_band = true;
        CensusClass& cc = rep.classes[cls[t]];
        cc.class_id = cls[t];
        ++cc.members;
        if (cc.members == 1 || band_pts[t]->energy.total < cc.energy) {
            cc.energy = band_pts[t]->energy.total;
            cc.beta = band_pts[t]->barycenter;
            cc.rep_run = static_cast<int>(band_idx[t]);
        }
    }
    rep.m_eps = has_converged ? m_eps : 0.0;
    if (log) {
        for (const auto& w : warnings) *log << "config warning: " << w << "\n";
        *log << "census classes: " << rep.classes.size() << ", m_eps=" << rep.m_eps << "\n";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// epsilon sweep

inline ExperimentReport epsilon_sweep(const SolverConfig& cfg, const GroundState& gs,
                                      const std::vector<double>& eps_list, std::ostream* log = nullptr) {
    if (eps_list.empty()) throw std::invalid_argument("epsilon_sweep: empty eps list");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("epsilon_sweep: eps list must be descending");

    ExperimentReport rep;
    rep.kind = "sweep";
    rep.config_hash = cfg.hash();
    rep.m_inf = gs.m_inf_extrap;
    rep.m_eps = 0.0;

    const bool matched = cfg.sweep_resolution.size() == eps_list.size();
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        SolverConfig c = cfg;
        c.eps = eps_list[e];
        if (matched) c.resolution = cfg.sweep_resolution[e];
        DomainGrid grid = build_domain(c);
        if (!(c.eps >= 2.0 * grid.h))
            throw std::invalid_argument("epsilon_sweep: resolution violation for eps=" +
                                        fmt_g17(c.eps));
        const double r = detail::effective_r(c, grid);
        SystemParams P = c.system();
        Partition part = cube_partition(grid, c.eps);

        // start(s): the deepest cell first, then sampled centers
        std::vector<std::array<double, 3>> starts{detail::deepest_cell(grid)};
        if (c.sweep_starts > 1) {
            auto extra = poisson_disk_centers(grid, erode(grid, r), c.sweep_starts - 1, c.seed + e);
            starts.insert(starts.end(), extra.begin(), extra.end());
        }

        double m_eps_here = 0.0;
        const CriticalPoint* best = nullptr;
        std::vector<CriticalPoint> pts;
        double t_factor_center = 0.0, g_gap_center = 0.0;
        for (std::size_t s = 0; s < starts.size(); ++s) {
            ProjectedBump phi = phi_eps(gs, starts[s], c.eps, grid, r, P);
            // G gap of the raw bump against the limit profile
            ScalarField w = make_bump(gs, starts[s], c.eps, grid, r);
            const double gw = P.omega != 0.0 ? g_eps_with_psi(w, solve_potential(w, P), P.eps)
                                             : g_eps(w, P.eps, P.q);
            const double ggap = std::abs(gw - gs.g_U);
            if (s == 0) {
                t_factor_center = phi.t_factor;
                g_gap_center = ggap;
            }
            CriticalPoint cp = descend(phi.u, P, c.descend_config(),
                                       "sweep-eps=" + fmt_g17(c.eps) + "-start" + std::to_string(s));
            if (log)
                *log << "sweep eps=" << c.eps << " N=" << c.resolution << " start " << s
                     << ": status=" << to_string(cp.status) << " iters=" << cp.iterations
                     << " E=" << cp.energy.total << "\n";
            pts.push_back(std::move(cp));
        }
        for (const auto& cp : pts)
            if (cp.converged() && (best == nullptr || cp.energy.total < m_eps_here)) {
                m_eps_here = cp.energy.total;
                best = &cp;
            }
        if (best == nullptr) throw std::runtime_error("epsilon_sweep: no converged run at eps=" +
                                                      fmt_g17(c.eps));
        RunRow row = detail::row_from_point(*best, part, r, P, "sweep", static_cast<int>(e));
        row.t_factor = t_factor_center;
        row.g_gap = g_gap_center;
        row.resolution = c.resolution;
        row.note = "m_eps";
        rep.rows.push_back(row);
        if (e == 0 || m_eps_here < rep.m_eps) rep.m_eps = m_eps_here;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// T_eps bound

// fixed compactly supported nonnegative profile for the contractible set
inline double teps_profile(double rho) {
    if (rho >= 2.0) return 0.0;
    const double x = 1.0 - 0.25 * rho * rho;
    return x * x;
}

struct TepsResult {
    ExperimentReport report;
    double theta_star = 0.0;
    std::array<double, 3> q_star{};
    double c_eps_smallest = 0.0;
};

inline TepsResult teps_bound(const SolverConfig& cfg, const GroundState& gs,
                             const std::vector<double>& eps_list, std::ostream* log = nullptr) {
    TepsResult out;
    ExperimentReport& rep = out.report;
    rep.kind = "teps";
    rep.config_hash = cfg.hash();
    rep.m_inf = gs.m_inf_extrap;

    DomainGrid grid = build_domain(cfg);
    const double r = detail::effective_r(cfg, grid);
    const auto q0 = detail::deepest_cell(grid);
    auto anchors = poisson_disk_centers(grid, erode(grid, r), cfg.teps_anchor_count, cfg.seed + 7);
    if (anchors.empty()) anchors.push_back(q0);

    const double amp = gs.peak;
    int run_id = 0;
    double best_energy_smallest = 0.0;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        SolverConfig c = cfg;
        c.eps = eps_list[e];
        if (!(c.eps >= 2.0 * grid.h)) throw std::invalid_argument("teps_bound: eps below 2h");
        SystemParams P = c.system();
        Partition part = cube_partition(grid, c.eps);

        // v_eps: fixed profile, scaled by eps around q0
        ScalarField v(grid);
        for (int k = 0; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    const std::size_t idx = grid.idx(i, j, k);
                    if (!grid.mask[idx]) continue;
                    const auto x = grid.center(i, j, k);
                    const double rho = std::sqrt((x[0] - q0[0]) * (x[0] - q0[0]) +
                                                 (x[1] - q0[1]) * (x[1] - q0[1]) +
                                                 (x[2] - q0[2]) * (x[2] - q0[2])) / c.eps;
                    v.v[idx] = amp * teps_profile(rho);
                }

        double c_eps = 0.0;
        double tmin = 1e300, tmax = 0.0;
        for (int ti = 0; ti < cfg.teps_theta_count; ++ti) {
            const double theta = cfg.teps_theta_count == 1
                                     ? 0.0
                                     : static_cast<double>(ti) / (cfg.teps_theta_count - 1);
            const std::size_t n_anchor = theta == 1.0 ? 1 : anchors.size();  // theta=1 drops W
            for (std::size_t a = 0; a < n_anchor; ++a) {
                ScalarField w = make_bump(gs, anchors[a], c.eps, grid, r);
                ScalarField u(grid);
                lin_comb(u, theta, v, 1.0 - theta, w);
                NehariScalars sc = nehari_scalars(u, P);
                if (!(sc.pot_pow > 0.0))
                    throw std::runtime_error("teps_bound: vanishing positive part on the grid");
                const double t = nehari_scale(sc, P);
                const double E = 0.5 * t * t * sc.norm_sq + 0.25 * P.omega * t * t * t * t * sc.g -
                                 std::pow(t, P.p) * sc.pot_pow / P.p;
                tmin = std::min(tmin, t);
                tmax = std::max(tmax, t);
                RunRow row;
                row.run_id = run_id++;
                row.kind = "teps";
                row.ancestry = "theta=" + fmt_g17(theta) + ";anchor=" + std::to_string(a);
                row.status = "evaluated";
                row.energy = breakdown_from_scalars(
                    NehariScalars{t * t * sc.norm_sq, t * t * t * t * sc.g, std::pow(t, P.p) * sc.pot_pow},
                    P);
                row.t_factor = t;
                row.theta = theta;
                row.anchor = anchors[a];
                row.resolution = cfg.resolution;
                rep.rows.push_back(row);
                if (E > c_eps) {
                    c_eps = E;
                    if (e + 1 == eps_list.size()) {
                        out.theta_star = theta;
                        out.q_star = anchors[a];
                    }
                }
            }
        }
        RunRow srow;
        srow.run_id = run_id++;
        srow.kind = "teps";
        srow.ancestry = "summary-eps=" + fmt_g17(c.eps);
        srow.status = "summary";
        srow.energy.eps = c.eps;
        srow.energy.total = c_eps;
        srow.t_factor = tmin;
        srow.g_gap = tmax;  // summary row carries [tmin, tmax] in (t_factor, g_gap)
        srow.note = "c_eps";
        rep.rows.push_back(srow);
        if (log) *log << "teps eps=" << c.eps << ": c_eps=" << c_eps << " t in [" << tmin << "," << tmax << "]\n";
        best_energy_smallest = c_eps;
    }
    rep.c_eps = best_energy_smallest;
    out.c_eps_smallest = best_energy_smallest;
    return out;
}

// ---------------------------------------------------------------------------
// higher-energy search

inline ExperimentReport higher_energy_search(const SolverConfig& cfg, const GroundState& gs,
                                             const ExperimentReport& census, double c_eps,
                                             std::ostream* log = nullptr) {
    DomainGrid grid = build_domain(cfg);
    const double r = detail::effective_r(cfg, grid);
    const SystemParams P = cfg.system();
    const double m_inf = gs.m_inf_extrap;
    const double band = m_inf * (1.0 + cfg.delta_band_rel);
    Partition part = cube_partition(grid, cfg.eps);

    ExperimentReport rep;
    rep.kind = "higher";
    rep.config_hash = cfg.hash();
    rep.m_inf = m_inf;
    rep.c_eps = c_eps;

    // two-bump initializer: deepest cell and its reflection through the
    // domain barycenter, snapped into the eroded set
    const auto xi1 = detail::deepest_cell(grid);
    std::array<double, 3> centroid{};
    std::size_t cnt = 0;
    for (int k = 0; k < grid.nz; ++k)
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                if (grid.mask[grid.idx(i, j, k)]) {
                    const auto x = grid.center(i, j, k);
                    centroid[0] += x[0];
                    centroid[1] += x[1];
                    centroid[2] += x[2];
                    ++cnt;
                }
    for (int a = 0; a < 3; ++a) centroid[a] /= static_cast<double>(cnt);
    std::array<double, 3> xi2 = {2 * centroid[0] - xi1[0], 2 * centroid[1] - xi1[1],
                                 2 * centroid[2] - xi1[2]};
    {
        const auto eroded = erode(grid, r);
        double bd = 1e300;
        std::array<double, 3> snap = xi2;
        for (const std::size_t c : eroded) {
            const int i = static_cast<int>(c % grid.nx);
            const int j = static_cast<int>((c / grid.nx) % grid.ny);
            const int k = static_cast<int>(c / (static_cast<std::size_t>(grid.nx) * grid.ny));
            const auto x = grid.center(i, j, k);
            const double d2 = (x[0] - xi2[0]) * (x[0] - xi2[0]) + (x[1] - xi2[1]) * (x[1] - xi2[1]) +
                              (x[2] - xi2[2]) * (x[2] - xi2[2]);
            if (d2 < bd) {
                bd = d2;
                snap = x;
            }
        }
        xi2 = snap;
    }

    std::vector<std::pair<std::string, ScalarField>> inits;
    {
        ScalarField w1 = make_bump(gs, xi1, cfg.eps, grid, r);
        ScalarField w2 = make_bump(gs, xi2, cfg.eps, grid, r);
        ScalarField two(grid);
        lin_comb(two, 0.5, w1, 0.5, w2);
        inits.emplace_back("two-bump", std::move(two));
    }

    int run_id = 0;
    for (auto& [name, u0] : inits) {
        CriticalPoint cp = descend(nehari_project(u0, P), P, cfg.descend_config(), name);
        RunRow row = detail::row_from_point(cp, part, r, P, "higher", run_id++);
        row.resolution = cfg.resolution;
        const bool above_band = cp.energy.total > band;
        const bool below_cap = c_eps <= 0.0 || cp.energy.total <= c_eps * 1.05;
        bool distinct = true;
        for (const auto& cls : census.classes) {
            if (std::abs(cp.energy.total - cls.energy) < cfg.dedup_energy_rel * m_inf) {
                const double db = std::sqrt((cp.barycenter[0] - cls.beta[0]) * (cp.barycenter[0] - cls.beta[0]) +
                                            (cp.barycenter[1] - cls.beta[1]) * (cp.barycenter[1] - cls.beta[1]) +
                                            (cp.barycenter[2] - cls.beta[2]) * (cp.barycenter[2] - cls.beta[2]));
                if (db < cfg.dedup_beta_factor * cfg.eps) distinct = false;
            }
        }
        const bool candidate = cp.converged() && above_band && below_cap && distinct;
        row.note = candidate ? "higher-energy-candidate" : "absence";
        row.in_band = !above_band;
        rep.rows.push_back(row);
        if (log)
            *log << "higher '" << name << "': status=" << to_string(cp.status) << " E=" << cp.energy.total
                 << " band=" << band << " c_eps=" << c_eps << (candidate ? "  -> candidate" : "") << "\n";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// slab repulsion probe

inline ExperimentReport slab_repulsion_probe(const SolverConfig& cfg, const GroundState& gs,
                                             std::ostream* log = nullptr) {
    DomainGrid grid = build_domain(cfg);
    const SystemParams P = cfg.system();
    ExperimentReport rep;
    rep.kind = "slab";
    rep.config_hash = cfg.hash();
    rep.m_inf = gs.m_inf_extrap;

    const double lz = grid.nz * grid.h;
    if (cfg.eps > 0.25 * lz) {
        RunRow row;
        row.kind = "slab";
        row.status = "skipped";
        row.note = "no-scale-separation:eps-comparable-to-thickness";
        rep.rows.push_back(row);
        if (log) *log << "slab probe skipped: eps too large for slab thickness\n";
        return rep;
    }
    const double r = 2.0 * cfg.eps;
    const double d0 = 2.0 * cfg.eps + grid.h;  // face distance of the seed
    const std::array<double, 3> xi = {0.5 * grid.nx * grid.h, 0.5 * grid.ny * grid.h, d0};

    Partition part = cube_partition(grid, cfg.eps);
    ScalarField u = nehari_project(make_bump(gs, xi, cfg.eps, grid, r), P);
    DescendConfig dc = cfg.descend_config();
    const int segments = 8;
    dc.max_iter = std::max(10, cfg.max_iter / segments);
    double z_initial = d0;
    CriticalPoint cp;
    for (int s = 0; s < segments; ++s) {
        cp = descend(u, P, dc, "slab-seg" + std::to_string(s));
        u = cp.u;
        RunRow row = detail::row_from_point(cp, part, r, P, "slab", s);
        const double face_dist = std::min(cp.barycenter[2], lz - cp.barycenter[2]);
        row.g_gap = face_dist;  // per-segment face distance of beta
        row.note = "face_dist";
        row.resolution = cfg.resolution;
        rep.rows.push_back(row);
        if (log) *log << "slab segment " << s << ": beta_z=" << cp.barycenter[2] << " E=" << cp.energy.total
                      << " status=" << to_string(cp.status) << "\n";
        if (cp.status == DescendStatus::Converged) break;
    }
    const double z_final = std::min(cp.barycenter[2], lz - cp.barycenter[2]);
    RunRow srow;
    srow.kind = "slab";
    srow.status = "summary";
    srow.g_gap = z_final;
    srow.t_factor = z_initial;
    srow.note = z_final > z_initial ? "drift-away-from-face" : "no-drift";
    srow.resolution = cfg.resolution;
    rep.rows.push_back(srow);
    return rep;
}

} // namespace sms
