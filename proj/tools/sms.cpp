// Command-line driver for the Schroedinger-Maxwell solver library.

#include <CLI11.hpp>

#include <iostream>

#include "sms/driver.hpp"

namespace {

int run_ground_state(const sms::SolverConfig& cfg) {
    sms::GroundStateOptions opt = sms::detail::gs_options(cfg);
    opt.verbose = true;
    sms::GroundState gs = sms::obtain_ground_state(cfg.omega, cfg.q, cfg.p, opt, cfg.cache_dir);
    std::cout << "m_inf=" << gs.m_inf << " (coarse " << gs.m_inf_coarse << ", extrapolated "
              << gs.m_inf_extrap << ")\n"
              << "G(U)=" << gs.g_U << " |U|_H1^2=" << gs.norm_h1_sq << " peak=" << gs.peak
              << " boundary_decay=" << gs.boundary_decay << "\n"
              << "cache hash " << gs.config_hash << "\n";
    return 0;
}

int run_solve(const sms::SolverConfig& cfg) {
    sms::DomainGrid grid = sms::build_domain(cfg);
    for (const auto& w : sms::validate(cfg, grid)) std::cerr << "warning: " << w << "\n";
    sms::GroundState gs = sms::obtain_ground_state(cfg.omega, cfg.q, cfg.p, sms::detail::gs_options(cfg),
                                                   cfg.cache_dir);
    const double r = sms::detail::effective_r(cfg, grid);
    const sms::SystemParams P = cfg.system();
    const auto xi = sms::detail::deepest_cell(grid);
    sms::ProjectedBump phi = sms::phi_eps(gs, xi, cfg.eps, grid, r, P);
    sms::CriticalPoint cp = sms::descend(phi.u, P, cfg.descend_config(), "solve-center");
    std::filesystem::create_directories(cfg.out_dir);
    sms::save_field(cfg.out_dir + "/u.smsf", cp.u);
    sms::save_field(cfg.out_dir + "/psi.smsf", cp.psi);
    std::ofstream os(cfg.out_dir + "/energy.csv", std::ios::binary);
    os << sms::EnergyBreakdown::csv_header() << "\n" << cp.energy.csv_row() << "\n";
    std::cout << "status=" << sms::to_string(cp.status) << " iterations=" << cp.iterations
              << " I_eps=" << cp.energy.total << " grad_norm=" << cp.grad_norm << "\n"
              << "beta=(" << cp.barycenter[0] << "," << cp.barycenter[1] << "," << cp.barycenter[2]
              << ")\n";
    return cp.converged() ? 0 : 3;
}

int run_census(const sms::SolverConfig& cfg) {
    sms::GroundState gs = sms::obtain_ground_state(cfg.omega, cfg.q, cfg.p, sms::detail::gs_options(cfg),
                                                   cfg.cache_dir);
    sms::ExperimentReport rep = sms::multiplicity_census(cfg, gs, &std::cerr);
    rep.write(cfg.out_dir);
    std::cout << "census classes=" << rep.classes.size() << " m_eps=" << rep.m_eps
              << " m_inf=" << rep.m_inf << " -> " << cfg.out_dir << "/report.csv\n";
    return rep.partial ? 3 : 0;
}

std::vector<double> default_sweep(const sms::SolverConfig& cfg, const std::vector<double>& mult) {
    sms::DomainGrid grid = sms::build_domain(cfg);
    const double r = sms::detail::effective_r(cfg, grid);
    std::vector<double> eps;
    for (double m : mult) eps.push_back(m * r);
    return eps;
}

int run_sweep(const sms::SolverConfig& cfg) {
    sms::GroundState gs = sms::obtain_ground_state(cfg.omega, cfg.q, cfg.p, sms::detail::gs_options(cfg),
                                                   cfg.cache_dir);
    const std::vector<double> eps =
        cfg.sweep_eps.empty() ? default_sweep(cfg, {0.3, 0.2, 0.15, 0.1}) : cfg.sweep_eps;
    sms::ExperimentReport rep = sms::epsilon_sweep(cfg, gs, eps, &std::cerr);
    rep.write(cfg.out_dir);
    std::cout << "sweep rows=" << rep.rows.size() << " m_inf=" << rep.m_inf << " -> " << cfg.out_dir
              << "/report.csv\n";
    return 0;
}

int run_teps(const sms::SolverConfig& cfg) {
    sms::GroundState gs = sms::obtain_ground_state(cfg.omega, cfg.q, cfg.p, sms::detail::gs_options(cfg),
                                                   cfg.cache_dir);
    const std::vector<double> eps =
        cfg.sweep_eps.empty() ? default_sweep(cfg, {0.3, 0.2, 0.1}) : cfg.sweep_eps;
    sms::TepsResult res = sms::teps_bound(cfg, gs, eps, &std::cerr);
    res.report.write(cfg.out_dir);
    std::cout << "c_eps(smallest)=" << res.c_eps_smallest << " -> " << cfg.out_dir << "/report.csv\n";
    return 0;
}

int run_higher(const sms::SolverConfig& cfg) {
    sms::GroundState gs = sms::obtain_ground_state(cfg.omega, cfg.q, cfg.p, sms::detail::gs_options(cfg),
                                                   cfg.cache_dir);
    sms::ExperimentReport census = sms::multiplicity_census(cfg, gs, &std::cerr);
    if (census.partial) {
        census.write(cfg.out_dir);
        return 3;
    }
    sms::TepsResult teps = sms::teps_bound(cfg, gs, {cfg.eps}, &std::cerr);
    sms::ExperimentReport rep =
        sms::higher_energy_search(cfg, gs, census, teps.c_eps_smallest, &std::cerr);
    census.write(cfg.out_dir + "/census");
    rep.write(cfg.out_dir);
    bool found = false;
    for (const auto& row : rep.rows) found = found || row.note == "higher-energy-candidate";
    std::cout << (found ? "higher-energy candidate found" : "absence (search grid logged)") << " -> "
              << cfg.out_dir << "/report.csv\n";
    return 0;
}

int run_slab(const sms::SolverConfig& cfg) {
    sms::GroundState gs = sms::obtain_ground_state(cfg.omega, cfg.q, cfg.p, sms::detail::gs_options(cfg),
                                                   cfg.cache_dir);
    sms::SolverConfig c = cfg;
    if (c.shape.rfind("slab", 0) != 0) c.shape = "slab:lz=0.25";
    sms::ExperimentReport rep = sms::slab_repulsion_probe(c, gs, &std::cerr);
    rep.write(cfg.out_dir);
    std::cout << "slab probe rows=" << rep.rows.size() << " -> " << cfg.out_dir << "/report.csv\n";
    return 0;
}

int run_export(const std::string& field_path, const std::string& out_path) {
    sms::LoadedField lf = sms::load_field(field_path);
    std::ofstream os(out_path, std::ios::binary);
    os << "x,y,z,value\n";
    const sms::DomainGrid& g = *lf.grid;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!g.mask[c]) continue;
                const auto x = g.center(i, j, k);
                os << sms::fmt_g17(x[0]) << "," << sms::fmt_g17(x[1]) << "," << sms::fmt_g17(x[2]) << ","
                   << sms::fmt_g17(lf.field.v[c]) << "\n";
            }
    std::cout << "exported " << field_path << " -> " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nehari-manifold solver for the singularly perturbed Schroedinger-Maxwell system"};
    app.require_subcommand(1);

    std::string config_path, out_dir, shape, field_path, export_out = "field.csv";
    std::uint64_t seed = 0;
    int workers = 0, resolution = 0;
    double eps = 0.0;
    bool have_seed = false;

    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { have_seed = true; });
    app.add_option("--workers", workers, "worker count (reductions stay deterministic)");
    app.add_option("--resolution", resolution, "cells per axis");
    app.add_option("--eps", eps, "perturbation parameter");
    app.add_option("--shape", shape, "domain spec tag:k=v,... (ball, cube, torus, slab, custom)");

    auto* gs_cmd = app.add_subcommand("ground-state", "compute and cache the limit-problem ground state");
    auto* solve_cmd = app.add_subcommand("solve", "single descent from a centered bump");
    auto* census_cmd = app.add_subcommand("census", "multistart census of low-energy solutions");
    auto* sweep_cmd = app.add_subcommand("sweep", "m_eps ladder over a descending eps list");
    auto* teps_cmd = app.add_subcommand("teps-bound", "c_eps bound over the contractible set");
    auto* higher_cmd = app.add_subcommand("higher", "search for the higher-energy solution");
    auto* slab_cmd = app.add_subcommand("slab-probe", "boundary repulsion diagnostic on a slab");
    auto* export_cmd = app.add_subcommand("export", "dump an SMSF field to CSV");
    export_cmd->add_option("--field", field_path, "SMSF input")->required();
    export_cmd->add_option("--csv", export_out, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    sms::SolverConfig cfg;
    try {
        if (!config_path.empty()) cfg = sms::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (have_seed) cfg.seed = seed;
        if (workers > 0) cfg.workers = workers;
        if (resolution > 0) cfg.resolution = resolution;
        if (eps > 0.0) cfg.eps = eps;
        if (!shape.empty()) cfg.shape = shape;
    } catch (const std::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    }

    try {
        std::filesystem::create_directories(cfg.out_dir);
        {
            std::ofstream os(cfg.out_dir + "/config_echo.txt", std::ios::binary);
            os << cfg.canonical() << "hash=" << cfg.hash() << "\n";
        }
        if (gs_cmd->parsed()) return run_ground_state(cfg);
        if (solve_cmd->parsed()) return run_solve(cfg);
        if (census_cmd->parsed()) return run_census(cfg);
        if (sweep_cmd->parsed()) return run_sweep(cfg);
        if (teps_cmd->parsed()) return run_teps(cfg);
        if (higher_cmd->parsed()) return run_higher(cfg);
        if (slab_cmd->parsed()) return run_slab(cfg);
        if (export_cmd->parsed()) return run_export(field_path, export_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    } catch (const sms::SolveFailure& e) {
        std::cerr << "solver failure: " << e.what() << " (iters=" << e.stats.iterations
                  << ", residual=" << e.stats.residual << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
