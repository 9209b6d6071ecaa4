#pragma once

// SolverConfig: every numeric knob of the pipeline, parsed from key=value
// text files with CLI overrides. The canonical rendering (sorted keys,
// %.17g) feeds the FNV-1a config hash that stamps every report.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "sms/grid.hpp"
#include "sms/io.hpp"
#include "sms/limit.hpp"

namespace sms {

struct SolverConfig {
    // system parameters
    double eps = 0.03;
    double omega = 1.0;
    double q = 1.0;
    double p = 5.0;
    double r = 0.0;  // 0 -> inradius / 3

    // tolerances and caps
    double lin_tol = 1e-10;
    double tol_g_rel = 1e-6;
    double energy_tol = 1e-8;
    int max_iter = 1500;
    int cg_cap = 0;  // 0 -> 10 * max extent

    // discretization
    std::string shape = "ball:R=0.46";
    double box = 1.0;
    int resolution = 64;

    // experiments
    std::uint64_t seed = 42;
    int multistart = 12;
    int sweep_starts = 1;
    std::vector<double> sweep_eps;
    std::vector<int> sweep_resolution;  // optional, parallel to sweep_eps
    int teps_theta_count = 5;
    int teps_anchor_count = 6;

    // dedup thresholds
    double dedup_norm_rel = 0.1;
    double dedup_energy_rel = 1e-3;   // x m_inf
    double dedup_beta_factor = 2.0;   // x eps
    double delta_band_rel = 0.1;      // low-energy band: m_inf * (1 + this)

    // ground state reference
    double gs_box = 12.0;
    int gs_resolution = 128;

    // io
    std::string out_dir = "out";
    std::string cache_dir = "cache";
    int workers = 1;

    std::string canonical() const {
        std::map<std::string, std::string> kv;
        kv["eps"] = fmt_g17(eps);
        kv["omega"] = fmt_g17(omega);
        kv["q"] = fmt_g17(q);
        kv["p"] = fmt_g17(p);
        kv["r"] = fmt_g17(r);
        kv["lin_tol"] = fmt_g17(lin_tol);
        kv["tol_g_rel"] = fmt_g17(tol_g_rel);
        kv["energy_tol"] = fmt_g17(energy_tol);
        kv["max_iter"] = std::to_string(max_iter);
        kv["cg_cap"] = std::to_string(cg_cap);
        kv["shape"] = shape;
        kv["box"] = fmt_g17(box);
        kv["resolution"] = std::to_string(resolution);
        kv["seed"] = std::to_string(seed);
        kv["multistart"] = std::to_string(multistart);
        kv["sweep_starts"] = std::to_string(sweep_starts);
        {
            std::string s;
            for (double e : sweep_eps) s += fmt_g17(e) + " ";
            kv["sweep_eps"] = s;
        }
        {
            std::string s;
            for (int n : sweep_resolution) s += std::to_string(n) + " ";
            kv["sweep_resolution"] = s;
        }
        kv["teps_theta_count"] = std::to_string(teps_theta_count);
        kv["teps_anchor_count"] = std::to_string(teps_anchor_count);
        kv["dedup_norm_rel"] = fmt_g17(dedup_norm_rel);
        kv["dedup_energy_rel"] = fmt_g17(dedup_energy_rel);
        kv["dedup_beta_factor"] = fmt_g17(dedup_beta_factor);
        kv["delta_band_rel"] = fmt_g17(delta_band_rel);
        kv["gs_box"] = fmt_g17(gs_box);
        kv["gs_resolution"] = std::to_string(gs_resolution);
        std::string out;
        for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
        return out;
    }

    std::string hash() const { return std::to_string(detail::fnv1a(canonical())); }

    SystemParams system() const {
        SystemParams P;
        P.eps = eps;
        P.omega = omega;
        P.q = q;
        P.p = p;
        P.lin_tol = lin_tol;
        return P;
    }

    DescendConfig descend_config() const {
        DescendConfig d;
        d.max_iter = max_iter;
        d.tol_g_rel = tol_g_rel;
        return d;
    }
};

namespace detail {

inline void apply_kv(SolverConfig& c, const std::string& key, const std::string& val) {
    auto as_d = [&] { return std::stod(val); };
    auto as_i = [&] { return std::stoi(val); };
    if (key == "eps") c.eps = as_d();
    else if (key == "omega") c.omega = as_d();
    else if (key == "q") c.q = as_d();
    else if (key == "p") c.p = as_d();
    else if (key == "r") c.r = as_d();
    else if (key == "lin_tol") c.lin_tol = as_d();
    else if (key == "tol_g_rel") c.tol_g_rel = as_d();
    else if (key == "energy_tol") c.energy_tol = as_d();
    else if (key == "max_iter") c.max_iter = as_i();
    else if (key == "cg_cap") c.cg_cap = as_i();
    else if (key == "shape") c.shape = val;
    else if (key == "box") c.box = as_d();
    else if (key == "resolution") c.resolution = as_i();
    else if (key == "seed") c.seed = std::stoull(val);
    else if (key == "multistart") c.multistart = as_i();
    else if (key == "sweep_starts") c.sweep_starts = as_i();
    else if (key == "sweep_eps") {
        c.sweep_eps.clear();
        std::istringstream ss(val);
        double x;
        while (ss >> x) c.sweep_eps.push_back(x);
    } else if (key == "sweep_resolution") {
        c.sweep_resolution.clear();
        std::istringstream ss(val);
        int x;
        while (ss >> x) c.sweep_resolution.push_back(x);
    }
    else if (key == "teps_theta_count") c.teps_theta_count = as_i();
    else if (key == "teps_anchor_count") c.teps_anchor_count = as_i();
    else if (key == "dedup_norm_rel") c.dedup_norm_rel = as_d();
    else if (key == "dedup_energy_rel") c.dedup_energy_rel = as_d();
    else if (key == "dedup_beta_factor") c.dedup_beta_factor = as_d();
    else if (key == "delta_band_rel") c.delta_band_rel = as_d();
    else if (key == "gs_box") c.gs_box = as_d();
    else if (key == "gs_resolution") c.gs_resolution = as_i();
    else if (key == "out") c.out_dir = val;
    else if (key == "cache") c.cache_dir = val;
    else if (key == "workers") c.workers = as_i();
    else throw std::invalid_argument("unknown config key: " + key);
}

} // namespace detail

inline SolverConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    SolverConfig c;
    std::string line;
    while (std::getline(is, line)) {
        const auto hashpos = line.find('#');
        if (hashpos != std::string::npos) line = line.substr(0, hashpos);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) detail::apply_kv(c, key, val);
    }
    return c;
}

// shape spec "tag:k=v,k=v"
inline DomainGrid build_domain(const std::string& shape, double box, int resolution) {
    std::string tag = shape;
    std::map<std::string, std::string> params;
    const auto colon = shape.find(':');
    if (colon != std::string::npos) {
        tag = shape.substr(0, colon);
        std::istringstream ss(shape.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("bad shape parameter: " + item);
            params[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }
    auto get = [&](const std::string& k, double dflt) {
        auto it = params.find(k);
        return it == params.end() ? dflt : std::stod(it->second);
    };
    if (tag == "ball") return build_ball(box, resolution, get("R", 0.46));
    if (tag == "cube") return build_cube(box, resolution);
    if (tag == "torus") return build_torus(box, resolution, get("major", 0.26), get("minor", 0.2));
    if (tag == "slab") {
        const double lz = get("lz", 0.25);
        const int nz = std::max(8, static_cast<int>(std::lround(resolution * lz / box)));
        return build_slab(box, box, lz, resolution, resolution, nz);
    }
    if (tag == "custom") {
        auto it = params.find("path");
        if (it == params.end()) throw std::invalid_argument("custom shape needs path=<file.smsm>");
        LoadedField lf = load_field(it->second);
        return *lf.grid;
    }
    throw std::invalid_argument("unknown shape tag: " + tag);
}

inline DomainGrid build_domain(const SolverConfig& c) { return build_domain(c.shape, c.box, c.resolution); }

// hard invariants; returns soft warnings
inline std::vector<std::string> validate(const SolverConfig& c, const DomainGrid& g) {
    if (!(c.p > 4.0 && c.p < 6.0)) throw std::invalid_argument("config: p must lie in (4,6)");
    if (!(c.eps >= 2.0 * g.h))
        throw std::invalid_argument("config: eps must be at least 2h at this resolution");
    std::vector<std::string> warn;
    const double r = c.r > 0.0 ? c.r : g.inradius() / 3.0;
    if (!(r >= 2.0 * c.eps)) throw std::invalid_argument("config: need r >= 2 eps");
    if (r < 4.0 * c.eps) warn.push_back("r < 4 eps: bump scale separation is marginal");
    return warn;
}

} // namespace sms
