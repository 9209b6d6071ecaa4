#pragma once

// The reduction of the Maxwell equation: solve -eps^2 lap psi = q u^2 with
// zero Dirichlet data on the masked domain (conjugate gradient, matrix
// free), and the free-space Newtonian potential by FFT convolution with
// the 1/(4 pi |x|) kernel on a zero-padded doubled box.

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "sms/field.hpp"
#include "sms/norms.hpp"

namespace sms {

struct LinSolveStats {
    int iterations = 0;
    double residual = 0.0;  // relative 2-norm
    bool converged = false;
};

struct SolveFailure : std::runtime_error {
    LinSolveStats stats;
    explicit SolveFailure(const std::string& what, LinSolveStats s) : std::runtime_error(what), stats(s) {}
};

namespace detail {

// y = -eps^2 lap_h x on interior cells (x assumed zero outside)
inline void apply_neg_lap(const DomainGrid& g, double eps, const std::vector<double>& x,
                          std::vector<double>& y) {
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const std::size_t sx = 1, sy = static_cast<std::size_t>(nx), sz = static_cast<std::size_t>(nx) * ny;
    const double w = eps * eps / (g.h * g.h);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!g.mask[c]) {
                    y[c] = 0.0;
                    continue;
                }
                double s = 6.0 * x[c];
                if (i > 0) s -= x[c - sx];
                if (i + 1 < nx) s -= x[c + sx];
                if (j > 0) s -= x[c - sy];
                if (j + 1 < ny) s -= x[c + sy];
                if (k > 0) s -= x[c - sz];
                if (k + 1 < nz) s -= x[c + sz];
                y[c] = w * s;
            }
}

} // namespace detail

struct CgOptions {
    double tol = 1e-10;      // relative residual
    int max_iter = 0;        // 0 -> 10 * max grid extent
    const ScalarField* warm_start = nullptr;
};

// Solve -eps^2 lap psi = rhs (Dirichlet). The operator has constant
// diagonal 6 eps^2/h^2, so the Jacobi preconditioner is a scalar and PCG
// reduces to plain CG; we keep the plain iteration.
inline ScalarField solve_masked_poisson(const DomainGrid& g, double eps, const ScalarField& rhs,
                                        LinSolveStats& stats, const CgOptions& opt = {}) {
    const std::size_t n = g.ncells();
    ScalarField psi(g);
    std::vector<double> r(n, 0.0), p(n, 0.0), ap(n, 0.0);

    const double bnorm = std::sqrt(dot(rhs.v, rhs.v));
    stats = LinSolveStats{};
    if (bnorm == 0.0) {
        stats.converged = true;
        return psi;  // zero source, zero potential
    }

    if (opt.warm_start && opt.warm_start->grid == &g) {
        psi.v = opt.warm_start->v;
        detail::apply_neg_lap(g, eps, psi.v, ap);
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < static_cast<long long>(n); ++c)
            r[c] = g.mask[c] ? rhs.v[c] - ap[c] : 0.0;
    } else {
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < static_cast<long long>(n); ++c) r[c] = g.mask[c] ? rhs.v[c] : 0.0;
    }

    p = r;
    double rr = dot(r, r);
    const int cap = opt.max_iter > 0 ? opt.max_iter : 10 * std::max({g.nx, g.ny, g.nz});
    int it = 0;
    while (it < cap && std::sqrt(rr) > opt.tol * bnorm) {
        detail::apply_neg_lap(g, eps, p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) break;  // lost positive definiteness: bail out
        const double alpha = rr / pap;
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < static_cast<long long>(n); ++c) {
            psi.v[c] += alpha * p[c];
            r[c] -= alpha * ap[c];
        }
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
#pragma omp parallel for schedule(static)
        for (long long c = 0; c < static_cast<long long>(n); ++c) p[c] = r[c] + beta * p[c];
        ++it;
    }
    stats.iterations = it;
    stats.residual = std::sqrt(rr) / bnorm;
    stats.converged = stats.residual <= opt.tol;
    return psi;
}

// psi_eps(u): -eps^2 lap psi = q u^2, psi = 0 on the boundary.
inline ScalarField solve_psi_eps(const ScalarField& u, double eps, double q, LinSolveStats& stats,
                                 const CgOptions& opt = {}) {
    if (!(eps > 0.0 && q > 0.0)) throw std::invalid_argument("solve_psi_eps: eps and q must be positive");
    const DomainGrid& g = *u.grid;
    ScalarField rhs(g);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(rhs.size()); ++c)
        rhs.v[c] = g.mask[c] ? q * u.v[c] * u.v[c] : 0.0;
    ScalarField psi = solve_masked_poisson(g, eps, rhs, stats, opt);
    if (!stats.converged)
        throw SolveFailure("solve_psi_eps: conjugate gradient did not reach tolerance", stats);
    return psi;
}

inline ScalarField solve_psi_eps(const ScalarField& u, double eps, double q) {
    LinSolveStats stats;
    return solve_psi_eps(u, eps, q, stats);
}

// ---------------------------------------------------------------------------
// Free-space Newtonian potential

namespace detail {

// cell average of 1/(4 pi |x|) over one cell, by tensor Gauss quadrature
// (even node count keeps the origin out of the node set)
inline double kernel_self_cell(double h) {
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                 0.3478548451374538};
    double s = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                const double x = 0.5 * 0.5 * h * gx[a];
                const double y = 0.5 * 0.5 * h * gx[b];
                const double z = 0.5 * 0.5 * h * gx[c];
                const double w = gw[a] * gw[b] * gw[c] * 0.125 * 0.125 * h * h * h;
                s += w / std::sqrt(x * x + y * y + z * z);
            }
    // s approximates the integral over the half-size cell; the integrand is
    // homogeneous of degree -1, so integral over the full cell = 4 * s.
    return 4.0 * s / (4.0 * M_PI) / (h * h * h);
}

struct KernelCache {
    std::map<std::tuple<int, int, int, long long>, std::vector<std::complex<double>>> fft;
    std::mutex mtx;
};

inline KernelCache& kernel_cache() {
    static KernelCache kc;
    return kc;
}

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

} // namespace detail

// Newtonian potential phi(x) = q sum_y src(y) K(x-y) h^3, K = 1/(4 pi |x|),
// by zero-padded FFT convolution on the doubled box. src must be the
// (nonnegative) source density, e.g. u^2.
inline ScalarField coulomb_free(const ScalarField& src, double q) {
    const DomainGrid& g = *src.grid;
    const int px = 2 * g.nx, py = 2 * g.ny, pz = 2 * g.nz;
    const std::size_t nreal = static_cast<std::size_t>(px) * py * pz;
    const std::size_t ncplx = static_cast<std::size_t>(pz) * py * (px / 2 + 1);
    const double h = g.h;

    // kernel FFT, cached per padded size and spacing
    const long long hkey = static_cast<long long>(h * 1e15);
    std::vector<std::complex<double>>* kfft = nullptr;
    {
        auto& kc = detail::kernel_cache();
        std::lock_guard<std::mutex> lock(kc.mtx);
        auto key = std::make_tuple(px, py, pz, hkey);
        auto it = kc.fft.find(key);
        if (it == kc.fft.end()) {
            std::vector<double> ker(nreal);
            const double self = detail::kernel_self_cell(h);
#pragma omp parallel for schedule(static)
            for (int k = 0; k < pz; ++k)
                for (int j = 0; j < py; ++j)
                    for (int i = 0; i < px; ++i) {
                        const int oi = i < px / 2 ? i : i - px;
                        const int oj = j < py / 2 ? j : j - py;
                        const int ok = k < pz / 2 ? k : k - pz;
                        const std::size_t c =
                            static_cast<std::size_t>(i) + static_cast<std::size_t>(px) * (j + static_cast<std::size_t>(py) * k);
                        if (oi == 0 && oj == 0 && ok == 0) {
                            ker[c] = self;
                        } else {
                            const double r = h * std::sqrt(double(oi) * oi + double(oj) * oj + double(ok) * ok);
                            ker[c] = 1.0 / (4.0 * M_PI * r);
                        }
                    }
            std::vector<std::complex<double>> kf(ncplx);
            {
                std::lock_guard<std::mutex> plock(detail::fftw_plan_mutex());
                fftw_plan plan = fftw_plan_dft_r2c_3d(pz, py, px, ker.data(),
                                                      reinterpret_cast<fftw_complex*>(kf.data()), FFTW_ESTIMATE);
                fftw_execute(plan);
                fftw_destroy_plan(plan);
            }
            it = kc.fft.emplace(key, std::move(kf)).first;
        }
        kfft = &it->second;
    }

    std::vector<double> pad(nreal, 0.0);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                pad[static_cast<std::size_t>(i) + static_cast<std::size_t>(px) * (j + static_cast<std::size_t>(py) * k)] =
                    src.v[g.idx(i, j, k)];

    std::vector<std::complex<double>> sf(ncplx);
    {
        std::lock_guard<std::mutex> plock(detail::fftw_plan_mutex());
        fftw_plan plan = fftw_plan_dft_r2c_3d(pz, py, px, pad.data(),
                                              reinterpret_cast<fftw_complex*>(sf.data()), FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    const double scale = q * h * h * h / static_cast<double>(nreal);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(ncplx); ++c) sf[c] *= (*kfft)[c] * scale;

    {
        std::lock_guard<std::mutex> plock(detail::fftw_plan_mutex());
        fftw_plan plan = fftw_plan_dft_c2r_3d(pz, py, px, reinterpret_cast<fftw_complex*>(sf.data()),
                                              pad.data(), FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    ScalarField out(g);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out.v[g.idx(i, j, k)] =
                    pad[static_cast<std::size_t>(i) + static_cast<std::size_t>(px) * (j + static_cast<std::size_t>(py) * k)];
    out.enforce_mask();
    return out;
}

// Diagnostic gap between the Dirichlet reduction and the free-space kernel:
// | eps^-3 int u^2 psi_eps(u) - eps^-3 int u^2 psi_free(u) |  where
// psi_free solves -eps^2 lap psi = q u^2 in free space.
inline double psi_consistency(const ScalarField& u, double eps, double q) {
    if (u.max_abs() == 0.0) return 0.0;
    const DomainGrid& g = *u.grid;
    const double inv_eps3 = 1.0 / (eps * eps * eps);
    ScalarField psi_d = solve_psi_eps(u, eps, q);
    ScalarField u2(g);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(u2.size()); ++c) u2.v[c] = u.v[c] * u.v[c];
    ScalarField psi_f = coulomb_free(u2, q);
    psi_f.scale(1.0 / (eps * eps));
    const double g_d = l2_pairing(u2, psi_d) * inv_eps3;
    const double g_f = l2_pairing(u2, psi_f) * inv_eps3;
    return std::abs(g_d - g_f);
}

} // namespace sms
