#pragma once

// Voxel domain geometry: uniform Cartesian box, interior mask, distance
// to the domain boundary. Fields live on interior cells and are extended
// by zero outside (homogeneous Dirichlet).

#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace sms {

enum class Shape { Ball, Cube, Torus, Slab, CustomMask };

inline const char* shape_name(Shape s) {
    switch (s) {
        case Shape::Ball: return "ball";
        case Shape::Cube: return "cube";
        case Shape::Torus: return "torus";
        case Shape::Slab: return "slab";
        case Shape::CustomMask: return "custom-mask";
    }
    return "?";
}

struct DomainGrid {
    int nx = 0, ny = 0, nz = 0;
    double h = 0.0;
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    std::vector<std::uint8_t> mask;  // 1 = interior cell
    std::vector<double> sdist;       // signed distance to domain boundary (<0 outside)
    Shape shape = Shape::Cube;
    std::string shape_params;        // human-readable echo of the build parameters
    std::size_t n_interior = 0;

    std::size_t ncells() const { return static_cast<std::size_t>(nx) * ny * nz; }
    std::size_t idx(int i, int j, int k) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (j + static_cast<std::size_t>(ny) * k);
    }
    std::array<double, 3> center(int i, int j, int k) const {
        return {origin[0] + (i + 0.5) * h, origin[1] + (j + 0.5) * h, origin[2] + (k + 0.5) * h};
    }
    bool interior(std::size_t c) const { return mask[c] != 0; }
    // distance to the domain boundary; 0 on exterior cells by convention
    double dist(std::size_t c) const { return sdist[c] > 0.0 ? sdist[c] : 0.0; }

    double inradius() const {
        double r = 0.0;
        for (std::size_t c = 0; c < ncells(); ++c)
            if (mask[c] && sdist[c] > r) r = sdist[c];
        return r;
    }
    double box_diag() const {
        const double lx = nx * h, ly = ny * h, lz = nz * h;
        return std::sqrt(lx * lx + ly * ly + lz * lz);
    }
};

namespace detail {

inline void check_resolution(int nx, int ny, int nz) {
    if (nx < 8 || ny < 8 || nz < 8)
        throw std::invalid_argument("build_domain: resolution must be at least 8 cells per axis");
}

inline void flood_check_connected(const DomainGrid& g) {
    if (g.n_interior == 0) throw std::runtime_error("build_domain: empty interior");
    std::vector<std::uint8_t> seen(g.ncells(), 0);
    std::size_t start = 0;
    while (!g.mask[start]) ++start;
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = 1;
    std::size_t cnt = 0;
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    while (!q.empty()) {
        const std::size_t c = q.front();
        q.pop();
        ++cnt;
        const int i = static_cast<int>(c % nx);
        const int j = static_cast<int>((c / nx) % ny);
        const int k = static_cast<int>(c / (static_cast<std::size_t>(nx) * ny));
        const int di[6] = {1, -1, 0, 0, 0, 0};
        const int dj[6] = {0, 0, 1, -1, 0, 0};
        const int dk[6] = {0, 0, 0, 0, 1, -1};
        for (int d = 0; d < 6; ++d) {
            const int ii = i + di[d], jj = j + dj[d], kk = k + dk[d];
            if (ii < 0 || jj < 0 || kk < 0 || ii >= nx || jj >= ny || kk >= nz) continue;
            const std::size_t cc = g.idx(ii, jj, kk);
            if (g.mask[cc] && !seen[cc]) {
                seen[cc] = 1;
                q.push(cc);
            }
        }
    }
    if (cnt != g.n_interior)
        throw std::runtime_error("build_domain: interior mask is not connected");
}

template <class SDF>
void fill_from_sdf(DomainGrid& g, SDF&& sdf) {
    g.mask.assign(g.ncells(), 0);
    g.sdist.assign(g.ncells(), 0.0);
    g.n_interior = 0;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const auto x = g.center(i, j, k);
                const double s = sdf(x[0], x[1], x[2]);
                const std::size_t c = g.idx(i, j, k);
                g.sdist[c] = s;
                g.mask[c] = s > 0.0 ? 1 : 0;
            }
    for (std::size_t c = 0; c < g.ncells(); ++c) g.n_interior += g.mask[c];
}

// Godunov fast-sweeping solve of |grad d| = 1 with d ~ h/2 seeded on cells
// adjacent to the interface. Used for custom masks where no analytic
// distance is available; `inside` selects which side gets the field.
inline void fast_sweep_distance(const DomainGrid& g, bool inside, std::vector<double>& d) {
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    const double BIG = 1e30;
    d.assign(g.ncells(), BIG);
    auto sel = [&](std::size_t c) { return (g.mask[c] != 0) == inside; };
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!sel(c)) continue;
                bool border = (i == 0 || i == nx - 1 || j == 0 || j == ny - 1 || k == 0 || k == nz - 1) && inside;
                const int di[6] = {1, -1, 0, 0, 0, 0};
                const int dj[6] = {0, 0, 1, -1, 0, 0};
                const int dk[6] = {0, 0, 0, 0, 1, -1};
                for (int t = 0; t < 6 && !border; ++t) {
                    const int ii = i + di[t], jj = j + dj[t], kk = k + dk[t];
                    if (ii < 0 || jj < 0 || kk < 0 || ii >= nx || jj >= ny || kk >= nz) continue;
                    if (!sel(g.idx(ii, jj, kk))) border = true;
                }
                if (border) d[c] = 0.5 * g.h;
            }
    auto update = [&](int i, int j, int k) {
        const std::size_t c = g.idx(i, j, k);
        if (!sel(c) || d[c] == 0.5 * g.h) return;
        auto axis_min = [&](int a) {
            double m = BIG;
            if (a == 0) {
                if (i > 0) m = std::min(m, d[g.idx(i - 1, j, k)]);
                if (i < nx - 1) m = std::min(m, d[g.idx(i + 1, j, k)]);
            } else if (a == 1) {
                if (j > 0) m = std::min(m, d[g.idx(i, j - 1, k)]);
                if (j < ny - 1) m = std::min(m, d[g.idx(i, j + 1, k)]);
            } else {
                if (k > 0) m = std::min(m, d[g.idx(i, j, k - 1)]);
                if (k < nz - 1) m = std::min(m, d[g.idx(i, j, k + 1)]);
            }
            return m;
        };
        double a[3] = {axis_min(0), axis_min(1), axis_min(2)};
        std::sort(a, a + 3);
        const double hh = g.h;
        double x = a[0] + hh;
        if (x > a[1]) {
            const double s = a[0] + a[1];
            x = 0.5 * (s + std::sqrt(std::max(0.0, 2 * hh * hh - (a[1] - a[0]) * (a[1] - a[0]))));
            if (x > a[2]) {
                const double q = a[0] + a[1] + a[2];
                const double disc = q * q - 3 * (a[0] * a[0] + a[1] * a[1] + a[2] * a[2] - hh * hh);
                x = (q + std::sqrt(std::max(0.0, disc))) / 3.0;
            }
        }
        if (x < d[c]) d[c] = x;
    };
    for (int pass = 0; pass < 3; ++pass)
        for (int sk : {0, 1})
            for (int sj : {0, 1})
                for (int si : {0, 1})
                    for (int k = 0; k < nz; ++k)
                        for (int j = 0; j < ny; ++j)
                            for (int i = 0; i < nx; ++i)
                                update(si ? nx - 1 - i : i, sj ? ny - 1 - j : j, sk ? nz - 1 - k : k);
    for (std::size_t c = 0; c < g.ncells(); ++c)
        if (!sel(c)) d[c] = 0.0;
}

} // namespace detail

inline DomainGrid build_ball(double box, int n, double radius) {
    detail::check_resolution(n, n, n);
    if (radius <= 0.0) throw std::invalid_argument("build_ball: radius must be positive");
    if (2.0 * radius >= box) throw std::invalid_argument("build_ball: ball does not fit in the box");
    DomainGrid g;
    g.nx = g.ny = g.nz = n;
    g.h = box / n;
    g.origin = {0.0, 0.0, 0.0};
    g.shape = Shape::Ball;
    g.shape_params = "R=" + std::to_string(radius) + ",box=" + std::to_string(box);
    const double c0 = 0.5 * box;
    detail::fill_from_sdf(g, [&](double x, double y, double z) {
        return radius - std::sqrt((x - c0) * (x - c0) + (y - c0) * (y - c0) + (z - c0) * (z - c0));
    });
    detail::flood_check_connected(g);
    return g;
}

inline DomainGrid build_cube(double box, int n) {
    detail::check_resolution(n, n, n);
    DomainGrid g;
    g.nx = g.ny = g.nz = n;
    g.h = box / n;
    g.origin = {0.0, 0.0, 0.0};
    g.shape = Shape::Cube;
    g.shape_params = "box=" + std::to_string(box);
    detail::fill_from_sdf(g, [&](double x, double y, double z) {
        const double dx = std::min(x, box - x);
        const double dy = std::min(y, box - y);
        const double dz = std::min(z, box - z);
        return std::min({dx, dy, dz});
    });
    return g;
}

// Cube of size `box` centered at the origin (used by the limit problem).
inline DomainGrid build_centered_cube(double box, int n) {
    DomainGrid g = build_cube(box, n);
    g.origin = {-0.5 * box, -0.5 * box, -0.5 * box};
    return g;
}

inline DomainGrid build_torus(double box, int n, double major, double minor) {
    detail::check_resolution(n, n, n);
    if (!(major > minor && minor > 2.0 * box / n))
        throw std::invalid_argument("build_torus: need major > minor > 2h");
    if (major + minor >= 0.5 * box) throw std::invalid_argument("build_torus: torus does not fit in the box");
    DomainGrid g;
    g.nx = g.ny = g.nz = n;
    g.h = box / n;
    g.origin = {0.0, 0.0, 0.0};
    g.shape = Shape::Torus;
    g.shape_params = "major=" + std::to_string(major) + ",minor=" + std::to_string(minor) + ",box=" + std::to_string(box);
    const double c0 = 0.5 * box;
    detail::fill_from_sdf(g, [&](double x, double y, double z) {
        const double rho = std::sqrt((x - c0) * (x - c0) + (y - c0) * (y - c0));
        const double qa = rho - major, qb = z - c0;
        return minor - std::sqrt(qa * qa + qb * qb);
    });
    detail::flood_check_connected(g);
    return g;
}

// Full box interior with anisotropic extent, thin in z.
inline DomainGrid build_slab(double lx, double ly, double lz, int nx, int ny, int nz) {
    detail::check_resolution(nx, ny, nz);
    const double hx = lx / nx, hy = ly / ny, hz = lz / nz;
    if (std::abs(hx - hy) > 1e-12 * hx || std::abs(hx - hz) > 1e-12 * hx)
        throw std::invalid_argument("build_slab: spacing must be isotropic (lx/nx == ly/ny == lz/nz)");
    DomainGrid g;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    g.h = hx;
    g.origin = {0.0, 0.0, 0.0};
    g.shape = Shape::Slab;
    g.shape_params = "lx=" + std::to_string(lx) + ",ly=" + std::to_string(ly) + ",lz=" + std::to_string(lz);
    detail::fill_from_sdf(g, [&](double x, double y, double z) {
        return std::min({x, lx - x, y, ly - y, z, lz - z});
    });
    return g;
}

// Domain from an externally supplied mask; distances by fast sweeping.
inline DomainGrid build_custom(int nx, int ny, int nz, double h, std::array<double, 3> origin,
                               std::vector<std::uint8_t> mask) {
    detail::check_resolution(nx, ny, nz);
    DomainGrid g;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    g.h = h;
    g.origin = origin;
    g.shape = Shape::CustomMask;
    g.mask = std::move(mask);
    if (g.mask.size() != g.ncells()) throw std::invalid_argument("build_custom: mask size mismatch");
    g.n_interior = 0;
    for (auto m : g.mask) g.n_interior += m ? 1 : 0;
    if (g.n_interior == 0) throw std::runtime_error("build_custom: empty interior");
    std::vector<double> din, dout;
    detail::fast_sweep_distance(g, true, din);
    detail::fast_sweep_distance(g, false, dout);
    g.sdist.assign(g.ncells(), 0.0);
    for (std::size_t c = 0; c < g.ncells(); ++c) g.sdist[c] = g.mask[c] ? din[c] : -dout[c];
    return g;
}

// Interior cells at distance >= r from the boundary (the set of admissible
// bump centers). Errors out when the erosion is empty.
inline std::vector<std::size_t> erode(const DomainGrid& g, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("erode: r must be positive");
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < g.ncells(); ++c)
        if (g.mask[c] && g.sdist[c] >= r) cells.push_back(c);
    if (cells.empty()) throw std::runtime_error("erode: no interior cell at distance >= r from the boundary");
    return cells;
}

// All box cells within distance r of the domain (interior included).
inline std::vector<std::size_t> dilate(const DomainGrid& g, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("dilate: r must be positive");
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < g.ncells(); ++c)
        if (g.mask[c] || -g.sdist[c] <= r) cells.push_back(c);
    return cells;
}

} // namespace sms
