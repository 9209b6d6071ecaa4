#pragma once

// ScalarField: one real value per interior cell of a DomainGrid, stored on
// the full box with exterior entries pinned to zero (Dirichlet extension).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sms/grid.hpp"
#include "sms/reduce.hpp"

namespace sms {

struct ScalarField {
    const DomainGrid* grid = nullptr;
    std::vector<double> v;  // size grid->ncells(), zero on exterior cells

    ScalarField() = default;
    explicit ScalarField(const DomainGrid& g) : grid(&g), v(g.ncells(), 0.0) {}

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t c) { return v[c]; }
    double operator[](std::size_t c) const { return v[c]; }

    // zero out exterior entries (call after bulk writes)
    void enforce_mask() {
        for (std::size_t c = 0; c < v.size(); ++c)
            if (!grid->mask[c]) v[c] = 0.0;
    }

    void fill(double a) {
        for (std::size_t c = 0; c < v.size(); ++c) v[c] = grid->mask[c] ? a : 0.0;
    }

    void scale(double a) {
        for (auto& x : v) x *= a;
    }

    double max_abs() const {
        double m = 0.0;
        for (auto x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double min_value() const {
        double m = 0.0;
        for (std::size_t c = 0; c < v.size(); ++c)
            if (grid->mask[c]) m = std::min(m, v[c]);
        return m;
    }
    double max_value() const {
        double m = 0.0;
        for (std::size_t c = 0; c < v.size(); ++c)
            if (grid->mask[c]) m = std::max(m, v[c]);
        return m;
    }
    std::size_t argmax_cell() const {
        std::size_t best = 0;
        double m = -1e300;
        for (std::size_t c = 0; c < v.size(); ++c)
            if (grid->mask[c] && v[c] > m) {
                m = v[c];
                best = c;
            }
        return best;
    }

    bool finite() const {
        for (auto x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

inline void check_same_grid(const ScalarField& a, const ScalarField& b) {
    if (a.grid != b.grid) throw std::invalid_argument("fields live on different grids");
}

inline ScalarField positive_part(const ScalarField& u) {
    ScalarField out(*u.grid);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(u.size()); ++c)
        out.v[c] = u.v[c] > 0.0 ? u.v[c] : 0.0;
    return out;
}

// out = a*x + b*y (same grid)
inline void lin_comb(ScalarField& out, double a, const ScalarField& x, double b, const ScalarField& y) {
    check_same_grid(x, y);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(x.size()); ++c)
        out.v[c] = a * x.v[c] + b * y.v[c];
}

// Trilinear sample of a field at a physical point; zero outside the box.
inline double sample_trilinear(const ScalarField& f, double x, double y, double z) {
    const DomainGrid& g = *f.grid;
    const double fx = (x - g.origin[0]) / g.h - 0.5;
    const double fy = (y - g.origin[1]) / g.h - 0.5;
    const double fz = (z - g.origin[2]) / g.h - 0.5;
    const int i0 = static_cast<int>(std::floor(fx));
    const int j0 = static_cast<int>(std::floor(fy));
    const int k0 = static_cast<int>(std::floor(fz));
    const double tx = fx - i0, ty = fy - j0, tz = fz - k0;
    auto at = [&](int i, int j, int k) -> double {
        if (i < 0 || j < 0 || k < 0 || i >= g.nx || j >= g.ny || k >= g.nz) return 0.0;
        return f.v[g.idx(i, j, k)];
    };
    double s = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                const double w = (di ? tx : 1 - tx) * (dj ? ty : 1 - ty) * (dk ? tz : 1 - tz);
                s += w * at(i0 + di, j0 + dj, k0 + dk);
            }
    return s;
}

} // namespace sms
