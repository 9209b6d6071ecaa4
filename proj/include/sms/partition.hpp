#pragma once

// Good partition of the domain at scale eps: axis-aligned eps-cubes
// intersected with the interior. Pieces have diameter <= sqrt(3)*eps + 2h
// and the K-inflated pieces overlap at most nu(Omega) times.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "sms/grid.hpp"

namespace sms {

struct Partition {
    double cell_size = 0.0;                  // = eps
    std::vector<std::int32_t> assignment;    // per box cell, piece index or -1
    std::vector<std::vector<std::size_t>> pieces;  // interior cells per piece
    std::vector<std::array<double, 3>> anchors;    // representative points q_j
    int overlap_bound = 0;                   // nu
    int inflation = 3;                       // K
};

inline Partition cube_partition(const DomainGrid& g, double eps) {
    if (!(eps >= 2.0 * g.h)) throw std::invalid_argument("cube_partition: eps must be at least 2h");
    Partition P;
    P.cell_size = eps;
    P.assignment.assign(g.ncells(), -1);

    std::map<std::array<int, 3>, std::int32_t> key_to_piece;
    std::vector<std::array<int, 3>> piece_key;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.idx(i, j, k);
                if (!g.mask[c]) continue;
                const auto x = g.center(i, j, k);
                const std::array<int, 3> key = {static_cast<int>(std::floor((x[0] - g.origin[0]) / eps)),
                                                static_cast<int>(std::floor((x[1] - g.origin[1]) / eps)),
                                                static_cast<int>(std::floor((x[2] - g.origin[2]) / eps))};
                auto [it, fresh] = key_to_piece.try_emplace(key, static_cast<std::int32_t>(piece_key.size()));
                if (fresh) {
                    piece_key.push_back(key);
                    P.pieces.emplace_back();
                }
                P.assignment[c] = it->second;
                P.pieces[it->second].push_back(c);
            }

    // anchors: geometric cube center snapped to the nearest cell of the piece
    P.anchors.resize(P.pieces.size());
    for (std::size_t p = 0; p < P.pieces.size(); ++p) {
        const auto& key = piece_key[p];
        const std::array<double, 3> cc = {g.origin[0] + (key[0] + 0.5) * eps,
                                          g.origin[1] + (key[1] + 0.5) * eps,
                                          g.origin[2] + (key[2] + 0.5) * eps};
        double best = 1e300;
        std::array<double, 3> bestx{};
        for (const std::size_t c : P.pieces[p]) {
            const int i = static_cast<int>(c % g.nx);
            const int j = static_cast<int>((c / g.nx) % g.ny);
            const int k = static_cast<int>(c / (static_cast<std::size_t>(g.nx) * g.ny));
            const auto x = g.center(i, j, k);
            const double d2 = (x[0] - cc[0]) * (x[0] - cc[0]) + (x[1] - cc[1]) * (x[1] - cc[1]) +
                              (x[2] - cc[2]) * (x[2] - cc[2]);
            if (d2 < best) {
                best = d2;
                bestx = x;
            }
        }
        P.anchors[p] = bestx;
    }

    // nu: max number of K-inflated cubes containing one anchor; the inflated
    // radius is K * r2 with r2 = sqrt(3)/2 * eps (half the cube diagonal).
    const double rad = P.inflation * std::sqrt(3.0) / 2.0 * eps;
    int nu = 0;
    for (std::size_t a = 0; a < P.anchors.size(); ++a) {
        int cnt = 0;
        for (std::size_t b = 0; b < P.anchors.size(); ++b) {
            const double dx = P.anchors[a][0] - P.anchors[b][0];
            const double dy = P.anchors[a][1] - P.anchors[b][1];
            const double dz = P.anchors[a][2] - P.anchors[b][2];
            if (dx * dx + dy * dy + dz * dz <= rad * rad) ++cnt;
        }
        nu = std::max(nu, cnt);
    }
    P.overlap_bound = nu;
    return P;
}

} // namespace sms
