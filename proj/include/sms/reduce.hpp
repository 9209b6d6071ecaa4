#pragma once

// Deterministic reductions. All sums in the library go through pairwise
// (tree) reduction over fixed-size blocks, so results are bit-identical
// regardless of thread count. Block partials may be computed in parallel;
// the combine stage is a serial pairwise tree over the partial array.

#include <cstddef>
#include <span>
#include <vector>

namespace sms {

namespace detail {

inline constexpr std::size_t kReduceBlock = 1024;

// Serial pairwise tree over [lo, hi).
template <class F>
double pairwise(std::size_t lo, std::size_t hi, F&& leaf) {
    const std::size_t n = hi - lo;
    if (n <= kReduceBlock) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += leaf(i);
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise(lo, mid, leaf) + pairwise(mid, hi, leaf);
}

} // namespace detail

// sum_i f(i) for i in [0, n), pairwise order. Parallel over leaf blocks:
// the tree shape is fixed by n alone, so the result does not depend on
// the number of threads.
template <class F>
double reduce_sum(std::size_t n, F&& f) {
    using detail::kReduceBlock;
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    if (nblocks == 1) return detail::pairwise(0, n, f);

    std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    // pairwise combine of block partials
    std::vector<double> cur = std::move(partial);
    while (cur.size() > 1) {
        std::vector<double> next((cur.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < cur.size(); i += 2) next[i / 2] = cur[i] + cur[i + 1];
        if (cur.size() % 2) next.back() = cur.back();
        cur = std::move(next);
    }
    return cur[0];
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    return reduce_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

inline double sum(std::span<const double> a) {
    return reduce_sum(a.size(), [&](std::size_t i) { return a[i]; });
}

} // namespace sms
