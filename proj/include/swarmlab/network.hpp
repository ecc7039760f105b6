#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swarmlab/core.hpp"

namespace swarmlab {

/// Directed topological k-nearest-neighbor graph, one row per agent,
/// each row ordered nearest first.
class NeighborTable {
public:
    NeighborTable() = default;
    NeighborTable(std::size_t n, std::size_t k) : n_(n), k_(k), idx_(n * k) {}

    std::size_t size() const { return n_; }
    std::size_t k() const { return k_; }

    std::span<const std::size_t> row(std::size_t i) const { return {idx_.data() + i * k_, k_}; }
    std::span<std::size_t> row(std::size_t i) { return {idx_.data() + i * k_, k_}; }

    /// Table restricted to the first `k` entries of each row.
    NeighborTable prefix(std::size_t k) const {
        NeighborTable out(n_, k);
        for (std::size_t i = 0; i < n_; ++i) {
            auto src = row(i);
            std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(k), out.row(i).begin());
        }
        return out;
    }

    friend bool operator==(const NeighborTable&, const NeighborTable&) = default;

private:
    std::size_t n_{0};
    std::size_t k_{0};
    std::vector<std::size_t> idx_;
};

inline void check_knn_args(std::size_t n, std::size_t k) {
    if (n < 2) {
        throw ConfigError("knn: need at least 2 agents, got " + std::to_string(n));
    }
    if (k < 1 || k > n - 1) {
        throw ConfigError("knn: k=" + std::to_string(k) + " outside [1, " + std::to_string(n - 1) + "]");
    }
}

namespace detail {

/// Brute-force all-pairs search, no validation. Ties at equal distance go to
/// the lower agent index.
inline NeighborTable knn_brute(std::span<const Vec2> positions, std::size_t k) {
    const std::size_t n = positions.size();
    NeighborTable table(n, k);
    std::vector<std::pair<double, std::size_t>> best(k);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 pi = positions[i];
        auto out = table.row(i);
        // Bounded insertion into a sorted buffer. Candidates arrive in
        // ascending index, so a strict distance comparison keeps lower
        // indices first on ties.
        std::size_t filled = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = dist2(pi, positions[j]);
            if (filled == k && !(d < best[k - 1].first)) continue;
            std::size_t slot = filled < k ? filled++ : k - 1;
            while (slot > 0 && d < best[slot - 1].first) {
                best[slot] = best[slot - 1];
                --slot;
            }
            best[slot] = {d, j};
        }
        for (std::size_t m = 0; m < k; ++m) out[m] = best[m].second;
    }
    return table;
}

} // namespace detail

/// Rows hold the k nearest other agents. The simulator itself requires
/// k >= 2 (checked by SimConfig); the search accepts any 1 <= k <= n-1.
inline NeighborTable knn(std::span<const Vec2> positions, std::size_t k) {
    check_knn_args(positions.size(), k);
    for (const auto& p : positions) {
        require_finite(p, "position");
    }
    return detail::knn_brute(positions, k);
}

} // namespace swarmlab
