// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

// smallest subset reaching theta * total; among those of equal size the one whose
// sorted descending order (ties by lower index) comes first
inline std::vector<std::size_t> brute_force_mark(const std::vector<double>& eta, double theta) {
    const std::size_t n = eta.size();
    const double total = std::accumulate(eta.begin(), eta.end(), 0.0);
    // rank: position in the descending order with index tie-break
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eta[a] > eta[b]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order[k]] = k;

    std::size_t best_size = n + 1;
    std::uint32_t best = 0;
    std::size_t best_key = 0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        double s = 0.0;
        std::size_t size = 0, key = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                s += eta[i];
                ++size;
                key += std::size_t{1} << (n - 1 - rank[i]);
            }
        if (s < theta * total) continue;
        if (size < best_size || (size == best_size && key > best_key)) {
            best_size = size;
            best = mask;
            best_key = key;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (best & (1u << i)) out.push_back(i);
    return out;
}

} // namespace oracle
