#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace svx::detail {

/// Union-find over graph nodes carrying component mass and internal difference.
class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n), mass_(n, 1), internal_(n, 0.0f), group_(n, -1) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        while (x != parent_[x]) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Joins two roots; the heavier one survives. Returns the surviving root.
    std::uint32_t unite(std::uint32_t a, std::uint32_t b) {
        if (mass_[a] < mass_[b]) std::swap(a, b);
        parent_[b] = a;
        mass_[a] += mass_[b];
        if (group_[a] < 0) group_[a] = group_[b];
        return a;
    }

    std::uint64_t& mass(std::uint32_t root) { return mass_[root]; }
    float& internal(std::uint32_t root) { return internal_[root]; }
    std::int32_t& group(std::uint32_t root) { return group_[root]; }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint64_t> mass_;
    std::vector<float> internal_;
    std::vector<std::int32_t> group_;
};

}  // namespace svx::detail
