#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "svx/analysis.hpp"
#include "svx/confusion.hpp"

namespace svx::testing {

// Published human-perception confusion tables, rates rounded to two decimals.
// Rows are ground truth; column 0 is "unknown", then the row classes in the
// same order as the rows.
struct RateTable {
    std::vector<std::string> classes;
    std::vector<std::vector<double>> rates;
};

inline RateTable actor_table() {
    return {{"human", "animal"}, {{0.11, 0.86, 0.03}, {0.17, 0.05, 0.78}}};
}

inline RateTable action_table() {
    return {{"walking", "spinning", "running", "jumping", "eating", "climbing", "crawling", "flying"},
            {{0.11, 0.57, 0.12, 0.12, 0.00, 0.01, 0.01, 0.04, 0.00},
             {0.15, 0.06, 0.65, 0.03, 0.00, 0.00, 0.01, 0.04, 0.06},
             {0.01, 0.07, 0.07, 0.79, 0.04, 0.00, 0.00, 0.01, 0.00},
             {0.19, 0.01, 0.04, 0.09, 0.57, 0.00, 0.00, 0.01, 0.09},
             {0.19, 0.00, 0.00, 0.00, 0.00, 0.76, 0.04, 0.00, 0.01},
             {0.06, 0.01, 0.00, 0.00, 0.03, 0.00, 0.90, 0.00, 0.00},
             {0.20, 0.03, 0.00, 0.06, 0.01, 0.00, 0.01, 0.69, 0.00},
             {0.19, 0.03, 0.01, 0.00, 0.01, 0.01, 0.03, 0.03, 0.70}}};
}

/// Smallest integer row (total n <= max_n) whose rates round to `rates`.
/// Printed rows need not sum to one, so this searches rather than scales.
inline std::optional<std::vector<std::uint64_t>> integer_row(const std::vector<double>& rates, int max_n = 2000) {
    for (int n = 1; n <= max_n; ++n) {
        std::vector<std::uint64_t> lo(rates.size()), hi(rates.size());
        bool feasible = true;
        std::uint64_t sum_lo = 0, sum_hi = 0;
        for (std::size_t j = 0; j < rates.size() && feasible; ++j) {
            bool any = false;
            for (int c = 0; c <= n; ++c) {
                if (round_to(static_cast<double>(c) / n, 2) != rates[j]) continue;
                if (!any) lo[j] = c;
                hi[j] = c;
                any = true;
            }
            feasible = any;
            sum_lo += lo[j];
            sum_hi += hi[j];
        }
        if (!feasible || sum_lo > static_cast<std::uint64_t>(n) || sum_hi < static_cast<std::uint64_t>(n)) continue;
        std::vector<std::uint64_t> counts = lo;
        std::uint64_t missing = n - sum_lo;
        for (std::size_t j = 0; j < counts.size() && missing > 0; ++j) {
            const std::uint64_t add = std::min(missing, hi[j] - lo[j]);
            counts[j] += add;
            missing -= add;
        }
        return counts;
    }
    return std::nullopt;
}

}  // namespace svx::testing
