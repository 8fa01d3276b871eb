#include "svx/confusion.hpp"

#include <cmath>
#include <numeric>

namespace svx {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> row_names,
                                 std::vector<std::string> column_names)
    : rows(std::move(row_names)),
      columns(std::move(column_names)),
      counts(rows.size(), std::vector<std::uint64_t>(columns.size(), 0)) {}

std::uint64_t ConfusionMatrix::row_total(std::size_t row) const {
    return std::accumulate(counts[row].begin(), counts[row].end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t sum = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) sum += row_total(r);
    return sum;
}

std::vector<std::vector<double>> ConfusionMatrix::rates() const {
    std::vector<std::vector<double>> out(rows.size(), std::vector<double>(columns.size(), 0.0));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::uint64_t n = row_total(r);
        if (n == 0) continue;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out[r][c] = static_cast<double>(counts[r][c]) / static_cast<double>(n);
        }
    }
    return out;
}

double round_to(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // Nudge by a few ulps so exact decimal halves like 0.125 are not lost to
    // binary representation error before rounding away from zero.
    const double scaled = value * scale;
    return std::round(scaled + std::copysign(1e-9, scaled)) / scale;
}

}  // namespace svx
