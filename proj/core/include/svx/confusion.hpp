#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace svx {

/// Counts with ground truth on rows and responses/predictions on columns.
struct ConfusionMatrix {
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    std::vector<std::vector<std::uint64_t>> counts;

    ConfusionMatrix() = default;
    ConfusionMatrix(std::vector<std::string> row_names, std::vector<std::string> column_names);

    void add(std::size_t row, std::size_t column, std::uint64_t n = 1) { counts[row][column] += n; }
    std::uint64_t row_total(std::size_t row) const;
    std::uint64_t total() const;
    /// Row-normalized rates at full precision; rows with no samples stay zero.
    std::vector<std::vector<double>> rates() const;
};

/// Half-away-from-zero rounding to `decimals` places, for report display.
double round_to(double value, int decimals);

}  // namespace svx
