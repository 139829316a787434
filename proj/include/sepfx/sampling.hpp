#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sepfx/scm.hpp"
#include "sepfx/table.hpp"

namespace sepfx {

/// Observed rows (A, D, Y[, L]) with Y == kUndefined for truncated outcomes.
struct Dataset {
    std::vector<std::string> columns;  // "A", "D", "Y" and optionally "L"
    std::vector<int> cells;            // row-major
    std::optional<uint64_t> seed;      // absent for externally loaded data
    std::size_t n = 0;

    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    int cell(std::size_t row, std::size_t col) const { return cells[row * columns.size() + col]; }
};

/// SplitMix64 finalizer; the per-row stream is keyed by (seed, row index).
uint64_t splitmix64(uint64_t x);

class RowStream {
public:
    RowStream(uint64_t seed, uint64_t row);
    uint64_t next();
    double uniform();  // [0, 1) with 53-bit resolution

private:
    uint64_t state_;
};

/// Seeded draws from the factual world; row i depends only on (seed, i), so
/// any partition of the row range yields identical output.
Dataset sample_dataset(const StructuralModel& model, std::size_t n, uint64_t seed);

/// Exact cell counts of a dataset in the ObservedLaw's row order, for
/// goodness-of-fit checks. Rows absent from the law go into the last slot.
std::vector<std::size_t> cell_counts(const Dataset& data, const ObservedLaw& law);

}  // namespace sepfx
