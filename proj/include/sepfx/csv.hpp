#pragma once

// Dataset CSV contract: mandatory header naming A, D and Y (plus any strata
// columns); Y is the empty string where the outcome is undefined.

#include <iosfwd>
#include <string>
#include <vector>

#include "sepfx/sampling.hpp"

namespace sepfx::cli {

struct RowRejection {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string reason;
};

struct CsvLoad {
    Dataset data;
    std::vector<RowRejection> rejected;  // rows excluded from `data`
};

/// Header problems throw ParseError; bad rows are rejected and reported.
CsvLoad read_dataset_csv(std::istream& in);
void write_dataset_csv(const Dataset& data, std::ostream& out);

/// Quotes a field when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);
/// %.17g, so printed values round-trip exactly.
std::string format_double(double x);

}  // namespace sepfx::cli
