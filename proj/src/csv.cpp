#include "sepfx/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "sepfx/scenario.hpp"

namespace sepfx::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

bool parse_int(const std::string& s, int& out) {
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

CsvLoad read_dataset_csv(std::istream& in) {
    CsvLoad load;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "", "missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto& data = load.data;
    data.columns = split(line);
    for (const char* required : {"A", "D", "Y"})
        if (!data.has_column(required)) throw ParseError(1, "", std::string("header lacks column ") + required);
    const auto d_col = data.column("D"), y_col = data.column("Y");

    std::vector<int> row(data.columns.size());
    for (std::size_t number = 2; std::getline(in, line); ++number) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != data.columns.size()) {
            load.rejected.push_back({number, "expected " + std::to_string(data.columns.size()) + " fields, got " +
                                                 std::to_string(fields.size())});
            continue;
        }
        std::string reason;
        for (std::size_t c = 0; c < fields.size() && reason.empty(); ++c) {
            if (c == y_col && fields[c].empty()) {
                row[c] = kUndefined;
            } else if (!parse_int(fields[c], row[c])) {
                reason = "column " + data.columns[c] + ": '" + fields[c] + "' is not an integer";
            }
        }
        if (reason.empty() && row[y_col] == kUndefined && row[d_col] != 1) reason = "Y blank with D=" + fields[d_col];
        if (!reason.empty()) {
            load.rejected.push_back({number, reason});
            continue;
        }
        data.cells.insert(data.cells.end(), row.begin(), row.end());
        ++data.n;
    }
    return load;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
    for (std::size_t c = 0; c < data.columns.size(); ++c) out << (c ? "," : "") << csv_field(data.columns[c]);
    out << '\n';
    std::string line;
    for (std::size_t i = 0; i < data.n; ++i) {
        line.clear();
        for (std::size_t c = 0; c < data.columns.size(); ++c) {
            if (c) line += ',';
            const int v = data.cell(i, c);
            if (v != kUndefined) line += std::to_string(v);
        }
        line += '\n';
        out << line;
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace sepfx::cli
