#pragma once

// Scenario files: a JSON tree with sections variables, noise, mechanisms,
// roles, truncation and an optional calibration block. Unknown keys are
// rejected; every diagnostic names a line and a key path.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "sepfx/scm.hpp"
#include "sepfx/zoo.hpp"

namespace sepfx::cli {

struct Scenario {
    std::string name;
    std::string description;
    StructuralModel model;
    std::optional<zoo::CalibrationTarget> calibration;
};

class ParseError : public Error {
public:
    ParseError(int line, std::string path, const std::string& message)
        : Error(ErrorCode::parse, format(line, path, message)), line_(line), path_(std::move(path)) {}
    int line() const { return line_; }
    const std::string& path() const { return path_; }

private:
    static std::string format(int line, const std::string& path, const std::string& message) {
        return "line " + std::to_string(line) + (path.empty() ? "" : ", key " + path) + ": " + message;
    }
    int line_;
    std::string path_;
};

/// Parses and validates; throws ParseError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Pretty JSON with fixed key order; numeric arrays stay on one line.
std::string export_scenario(const Scenario& scenario);

/// Named model-zoo fixture wrapped as a scenario (adherence carries its targets).
Scenario fixture_scenario(const std::string& name);

/// Residuals of the calibration moments (P(D=0|A=1), P(D=0|A=0), P(Y=1|A=1),
/// P(Y=1|A=0)) against the scenario's targets; nullopt without a calibration block.
std::optional<std::array<double, 4>> calibration_residuals(const Scenario& scenario);

/// FNV-1a 64 over the exported text, as 16 hex digits.
std::string scenario_hash(const Scenario& scenario);

}  // namespace sepfx::cli
