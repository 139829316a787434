#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sepfx/audit.hpp"
#include "sepfx/estimands.hpp"
#include "sepfx/identification.hpp"
#include "sepfx/sampling.hpp"
#include "sepfx/scenario.hpp"

namespace sepfx::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
    uint64_t seed = 1;
    std::optional<std::size_t> n;  // sample and estimate when set
    audit::AuditOptions audit;
};

struct IdentifyRow {
    std::string functional;
    std::optional<double> value;  // nullopt when not computable
    std::string interpretation;
    std::string note;
};

struct EstimateRow {
    std::string functional;
    std::optional<identification::PlugInEstimate> estimate;
    std::string note;  // error text when the estimate failed
};

struct ObservedMoments {
    double d0_a1 = 0.0;  // P(D=0|A=1)
    double d0_a0 = 0.0;
    std::optional<double> y_a1;  // E(Y|A=1); nullopt under truncation
    std::optional<double> y_a0;
};

struct Provenance {
    std::string scenario_hash;
    std::optional<uint64_t> seed;
    std::optional<std::size_t> n;
    std::string version = kToolVersion;
    double tolerance = 1e-9;
};

struct ReportBundle {
    std::string scenario_name;
    audit::AuditReport audit;
    estimands::EstimandReport truth;
    std::string truth_error;  // set when the estimands could not be computed
    ObservedMoments moments;
    std::optional<std::array<double, 4>> calibration_residuals;
    std::vector<IdentifyRow> identify;
    std::optional<Dataset> sample;
    std::vector<EstimateRow> estimates;
    Provenance provenance;

    bool estimate_failed() const;
};

ObservedMoments observed_moments(const ObservedLaw& law);
std::vector<IdentifyRow> identify_rows(const StructuralModel& model, const audit::AuditReport& audit);
std::vector<EstimateRow> estimate_rows(const Dataset& data, bool with_l);

ReportBundle build_report(const Scenario& scenario, const RunOptions& options);

std::string audit_csv(const audit::AuditReport& report);
std::string truth_csv(const ReportBundle& bundle);
std::string identify_csv(const std::vector<IdentifyRow>& rows);
std::string estimates_csv(const std::vector<EstimateRow>& rows);
std::string provenance_csv(const Provenance& p);
std::string summary_text(const ReportBundle& bundle);

/// summary.txt, audit.csv, truth.csv, identify.csv, provenance.csv and, with a
/// sample, sample.csv and estimates.csv.
void write_report(const ReportBundle& bundle, const std::filesystem::path& dir);

}  // namespace sepfx::cli
