// sepfx: batch interface over the separable-effects engine.
//
// Exit codes: 0 ok, 1 parse error, 2 audit failure (--strict) or empty
// stratum, 3 calibration mismatch.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sepfx/audit.hpp"
#include "sepfx/csv.hpp"
#include "sepfx/report.hpp"
#include "sepfx/scenario.hpp"

using namespace sepfx;
using namespace sepfx::cli;

namespace {

enum Exit { kOk = 0, kParse = 1, kStratum = 2, kCalibration = 3 };

struct Globals {
    uint64_t seed = 1;
    std::size_t n = 0;
    std::string out;
    bool strict = false;
    double tolerance = 1e-9;
};

RunOptions run_options(const Globals& g) {
    RunOptions o;
    o.seed = g.seed;
    if (g.n > 0) o.n = g.n;
    o.audit.tolerance = g.tolerance;
    return o;
}

void emit(const Globals& g, const std::string& file, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(g.out);
    std::ofstream(std::filesystem::path(g.out) / file, std::ios::binary) << text;
}

// Loads a scenario and enforces its calibration block; returns an exit code on failure.
int load(const std::string& path, Scenario& s) {
    s = load_scenario(path);
    if (const auto r = calibration_residuals(s)) {
        static const char* names[] = {"P(D=0|A=1)", "P(D=0|A=0)", "P(Y=1|A=1)", "P(Y=1|A=0)"};
        double worst = 0.0;
        for (double x : *r) worst = std::max(worst, std::abs(x));
        if (worst > s.calibration->tolerance) {
            std::cerr << "calibration mismatch (tolerance " << format_double(s.calibration->tolerance) << ")\n";
            for (std::size_t i = 0; i < 4; ++i)
                std::cerr << "  residual " << names[i] << " = " << format_double((*r)[i]) << '\n';
            return kCalibration;
        }
    }
    return kOk;
}

void print_checks(const audit::AuditReport& report) {
    for (const auto& c : report.checks) {
        std::printf("%-24s %-12s residual %s\n", c.name.c_str(), audit::to_string(c.status),
                    format_double(c.residual).c_str());
        for (const auto& w : c.witnesses) std::printf("    witness %s\n", w.describe().c_str());
        for (const auto& n : c.notes) std::printf("    note %s\n", n.c_str());
    }
}

int cmd_check(const Globals& g, const std::string& path) {
    Scenario s;
    if (int rc = load(path, s)) return rc;
    audit::AuditOptions options;
    options.tolerance = g.tolerance;
    const auto report = audit::run_all(s.model, options);
    print_checks(report);
    if (!g.out.empty()) emit(g, "audit.csv", audit_csv(report));
    if (report.any_failed()) {
        std::printf("failed:");
        for (const auto& c : report.checks)
            if (c.status == audit::Status::fail) std::printf(" %s", c.name.c_str());
        std::printf("\n");
        if (g.strict) return kStratum;
        std::fprintf(stderr, "warning: some audits failed (use --strict to make this an error)\n");
    }
    return kOk;
}

int cmd_truth(const Globals& g, const std::string& path) {
    Scenario s;
    if (int rc = load(path, s)) return rc;
    ReportBundle b;
    b.scenario_name = s.name;
    b.truth = estimands::compute_report(s.model);
    b.moments = observed_moments(observed_law(s.model));
    b.calibration_residuals = calibration_residuals(s);
    emit(g, "truth.csv", truth_csv(b));
    return kOk;
}

int cmd_identify(const Globals& g, const std::string& path) {
    Scenario s;
    if (int rc = load(path, s)) return rc;
    audit::AuditOptions options;
    options.tolerance = g.tolerance;
    const auto rows = identify_rows(s.model, audit::run_all(s.model, options));
    emit(g, "identify.csv", identify_csv(rows));
    for (const auto& r : rows)
        if ((r.functional == "prop1" || r.functional.rfind("prop3", 0) == 0) && !r.value) return kStratum;
    return kOk;
}

int cmd_sample(const Globals& g, const std::string& path) {
    Scenario s;
    if (int rc = load(path, s)) return rc;
    if (g.n == 0) throw CLI::ValidationError("--n", "sample needs --n >= 1");
    std::ostringstream text;
    write_dataset_csv(sample_dataset(s.model, g.n, g.seed), text);
    emit(g, "sample.csv", text.str());
    return kOk;
}

int cmd_estimate(const Globals& g, const std::string& path, const std::string& functional,
                 const std::string& strata_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "", "cannot open " + path);
    auto load = read_dataset_csv(in);
    for (const auto& r : load.rejected)
        std::fprintf(stderr, "rejected row at line %zu: %s\n", r.line, r.reason.c_str());

    identification::Functional f;
    if (functional == "prop1") {
        f = identification::Functional::prop1();
    } else if (functional == "prop3" || functional == "prop3:0") {
        f = identification::Functional::prop3(0);
    } else if (functional == "prop3:1") {
        f = identification::Functional::prop3(1);
    } else {
        throw CLI::ValidationError("--functional", "expected prop1, prop3, prop3:0 or prop3:1");
    }
    if (f.kind == identification::FunctionalKind::prop3 && !load.data.has_column(strata_column))
        throw ParseError(1, "", "header lacks strata column " + strata_column);

    identification::PlugInEstimate est;
    try {
        est = identification::plug_in(load.data, f, strata_column);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::empty_stratum) throw;
        std::fprintf(stderr, "%s\n", e.what());
        return kStratum;
    }
    std::ostringstream text;
    text << "functional," << f.name() << "\npoint," << format_double(est.point) << "\nstandard_error,"
         << format_double(est.standard_error) << "\nn," << est.n << "\nrejected_rows," << load.rejected.size()
         << '\n';
    for (const auto& st : est.strata)
        text << "stratum," << csv_field(st.label) << ',' << st.n << ',' << format_double(st.mean) << ','
             << format_double(st.variance) << '\n';
    emit(g, "estimate.csv", text.str());
    return kOk;
}

int cmd_report(const Globals& g, const std::string& path) {
    Scenario s;
    if (int rc = load(path, s)) return rc;
    const auto bundle = build_report(s, run_options(g));
    if (g.out.empty()) {
        std::cout << summary_text(bundle);
    } else {
        write_report(bundle, g.out);
        std::printf("wrote report to %s\n", g.out.c_str());
    }
    if (bundle.estimate_failed()) return kStratum;
    if (g.strict && bundle.audit.any_failed()) return kStratum;
    return kOk;
}

int cmd_response_types(const Globals& g, const std::string& path) {
    Scenario s;
    if (int rc = load(path, s)) return rc;
    const auto t = audit::classify_response_types(s.model);
    std::ostringstream text;
    text << "type,proportion\n"
         << "compliers," << format_double(t.compliers) << "\ndefiers," << format_double(t.defiers)
         << "\nnever_takers," << format_double(t.never_takers) << "\nalways_takers," << format_double(t.always_takers)
         << "\n\nD_A^{a=1},D_A^{a=0},D^{a=1},D^{a=0},M^{a=1},M^{a=0},probability\n";
    for (const auto& p : t.joint) {
        for (int v : p.values) text << (v < 0 ? std::string("") : std::to_string(v)) << ',';
        text << format_double(p.probability) << '\n';
    }
    if (s.model.has_role(role::D_A) && !s.model.has_role(role::L)) {
        const auto bad = audit::inadmissible_patterns(t);
        text << "\ninadmissible_patterns," << bad.size() << '\n';
    }
    emit(g, "response_types.csv", text.str());
    return kOk;
}

int cmd_export(const Globals& g, const std::string& fixture) {
    const auto names = zoo::fixture_names();
    if (std::find(names.begin(), names.end(), fixture) == names.end()) {
        std::string list;
        for (const auto& n : names) list += " " + n;
        throw CLI::ValidationError("fixture", "unknown fixture '" + fixture + "'; known:" + list);
    }
    emit(g, fixture + ".json", export_scenario(fixture_scenario(fixture)));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Separable effects engine: audits, exact estimands, identification and plug-in estimates"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Sampling seed")->capture_default_str();
    app.add_option("--n", g.n, "Sample size (report: sample when set)");
    app.add_option("--out", g.out, "Output directory");
    app.add_flag("--strict", g.strict, "Failing audits exit with code 2");
    app.add_option("--tolerance", g.tolerance, "Audit pass threshold")->capture_default_str();

    std::string path, fixture, functional = "prop1", strata_column = "L";
    auto scenario_cmd = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->add_option("scenario", path, "Scenario file")->required();
        return sub;
    };
    auto* check = scenario_cmd("check", "Run every assumption audit");
    auto* truth = scenario_cmd("truth", "Exact estimands by counterfactual enumeration");
    auto* identify = scenario_cmd("identify", "Identification functionals with audit gates");
    auto* sample = scenario_cmd("sample", "Draw --n observed rows with --seed");
    auto* report = scenario_cmd("report", "Full report bundle (files under --out)");
    auto* response = scenario_cmd("response-types", "Counterfactual adherence response types");
    auto* estimate = app.add_subcommand("estimate", "Plug-in estimate from a dataset CSV");
    estimate->fallthrough();
    estimate->add_option("data", path, "CSV with columns A,D,Y[,L]")->required();
    estimate->add_option("--functional", functional, "prop1, prop3, prop3:0 or prop3:1")->capture_default_str();
    estimate->add_option("--strata-column", strata_column, "Column standardized over by prop3")->capture_default_str();
    auto* exporter = app.add_subcommand("export-scenario", "Write a model-zoo fixture as a scenario file");
    exporter->fallthrough();
    exporter->add_option("fixture", fixture, "Fixture name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kParse;
    }

    try {
        if (*check) return cmd_check(g, path);
        if (*truth) return cmd_truth(g, path);
        if (*identify) return cmd_identify(g, path);
        if (*sample) return cmd_sample(g, path);
        if (*estimate) return cmd_estimate(g, path, functional, strata_column);
        if (*report) return cmd_report(g, path);
        if (*response) return cmd_response_types(g, path);
        if (*exporter) return cmd_export(g, fixture);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kParse;
    } catch (const zoo::CalibrationError& e) {
        std::cerr << e.what() << '\n';
        for (double r : e.residuals()) std::cerr << "  residual " << format_double(r) << '\n';
        return kCalibration;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::positivity:
            case ErrorCode::empty_stratum: return kStratum;
            case ErrorCode::calibration: return kCalibration;
            default: return kParse;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParse;
    }
    return kOk;
}
