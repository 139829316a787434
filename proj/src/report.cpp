#include "sepfx/report.hpp"

#include <fstream>
#include <sstream>

#include "sepfx/csv.hpp"

namespace sepfx::cli {

namespace {

std::string value_or_blank(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string join_notes(const std::vector<std::string>& notes) {
    std::string out;
    for (const auto& n : notes) out += (out.empty() ? "" : "; ") + n;
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
    out << text;
}

}  // namespace

bool ReportBundle::estimate_failed() const {
    for (const auto& e : estimates)
        if (!e.estimate) return true;
    return false;
}

ObservedMoments observed_moments(const ObservedLaw& law) {
    ObservedMoments m;
    const double a1 = event_probability(law, Event{{role::A, 1}});
    const double a0 = event_probability(law, Event{{role::A, 0}});
    if (a1 > 0.0) m.d0_a1 = event_probability(law, Event{{role::A, 1}, {role::D, 0}}) / a1;
    if (a0 > 0.0) m.d0_a0 = event_probability(law, Event{{role::A, 0}, {role::D, 0}}) / a0;
    if (!law.truncation()) {
        if (a1 > 0.0) m.y_a1 = conditional_mean(law, role::Y, Event{{role::A, 1}});
        if (a0 > 0.0) m.y_a0 = conditional_mean(law, role::Y, Event{{role::A, 0}});
    }
    return m;
}

std::vector<IdentifyRow> identify_rows(const StructuralModel& model, const audit::AuditReport& audit) {
    const auto law = observed_law(model);
    const auto descriptive = audit::gate_descriptive().label;
    std::vector<IdentifyRow> rows;
    auto add = [&](const std::string& name, const std::string& interpretation, auto&& compute) {
        IdentifyRow row{name, std::nullopt, interpretation, ""};
        try {
            row.value = compute();
        } catch (const Error& e) {
            row.note = e.what();
        }
        rows.push_back(std::move(row));
    };
    add("naive_d0", descriptive, [&] { return estimands::naive_contrast(law, 0); });
    if (!law.truncation()) {
        add("naive_d1", descriptive, [&] { return estimands::naive_contrast(law, 1); });
        add("marginal", descriptive, [&] { return estimands::marginal_contrast(law); });
    }
    add("prop1", audit::gate_prop1(audit).label, [&] { return identification::prop1_functional(law).value; });
    if (law.has_l()) {
        const auto gate = audit::gate_prop3(audit).label;
        for (int ap : {0, 1}) {
            const auto f = identification::Functional::prop3(ap);
            add(f.name(), gate, [&] { return identification::prop3_functional(law, ap).value; });
        }
    }
    return rows;
}

std::vector<EstimateRow> estimate_rows(const Dataset& data, bool with_l) {
    std::vector<identification::Functional> functionals{identification::Functional::prop1()};
    if (with_l)
        for (int ap : {0, 1}) functionals.push_back(identification::Functional::prop3(ap));
    std::vector<EstimateRow> rows;
    for (const auto& f : functionals) {
        EstimateRow row{f.name(), std::nullopt, ""};
        try {
            row.estimate = identification::plug_in(data, f);
        } catch (const Error& e) {
            row.note = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ReportBundle build_report(const Scenario& scenario, const RunOptions& options) {
    ReportBundle b;
    b.scenario_name = scenario.name;
    const auto& model = scenario.model;
    b.audit = audit::run_all(model, options.audit);
    try {
        b.truth = estimands::compute_report(model);
    } catch (const Error& e) {
        b.truth_error = e.what();
    }
    b.moments = observed_moments(observed_law(model, options.audit.enumeration));
    b.calibration_residuals = calibration_residuals(scenario);
    b.identify = identify_rows(model, b.audit);
    b.provenance.scenario_hash = scenario_hash(scenario);
    b.provenance.tolerance = options.audit.tolerance;
    if (options.n) {
        b.sample = sample_dataset(model, *options.n, options.seed);
        b.estimates = estimate_rows(*b.sample, model.has_role(role::L));
        b.provenance.seed = options.seed;
        b.provenance.n = options.n;
    }
    return b;
}

std::string audit_csv(const audit::AuditReport& report) {
    std::ostringstream out;
    out << "check,status,residual,witness,notes\n";
    for (const auto& c : report.checks) {
        out << c.name << ',' << audit::to_string(c.status) << ',' << format_double(c.residual) << ','
            << csv_field(c.witnesses.empty() ? "" : c.witnesses.front().describe()) << ','
            << csv_field(join_notes(c.notes)) << '\n';
    }
    return out.str();
}

std::string truth_csv(const ReportBundle& b) {
    std::ostringstream out;
    out << "quantity,value,note\n";
    auto row = [&](const std::string& q, const std::optional<double>& v, const std::string& note) {
        out << csv_field(q) << ',' << value_or_blank(v) << ',' << csv_field(note) << '\n';
    };
    const auto& t = b.truth;
    if (!b.truth_error.empty()) {
        row("cse0", std::nullopt, b.truth_error);
    } else {
        row("cse0", t.cse0, "");
        row("cse1", t.cse1, "");
        row("sace", t.sace, t.sace ? "cross-world; shared-noise coupling" : "not-computed");
        row("ate", t.ate, t.ate ? "" : "undefined-due-to-truncation");
        row("naive_d0", t.naive_d0, "");
        row("naive_d1", t.naive_d1, t.naive_d1 ? "" : "undefined-due-to-truncation");
        row("always_event_free", t.always_event_free, "P(D^{a=0}=0, D^{a=1}=0)");
    }
    const auto& m = b.moments;
    row("P(D=0|A=1)", m.d0_a1, "");
    row("P(D=0|A=0)", m.d0_a0, "");
    row("E(Y|A=1)", m.y_a1, m.y_a1 ? "" : "undefined-due-to-truncation");
    row("E(Y|A=0)", m.y_a0, m.y_a0 ? "" : "undefined-due-to-truncation");
    if (b.calibration_residuals) {
        static const char* names[] = {"residual P(D=0|A=1)", "residual P(D=0|A=0)", "residual P(Y=1|A=1)",
                                      "residual P(Y=1|A=0)"};
        for (std::size_t i = 0; i < 4; ++i) row(names[i], (*b.calibration_residuals)[i], "calibration target");
    }
    return out.str();
}

std::string identify_csv(const std::vector<IdentifyRow>& rows) {
    std::ostringstream out;
    out << "functional,value,interpretation,note\n";
    for (const auto& r : rows)
        out << csv_field(r.functional) << ',' << value_or_blank(r.value) << ',' << csv_field(r.interpretation)
            << ',' << csv_field(r.note) << '\n';
    return out.str();
}

std::string estimates_csv(const std::vector<EstimateRow>& rows) {
    std::ostringstream out;
    out << "functional,point,standard_error,seed,n,stratum,stratum_n,stratum_mean,stratum_variance,note\n";
    for (const auto& r : rows) {
        if (!r.estimate) {
            out << csv_field(r.functional) << ",,,,,,,,," << csv_field(r.note) << '\n';
            continue;
        }
        const auto& e = *r.estimate;
        const std::string head = csv_field(r.functional) + ',' + format_double(e.point) + ',' +
                                 format_double(e.standard_error) + ',' + (e.seed ? std::to_string(*e.seed) : "") +
                                 ',' + std::to_string(e.n) + ',';
        for (const auto& s : e.strata)
            out << head << csv_field(s.label) << ',' << s.n << ',' << format_double(s.mean) << ','
                << format_double(s.variance) << ",\n";
    }
    return out.str();
}

std::string provenance_csv(const Provenance& p) {
    std::ostringstream out;
    out << "key,value\n";
    out << "scenario_hash," << p.scenario_hash << '\n';
    out << "seed," << (p.seed ? std::to_string(*p.seed) : "") << '\n';
    out << "n," << (p.n ? std::to_string(*p.n) : "") << '\n';
    out << "tool_version," << p.version << '\n';
    out << "tolerance," << format_double(p.tolerance) << '\n';
    return out.str();
}

std::string summary_text(const ReportBundle& b) {
    std::ostringstream out;
    out << "scenario " << (b.scenario_name.empty() ? "(unnamed)" : b.scenario_name) << "  hash "
        << b.provenance.scenario_hash << "  sepfx " << b.provenance.version << "\n\n";
    out << "audits (pass iff residual < " << format_double(b.provenance.tolerance) << ")\n";
    for (const auto& c : b.audit.checks) {
        out << "  " << c.name << ": " << audit::to_string(c.status) << "  residual " << format_double(c.residual)
            << '\n';
        for (const auto& w : c.witnesses) out << "      witness " << w.describe() << '\n';
        for (const auto& n : c.notes) out << "      note " << n << '\n';
    }
    out << "\ntruth\n";
    if (!b.truth_error.empty()) {
        out << "  not computed: " << b.truth_error << '\n';
    } else {
        const auto& t = b.truth;
        out << "  CSE(0) = " << format_double(t.cse0) << "\n  CSE(1) = " << format_double(t.cse1) << '\n';
        out << "  SACE   = " << (t.sace ? format_double(*t.sace) : "not-computed") << '\n';
        out << "  ATE    = " << (t.ate ? format_double(*t.ate) : "undefined-due-to-truncation") << '\n';
    }
    out << "\nidentification\n";
    for (const auto& r : b.identify) {
        out << "  " << r.functional << " = " << (r.value ? format_double(*r.value) : "n/a") << "  [" << r.interpretation
            << "]";
        if (!r.note.empty()) out << "  " << r.note;
        out << '\n';
    }
    if (b.sample) {
        out << "\nplug-in estimates (n=" << b.sample->n << ", seed=" << (b.provenance.seed ? *b.provenance.seed : 0)
            << ")\n";
        for (const auto& r : b.estimates) {
            if (!r.estimate) {
                out << "  " << r.functional << ": " << r.note << '\n';
                continue;
            }
            out << "  " << r.functional << " = " << format_double(r.estimate->point) << "  se "
                << format_double(r.estimate->standard_error) << '\n';
        }
    }
    return out.str();
}

void write_report(const ReportBundle& b, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "summary.txt", summary_text(b));
    write_file(dir / "audit.csv", audit_csv(b.audit));
    write_file(dir / "truth.csv", truth_csv(b));
    write_file(dir / "identify.csv", identify_csv(b.identify));
    write_file(dir / "provenance.csv", provenance_csv(b.provenance));
    if (b.sample) {
        std::ostringstream sample;
        write_dataset_csv(*b.sample, sample);
        write_file(dir / "sample.csv", sample.str());
        write_file(dir / "estimates.csv", estimates_csv(b.estimates));
    }
}

}  // namespace sepfx::cli
