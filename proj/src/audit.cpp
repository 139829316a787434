#include "sepfx/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace sepfx::audit {

const char* to_string(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::inconclusive: return "inconclusive";
    }
    return "?";
}

std::string Witness::describe() const {
    std::string out;
    for (const auto& [name, code] : values) {
        if (!out.empty()) out += ", ";
        out += name + "=" + std::to_string(code);
    }
    if (!detail.empty()) out += (out.empty() ? "" : ": ") + detail;
    char buf[48];
    std::snprintf(buf, sizeof buf, " (residual %.6g)", residual);
    return out + buf;
}

namespace {

constexpr std::size_t kMaxWitnesses = 8;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// Collects witnesses and settles the status once all pieces are in.
class Collector {
public:
    explicit Collector(std::string name, const AuditOptions& options) : options_(options) {
        result_.name = std::move(name);
    }

    void residual(double r) { result_.residual = std::max(result_.residual, r); }
    void violation(Witness w) {
        violations_ = true;
        witnesses_.push_back(std::move(w));
    }
    void inconclusive(const std::string& why) {
        undecided_ = true;
        result_.notes.push_back(why);
    }
    void note(const std::string& text) { result_.notes.push_back(text); }

    // Residual checks fail on any witness above tolerance; event checks fail on any witness.
    CheckResult finish(bool residual_based) {
        std::stable_sort(witnesses_.begin(), witnesses_.end(),
                         [](const Witness& a, const Witness& b) { return a.residual > b.residual; });
        bool failed = violations_;
        if (residual_based) {
            witnesses_.erase(std::remove_if(witnesses_.begin(), witnesses_.end(),
                                            [&](const Witness& w) { return w.residual < options_.tolerance; }),
                             witnesses_.end());
            failed = !witnesses_.empty();
        }
        if (witnesses_.size() > kMaxWitnesses) {
            result_.notes.push_back(std::to_string(witnesses_.size() - kMaxWitnesses) +
                                    " further failing configurations omitted");
            witnesses_.resize(kMaxWitnesses);
        }
        result_.witnesses = std::move(witnesses_);
        result_.status = failed ? Status::fail : undecided_ ? Status::inconclusive : Status::pass;
        return result_;
    }

private:
    const AuditOptions& options_;
    CheckResult result_;
    std::vector<Witness> witnesses_;
    bool violations_ = false;
    bool undecided_ = false;
};

std::vector<std::pair<std::string, int>> noise_values(const WorldTable& t, std::size_t row) {
    std::vector<std::pair<std::string, int>> out;
    for (std::size_t c = 0; c < t.cols(); ++c)
        if (t.columns()[c].world < 0) out.emplace_back(t.columns()[c].name, t.cell(row, c));
    return out;
}

struct Roles {
    std::string a, a_d, a_y, d_a, d, y, u, l;
};

Roles roles_of(const StructuralModel& m, bool need_components, bool need_d_a, bool need_u) {
    Roles r;
    r.a = m.role_variable(role::A);
    r.d = m.role_variable(role::D);
    r.y = m.role_variable(role::Y);
    if (need_components) {
        r.a_d = m.role_variable(role::A_D);
        r.a_y = m.role_variable(role::A_Y);
    }
    if (need_d_a) r.d_a = m.role_variable(role::D_A);
    if (need_u) r.u = m.role_variable(role::U);
    return r;
}

// Two arms indexed by treatment code: world 0 is {A=0}, world 1 is {A=1}.
WorldTable arms(const StructuralModel& m, const std::string& a, const AuditOptions& options) {
    return counterfactual_joint(m, {set(a, 0), set(a, 1)}, options.enumeration);
}

// --- table sensitivity ------------------------------------------------------

struct Sensitivity {
    std::string parent;
    std::vector<std::pair<std::string, int>> row;
    int from_value, to_value, from_out, to_out;
};

std::vector<Sensitivity> effective_parents(const StructuralModel& m, const Mechanism& mech) {
    const std::size_t k = mech.parents.size();
    std::vector<const FiniteVariable*> vars;
    for (const auto& p : mech.parents) vars.push_back(&m.variable(p));
    std::vector<std::size_t> stride(k, 1);
    for (std::size_t i = k; i-- > 1;) stride[i - 1] = stride[i] * vars[i]->support.size();

    std::vector<Sensitivity> out;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t size = vars[i]->support.size();
        bool found = false;
        for (std::size_t r = 0; r < mech.table.size() && !found; ++r) {
            const std::size_t digit = (r / stride[i]) % size;
            for (std::size_t alt = digit + 1; alt < size && !found; ++alt) {
                const std::size_t r2 = r + (alt - digit) * stride[i];
                if (mech.table[r] == mech.table[r2]) continue;
                Sensitivity s;
                s.parent = mech.parents[i];
                for (std::size_t j = 0; j < k; ++j)
                    s.row.emplace_back(mech.parents[j], vars[j]->support[(r / stride[j]) % vars[j]->support.size()]);
                s.from_value = vars[i]->support[digit];
                s.to_value = vars[i]->support[alt];
                s.from_out = mech.table[r];
                s.to_out = mech.table[r2];
                out.push_back(std::move(s));
                found = true;
            }
        }
    }
    return out;
}

}  // namespace

// --- structure --------------------------------------------------------------

CheckResult audit_structure(const StructuralModel& model, StructureForm form, const AuditOptions& options) {
    Collector c("structure", options);
    const bool with_l = form == StructureForm::with_l;
    c.note(with_l ? "form: measured L" : "form: two-component trial");
    if (with_l) model.role_variable(role::L);

    std::map<std::string, std::string> role_of;
    for (const auto& [r, v] : model.roles) role_of[v] = r;
    auto is_noise = [&](const std::string& v) {
        const auto* var = model.find_variable(v);
        return var && var->kind == VariableKind::exogenous && role_of[v] != role::U;
    };

    std::map<std::string, std::set<std::string>> allowed{
        {role::A, {}},
        {role::A_D, {role::A}},
        {role::A_Y, {role::A}},
        {role::D_A, {role::A_D}},
        {role::D, {role::D_A, role::U}},
        {role::Y, {role::A_Y, role::D, role::U}},
        {role::U, {}},
        {role::M, {role::A, role::D}},
    };
    if (with_l) {
        allowed[role::L] = {role::A_D};
        for (const char* r : {role::D_A, role::D, role::Y}) allowed[r].insert(role::L);
    }

    std::map<std::string, std::vector<std::string>> noise_users;
    double offending = 0.0;
    for (const auto& mech : model.mechanisms) {
        const auto it_role = role_of.find(mech.target);
        const auto it_allowed = it_role == role_of.end() ? allowed.end() : allowed.find(it_role->second);
        if (it_allowed == allowed.end()) {
            Witness w;
            w.residual = 1.0;
            w.detail = "endogenous " + mech.target + " has no place in the graph";
            c.violation(std::move(w));
            offending += 1.0;
            continue;
        }
        for (auto& s : effective_parents(model, mech)) {
            if (is_noise(s.parent)) {
                noise_users[s.parent].push_back(mech.target);
                continue;
            }
            const auto pr = role_of.find(s.parent);
            if (pr != role_of.end() && it_allowed->second.count(pr->second)) continue;
            Witness w;
            w.values = std::move(s.row);
            w.residual = 1.0;
            w.detail = "edge " + s.parent + " -> " + mech.target + ": " + mech.target + " moves from " +
                       std::to_string(s.from_out) + " to " + std::to_string(s.to_out) + " when " + s.parent +
                       " moves from " + std::to_string(s.from_value) + " to " + std::to_string(s.to_value);
            c.violation(std::move(w));
            offending += 1.0;
        }
    }
    for (const auto& [noise, users] : noise_users) {
        if (users.size() < 2) continue;
        Witness w;
        w.residual = 1.0;
        w.detail = "noise " + noise + " is shared by";
        for (const auto& u : users) w.detail += " " + u;
        c.violation(std::move(w));
        offending += 1.0;
    }
    c.residual(offending);
    return c.finish(false);
}

// --- determinism ----------------------------------------------------------

CheckResult audit_determinism(const StructuralModel& model, const AuditOptions& options) {
    const auto r = roles_of(model, false, true, false);
    Collector c("determinism", options);
    const auto t = arms(model, r.a, options);
    double mass = 0.0;
    for (int a : {0, 1}) {
        const auto da = t.column(r.d_a, a), d = t.column(r.d, a);
        for (std::size_t row = 0; row < t.rows(); ++row) {
            if (t.cell(row, da) != 1 || t.cell(row, d) != 0) continue;
            Witness w;
            w.values = noise_values(t, row);
            w.values.emplace_back("a'", a);
            w.values.emplace_back(t.columns()[da].name, 1);
            w.values.emplace_back(t.columns()[d].name, 0);
            w.residual = t.probability(row);
            w.detail = r.d_a + "=1 but " + r.d + "=0";
            mass += w.residual;
            c.violation(std::move(w));
        }
    }
    c.residual(mass);
    return c.finish(false);
}

// --- positivity -----------------------------------------------------------

CheckResult audit_positivity(const ObservedLaw& law, bool with_l, const AuditOptions& options) {
    Collector c(with_l ? "positivity_l" : "positivity", options);
    if (with_l && !law.has_l()) throw Error(ErrorCode::missing_role, "missing role 'L' in observed law");

    std::vector<Event> strata;
    if (!with_l) {
        for (int a : {1, 0}) strata.push_back(Event{{role::A, a}, {role::D, 0}});
    } else {
        std::set<int> ls;
        const auto col = law.column_index(role::L);
        for (std::size_t i = 0; i < law.rows(); ++i) ls.insert(law.cell(i, col));
        for (int l : ls) {
            if (event_probability(law, Event{{role::D, 0}, {role::L, l}}) <= 0.0) {
                c.note("stratum L=" + std::to_string(l) + " has P(D=0, L=l) = 0 and is not required");
                continue;
            }
            for (int a : {1, 0}) strata.push_back(Event{{role::L, l}, {role::A, a}, {role::D, 0}});
        }
    }

    double smallest = 1.0;
    for (const auto& s : strata) {
        const double p = event_probability(law, s);
        smallest = std::min(smallest, p);
        if (p <= 0.0) {
            Witness w;
            for (const auto& lit : s.literals()) w.values.emplace_back(lit.column, lit.code);
            w.residual = 0.0;
            w.detail = "empty stratum";
            c.violation(std::move(w));
        } else if (p < options.positivity_warning) {
            c.note("warning: P(" + s.to_string() + ") = " + fmt(p) + " below " + fmt(options.positivity_warning));
        }
    }
    auto result = c.finish(false);
    result.residual = strata.empty() ? 0.0 : smallest;
    return result;
}

CheckResult audit_positivity(const StructuralModel& model, bool with_l, const AuditOptions& options) {
    if (with_l) model.role_variable(role::L);
    return audit_positivity(observed_law(model, options.enumeration), with_l, options);
}

// --- multiplicative survival ------------------------------------------------

CheckResult audit_multiplicative_survival(const StructuralModel& model, const AuditOptions& options) {
    const auto r = roles_of(model, false, true, true);
    Collector c("multiplicative_survival", options);
    // World 0 factual, world 1 {A=0}, world 2 {A=1}.
    const auto t = counterfactual_joint(model, {Intervention{}, set(r.a, 0), set(r.a, 1)}, options.enumeration);
    const std::string u_col = t.column_name(r.u, 0), da = t.column_name(r.d_a, 0), d = t.column_name(r.d, 0),
                      a = t.column_name(r.a, 0);

    for (int u : model.variable(r.u).support) {
        const double p_u = event_probability(t, Event{{u_col, u}});
        const double p_u_da0 = event_probability(t, Event{{u_col, u}, {da, 0}});
        if (p_u <= 0.0 || p_u_da0 <= 0.0) {
            c.inconclusive("empty conditioning stratum U=" + std::to_string(u) + (p_u <= 0.0 ? "" : ", D_A=0"));
            continue;
        }
        const double survive_u = event_probability(t, Event{{u_col, u}, {da, 0}, {d, 0}}) / p_u_da0;
        for (int ap : {0, 1}) {
            const double p_a = event_probability(t, Event{{a, ap}});
            if (p_a <= 0.0) {
                c.inconclusive("empty conditioning stratum A=" + std::to_string(ap));
                continue;
            }
            const double survive_a = event_probability(t, Event{{a, ap}, {da, 0}}) / p_a;
            const std::string d_cf = t.column_name(r.d, static_cast<std::size_t>(ap) + 1);
            const double lhs = event_probability(t, Event{{d_cf, 0}, {u_col, u}}) / p_u;
            const double residual = std::abs(lhs - survive_u * survive_a);
            c.residual(residual);
            Witness w;
            w.values = {{r.u, u}, {"a'", ap}};
            w.residual = residual;
            w.detail = "P(" + d_cf + "=0 | U) = " + fmt(lhs) + " vs " + fmt(survive_u) + " * " + fmt(survive_a);
            c.violation(std::move(w));
        }
    }
    return c.finish(true);
}

// --- posterior invariance ---------------------------------------------------

CheckResult audit_posterior_invariance(const StructuralModel& model, const AuditOptions& options) {
    const auto r = roles_of(model, false, false, true);
    Collector c("posterior_invariance", options);
    const auto t = arms(model, r.a, options);
    const std::string u_col = t.column_name(r.u, 0), d0 = t.column_name(r.d, 0), d1 = t.column_name(r.d, 1);
    const double p0 = event_probability(t, Event{{d0, 0}});
    const double p1 = event_probability(t, Event{{d1, 0}});
    if (p0 <= 0.0 || p1 <= 0.0) {
        c.inconclusive("empty conditioning event " + std::string(p0 <= 0.0 ? d0 : d1) + "=0");
        return c.finish(true);
    }
    for (int u : model.variable(r.u).support) {
        const double post0 = event_probability(t, Event{{u_col, u}, {d0, 0}}) / p0;
        const double post1 = event_probability(t, Event{{u_col, u}, {d1, 0}}) / p1;
        const double residual = std::abs(post0 - post1);
        c.residual(residual);
        Witness w;
        w.values = {{r.u, u}};
        w.residual = residual;
        w.detail = "P(U=u | " + d0 + "=0) = " + fmt(post0) + " vs P(U=u | " + d1 + "=0) = " + fmt(post1);
        c.violation(std::move(w));
    }
    return c.finish(true);
}

// --- monotonicity -----------------------------------------------------------

CheckResult audit_event_equivalence(const StructuralModel& model, const AuditOptions& options) {
    const auto r = roles_of(model, false, false, false);
    Collector c("event_equivalence", options);
    const auto t = arms(model, r.a, options);
    const auto d0 = t.column(r.d, 0), d1 = t.column(r.d, 1);
    double mass = 0.0;
    for (std::size_t row = 0; row < t.rows(); ++row) {
        const bool both = t.cell(row, d0) == 0 && t.cell(row, d1) == 0;
        const bool treated = t.cell(row, d1) == 0;
        if (both == treated) continue;
        Witness w;
        w.values = noise_values(t, row);
        w.values.emplace_back(t.columns()[d1].name, t.cell(row, d1));
        w.values.emplace_back(t.columns()[d0].name, t.cell(row, d0));
        w.residual = t.probability(row);
        w.detail = "event-free under treatment only";
        mass += w.residual;
        c.violation(std::move(w));
    }
    c.residual(mass);
    return c.finish(false);
}

CheckResult audit_monotonicity(const StructuralModel& model, const AuditOptions& options) {
    const auto r = roles_of(model, false, true, false);
    Collector c("monotonicity", options);
    const auto t = arms(model, r.a, options);
    const auto da0 = t.column(r.d_a, 0), da1 = t.column(r.d_a, 1);
    double mass = 0.0;
    for (std::size_t row = 0; row < t.rows(); ++row) {
        if (t.cell(row, da1) != 0 || t.cell(row, da0) != 1) continue;
        Witness w;
        w.values = noise_values(t, row);
        w.values.emplace_back(t.columns()[da1].name, 0);
        w.values.emplace_back(t.columns()[da0].name, 1);
        w.residual = t.probability(row);
        w.detail = "event component fires under control only";
        mass += w.residual;
        c.violation(std::move(w));
    }
    c.residual(mass);
    const auto eq = audit_event_equivalence(model, options);
    c.note(std::string("event equivalence {D^{a=0}=0, D^{a=1}=0} = {D^{a=1}=0}: ") + to_string(eq.status));
    return c.finish(false);
}

// --- cross-world independence -----------------------------------------------

CheckResult audit_crossworld(const StructuralModel& model, const AuditOptions& options) {
    const auto r = roles_of(model, false, false, true);
    Collector c("crossworld", options);
    const auto t = arms(model, r.a, options);
    const std::string u_col = t.column_name(r.u, 0), d0 = t.column_name(r.d, 0), d1 = t.column_name(r.d, 1),
                      y0 = t.column_name(r.y, 0);
    bool any_stratum = false;
    for (int u : model.variable(r.u).support) {
        const Event cond{{d0, 0}, {u_col, u}};
        const double p_c = event_probability(t, cond);
        if (p_c <= 0.0) {
            c.note("empty conditioning stratum " + d0 + "=0, U=" + std::to_string(u));
            continue;
        }
        any_stratum = true;
        for (int y : model.variable(r.y).support) {
            const double p_y = event_probability(t, Event{{y0, y}} && cond) / p_c;
            for (int d : {0, 1}) {
                const double p_d = event_probability(t, Event{{d1, d}} && cond) / p_c;
                const double joint = event_probability(t, Event{{y0, y}, {d1, d}} && cond) / p_c;
                const double residual = std::abs(joint - p_y * p_d);
                c.residual(residual);
                Witness w;
                w.values = {{r.u, u}, {y0, y}, {d1, d}};
                w.residual = residual;
                w.detail = "joint " + fmt(joint) + " vs product " + fmt(p_y * p_d);
                c.violation(std::move(w));
            }
        }
    }
    if (!any_stratum) c.inconclusive("every conditioning stratum is empty");
    return c.finish(true);
}

// --- decomposition ----------------------------------------------------------

CheckResult audit_decomposition(const StructuralModel& model, const AuditOptions& options) {
    const bool has_da = model.has_role(role::D_A);
    const auto r = roles_of(model, true, has_da, false);
    Collector c("decomposition", options);
    double mass = 0.0;

    {  // (i) components equal the treatment in the observed world
        const auto t = counterfactual_joint(model, {}, options.enumeration);
        const auto a = t.column(r.a, 0), ad = t.column(r.a_d, 0), ay = t.column(r.a_y, 0);
        for (std::size_t row = 0; row < t.rows(); ++row) {
            if (t.cell(row, a) == t.cell(row, ad) && t.cell(row, a) == t.cell(row, ay)) continue;
            Witness w;
            w.values = noise_values(t, row);
            w.values.emplace_back(r.a, t.cell(row, a));
            w.values.emplace_back(r.a_d, t.cell(row, ad));
            w.values.emplace_back(r.a_y, t.cell(row, ay));
            w.residual = t.probability(row);
            w.detail = "condition (i): components differ from treatment";
            mass += w.residual;
            c.violation(std::move(w));
        }
    }

    // Per a': world 3a' is {A=a'}, 3a'+1 is {A_D=a', A_Y=0}, 3a'+2 is {A_D=a', A_Y=1}.
    std::vector<Intervention> worlds;
    for (int ap : {0, 1}) {
        worlds.push_back(set(r.a, ap));
        for (int ay : {0, 1}) worlds.push_back(Intervention{{{r.a_d, ap}, {r.a_y, ay}}});
    }
    const auto t = counterfactual_joint(model, worlds, options.enumeration);
    std::vector<std::string> compared;
    if (has_da) compared.push_back(r.d_a);
    compared.push_back(r.d);
    compared.push_back(r.y);

    auto compare = [&](std::size_t w1, std::size_t w2, const std::string& var, const std::string& condition) {
        const auto c1 = t.column(var, w1), c2 = t.column(var, w2);
        for (std::size_t row = 0; row < t.rows(); ++row) {
            if (t.cell(row, c1) == t.cell(row, c2)) continue;
            Witness w;
            w.values = noise_values(t, row);
            w.values.emplace_back(t.columns()[c1].name, t.cell(row, c1));
            w.values.emplace_back(t.columns()[c2].name, t.cell(row, c2));
            w.residual = t.probability(row);
            w.detail = condition + ": " + var + " differs";
            mass += w.residual;
            c.violation(std::move(w));
        }
    };
    for (int ap : {0, 1}) {
        const std::size_t base = 3 * static_cast<std::size_t>(ap);
        for (const auto& var : compared) compare(base, base + 1 + ap, var, "condition (ii)");
        for (std::size_t i = 0; i + 1 < compared.size(); ++i)
            compare(base + 1, base + 2, compared[i], "condition (iii)");
    }
    c.residual(mass);
    return c.finish(false);
}

// --- report -----------------------------------------------------------------

const CheckResult* AuditReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

bool AuditReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

bool AuditReport::any_failed() const {
    return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == Status::fail; });
}

std::vector<std::string> AuditReport::failed_or_inconclusive(const std::vector<std::string>& names) const {
    std::vector<std::string> out;
    for (const auto& n : names) {
        const auto* c = find(n);
        if (!c || !c->passed()) out.push_back(n);
    }
    return out;
}

AuditReport run_all(const StructuralModel& model, const AuditOptions& options) {
    AuditReport report;
    const bool with_l = model.has_role(role::L);
    report.form = with_l ? StructureForm::with_l : StructureForm::fig4;

    auto guarded = [&](const std::string& name, auto&& fn) {
        try {
            report.checks.push_back(fn());
        } catch (const Error& e) {
            if (e.code() != ErrorCode::missing_role && e.code() != ErrorCode::positivity) throw;
            CheckResult r;
            r.name = name;
            r.status = Status::inconclusive;
            r.notes.push_back(e.what());
            report.checks.push_back(std::move(r));
        }
    };
    guarded("structure", [&] { return audit_structure(model, report.form, options); });
    guarded("determinism", [&] { return audit_determinism(model, options); });
    guarded("positivity", [&] { return audit_positivity(model, false, options); });
    if (with_l) guarded("positivity_l", [&] { return audit_positivity(model, true, options); });
    guarded("decomposition", [&] { return audit_decomposition(model, options); });
    guarded("multiplicative_survival", [&] { return audit_multiplicative_survival(model, options); });
    guarded("posterior_invariance", [&] { return audit_posterior_invariance(model, options); });
    guarded("monotonicity", [&] { return audit_monotonicity(model, options); });
    guarded("event_equivalence", [&] { return audit_event_equivalence(model, options); });
    guarded("crossworld", [&] { return audit_crossworld(model, options); });
    return report;
}

// --- gating -------------------------------------------------------------

namespace {

std::string failure_label(const std::vector<std::string>& failed) {
    std::string out = "no causal interpretation; audits failed: ";
    for (std::size_t i = 0; i < failed.size(); ++i) out += (i ? ", " : "") + failed[i];
    return out;
}

}  // namespace

Gate gate_prop1(const AuditReport& report) {
    Gate g;
    g.failed = report.failed_or_inconclusive({"structure", "positivity", "determinism", "decomposition",
                                              "multiplicative_survival", "posterior_invariance"});
    if (report.form != StructureForm::fig4 && std::find(g.failed.begin(), g.failed.end(), "structure") == g.failed.end())
        g.failed.insert(g.failed.begin(), "structure");
    if (!g.failed.empty()) {
        g.label = failure_label(g.failed);
        return g;
    }
    g.cse = true;
    g.sace = report.failed_or_inconclusive({"monotonicity", "crossworld"}).empty();
    g.label = g.sace ? "CSE(0)=CSE(1); SACE" : "CSE(0)=CSE(1)";
    return g;
}

Gate gate_prop3(const AuditReport& report) {
    Gate g;
    if (report.form != StructureForm::with_l) {
        g.failed = {"structure"};
        g.label = failure_label(g.failed);
        return g;
    }
    g.failed = report.failed_or_inconclusive({"structure", "positivity_l", "determinism", "decomposition"});
    if (!g.failed.empty()) {
        g.label = failure_label(g.failed);
        return g;
    }
    g.cse = true;
    g.label = "CSE(a')";
    return g;
}

Gate gate_descriptive() {
    Gate g;
    g.label = "descriptive contrast; no causal interpretation";
    return g;
}

// --- response types ---------------------------------------------------------

ResponseTypeTable classify_response_types(const StructuralModel& model, const EnumerationOptions& options) {
    const auto& a = model.role_variable(role::A);
    const auto& d = model.role_variable(role::D);
    if (!model.variable(d).is_binary()) throw Error(ErrorCode::invalid_model, "role D must be binary");
    const bool has_da = model.has_role(role::D_A);
    const auto t = counterfactual_joint(model, {set(a, 1), set(a, 0)}, options);
    const auto d1 = t.column(d, 0), d0 = t.column(d, 1);
    std::size_t da1 = 0, da0 = 0;
    if (has_da) {
        da1 = t.column(model.role_variable(role::D_A), 0);
        da0 = t.column(model.role_variable(role::D_A), 1);
    }

    std::map<std::array<int, 6>, double> joint;
    ResponseTypeTable out;
    for (std::size_t row = 0; row < t.rows(); ++row) {
        const int m1 = 1 - t.cell(row, d1);
        const int m0 = t.cell(row, d0);
        const double p = t.probability(row);
        std::array<int, 6> key{has_da ? t.cell(row, da1) : -1, has_da ? t.cell(row, da0) : -1,
                               t.cell(row, d1), t.cell(row, d0), m1, m0};
        joint[key] += p;
        if (m1 == 1 && m0 == 0) out.compliers += p;
        else if (m1 == 0 && m0 == 1) out.defiers += p;
        else if (m1 == 0 && m0 == 0) out.never_takers += p;
        else out.always_takers += p;
    }
    for (const auto& [values, p] : joint) out.joint.push_back({values, p});
    return out;
}

std::vector<ResponsePattern> inadmissible_patterns(const ResponseTypeTable& table) {
    static const std::set<std::array<int, 6>> admissible{
        {0, 0, 0, 0, 1, 0}, {0, 0, 1, 1, 0, 1}, {1, 0, 1, 0, 0, 0}, {1, 0, 1, 1, 0, 1},
        {0, 1, 0, 1, 1, 1}, {0, 1, 1, 1, 0, 1}, {1, 1, 1, 1, 0, 1},
    };
    std::vector<ResponsePattern> out;
    for (const auto& p : table.joint) {
        if (p.values[0] < 0) throw Error(ErrorCode::missing_role, "missing role 'D_A' for response patterns");
        if (p.probability > 0.0 && !admissible.count(p.values)) out.push_back(p);
    }
    return out;
}

}  // namespace sepfx::audit
