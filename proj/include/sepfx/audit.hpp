#pragma once

// Numerical audits of the assumptions behind the identification results.
// Each check enumerates the model's counterfactual tables and reports a
// worst-case residual plus the configurations that witness a failure.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepfx/scm.hpp"
#include "sepfx/table.hpp"

namespace sepfx::audit {

enum class Status { pass, fail, inconclusive };
const char* to_string(Status s);

struct Witness {
    std::vector<std::pair<std::string, int>> values;  // variable or column name -> code
    double residual = 0.0;  // size of the violation at this configuration
    std::string detail;

    std::string describe() const;  // "U=1, a'=1 (residual 0.1)"
};

struct CheckResult {
    std::string name;
    Status status = Status::inconclusive;
    double residual = 0.0;           // positivity reports the smallest stratum instead
    std::vector<Witness> witnesses;  // failing configurations, largest residual first
    std::vector<std::string> notes;  // warnings and inconclusive reasons

    bool passed() const { return status == Status::pass; }
};

struct AuditOptions {
    double tolerance = 1e-9;           // pass iff residual < tolerance
    double positivity_warning = 1e-6;  // strata below this pass with a warning
    EnumerationOptions enumeration;
};

enum class StructureForm { fig4, with_l };

/// Effective parent sets (table sensitivity) against the two-component
/// trial graph: A <- noise; A_D, A_Y <- A; D_A <- A_D; D <- D_A, U; Y <- A_Y, D, U;
/// with_l adds L <- A_D and L -> {D_A, D, Y}. Noise other than U must be private.
CheckResult audit_structure(const StructuralModel& model, StructureForm form, const AuditOptions& options = {});

/// D_A = 1 implies D = 1 in every configuration under A = 0 and A = 1.
CheckResult audit_determinism(const StructuralModel& model, const AuditOptions& options = {});

/// Every (A=a, D=0) stratum, or every (L=l, A=a, D=0) stratum with P(D=0, L=l) > 0,
/// has positive probability. Residual is the smallest stratum probability.
CheckResult audit_positivity(const StructuralModel& model, bool with_l, const AuditOptions& options = {});
CheckResult audit_positivity(const ObservedLaw& law, bool with_l, const AuditOptions& options = {});

/// max over (u, a') of |P(D^{a=a'}=0 | U=u) - P(D=0 | U=u, D_A=0) P(D_A=0 | A=a')|.
CheckResult audit_multiplicative_survival(const StructuralModel& model, const AuditOptions& options = {});

/// max over u of |P(U=u | D^{a=0}=0) - P(U=u | D^{a=1}=0)|.
CheckResult audit_posterior_invariance(const StructuralModel& model, const AuditOptions& options = {});

/// No configuration has D_A^{a=1} = 0 and D_A^{a=0} = 1. The event-wise
/// equivalence {D^{a=0}=0, D^{a=1}=0} = {D^{a=1}=0} is reported in the notes and
/// separately by audit_event_equivalence.
CheckResult audit_monotonicity(const StructuralModel& model, const AuditOptions& options = {});
CheckResult audit_event_equivalence(const StructuralModel& model, const AuditOptions& options = {});

/// Y^{a=0} independent of D^{a=1} given D^{a=0}=0 and U=u, for each u.
CheckResult audit_crossworld(const StructuralModel& model, const AuditOptions& options = {});

/// (i) P(A = A_D = A_Y) = 1 in the observed world; (ii) D_A, D and Y agree under
/// {A=a'} and {A_D=a', A_Y=a'}; (iii) D_A and D do not move with A_Y when A_D is held.
CheckResult audit_decomposition(const StructuralModel& model, const AuditOptions& options = {});

struct AuditReport {
    StructureForm form = StructureForm::fig4;  // with_l when the model declares L
    std::vector<CheckResult> checks;

    const CheckResult* find(const std::string& name) const;
    bool all_passed() const;
    bool any_failed() const;
    std::vector<std::string> failed_or_inconclusive(const std::vector<std::string>& names) const;
};

/// Runs every applicable check; missing roles make the affected checks inconclusive.
AuditReport run_all(const StructuralModel& model, const AuditOptions& options = {});

/// Interpretation of an identification functional given the audits of the same run.
struct Gate {
    bool cse = false;
    bool sace = false;
    std::vector<std::string> failed;  // audits blocking the CSE reading
    std::string label;
};

Gate gate_prop1(const AuditReport& report);
Gate gate_prop3(const AuditReport& report);
/// Naive and marginal contrasts never carry a causal interpretation.
Gate gate_descriptive();

struct ResponsePattern {
    // D_A^{a=1}, D_A^{a=0}, D^{a=1}, D^{a=0}, M^{a=1}, M^{a=0}
    std::array<int, 6> values{};
    double probability = 0.0;
};

struct ResponseTypeTable {
    double compliers = 0.0;      // M^{a=1}=1, M^{a=0}=0
    double defiers = 0.0;        // M^{a=1}=0, M^{a=0}=1
    double never_takers = 0.0;   // M^{a=1}=0, M^{a=0}=0
    double always_takers = 0.0;  // M^{a=1}=1, M^{a=0}=1
    std::vector<ResponsePattern> joint;  // sorted by values; D_A entries -1 without a D_A role

    double total() const { return compliers + defiers + never_takers + always_takers; }
};

/// M^{a=1} = 1 - D^{a=1}, M^{a=0} = D^{a=0}.
ResponseTypeTable classify_response_types(const StructuralModel& model, const EnumerationOptions& options = {});

/// Patterns with positive probability outside the seven admissible
/// (D_A, D, M) rows of the response-type table.
std::vector<ResponsePattern> inadmissible_patterns(const ResponseTypeTable& table);

}  // namespace sepfx::audit
