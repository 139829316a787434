#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sepfx/scm.hpp"
#include "sepfx/table.hpp"

namespace sepfx::estimands {

/// CSE(a'): effect of the outcome component A_Y with the event component A_D
/// held at a', among units event-free under A_D = a'.
double true_cse(const StructuralModel& model, int a_prime);

/// Survivor average causal effect over the always-event-free stratum
/// {D^{a=0} = 0, D^{a=1} = 0}. Cross-world: relies on the shared-noise coupling.
double true_sace(const StructuralModel& model);

/// P(D^{a=0} = 0, D^{a=1} = 0).
double always_event_free_probability(const StructuralModel& model);

/// E(Y^{a=1}) - E(Y^{a=0}); throws undefined_due_to_truncation under truncation.
double true_ate(const StructuralModel& model);

/// E(Y | A=1, D=d) - E(Y | A=0, D=d) on the observed law.
double naive_contrast(const ObservedLaw& law, int d);

/// E(Y | A=1) - E(Y | A=0); throws truncated_outcome under truncation.
double marginal_contrast(const ObservedLaw& law);

struct EstimandReport {
    double cse0 = 0.0;
    double cse1 = 0.0;
    std::optional<double> sace;          // nullopt: not computed (empty stratum)
    std::optional<double> ate;           // nullopt: undefined due to truncation
    std::optional<double> naive_d0;
    std::optional<double> naive_d1;      // nullopt under truncation
    std::optional<double> marginal;      // nullopt under truncation
    double always_event_free = 0.0;
    std::vector<std::string> notes;
    std::vector<std::string> provenance;  // interventions enumerated
};

EstimandReport compute_report(const StructuralModel& model);

}  // namespace sepfx::estimands
