#include "sepfx/estimands.hpp"

namespace sepfx::estimands {

namespace {

void require_binary_arm(int a) {
    if (a != 0 && a != 1) throw Error(ErrorCode::invalid_argument, "treatment arm must be 0 or 1");
}

}  // namespace

double true_cse(const StructuralModel& model, int a_prime) {
    require_binary_arm(a_prime);
    const auto& a_d = model.role_variable(role::A_D);
    const auto& a_y = model.role_variable(role::A_Y);
    const auto& d = model.role_variable(role::D);
    const auto& y = model.role_variable(role::Y);

    // World 0 fixes only the event component; worlds 1 and 2 add A_Y = 1, 0.
    Intervention event_world = set(a_d, a_prime);
    Intervention treated = event_world, untreated = event_world;
    treated.assignments[a_y] = 1;
    untreated.assignments[a_y] = 0;
    auto table = counterfactual_joint(model, {event_world, treated, untreated});

    const Event event_free{{table.column_name(d, 0), 0}};
    const double p = event_probability(table, event_free);
    if (p <= 0.0)
        throw Error(ErrorCode::positivity,
                    "positivity: P(" + table.column_name(d, 0) + "=0) = 0 for a'=" + std::to_string(a_prime));
    return conditional_mean(table, table.column_name(y, 1), event_free) -
           conditional_mean(table, table.column_name(y, 2), event_free);
}

double always_event_free_probability(const StructuralModel& model) {
    const auto& a = model.role_variable(role::A);
    const auto& d = model.role_variable(role::D);
    auto table = counterfactual_joint(model, {set(a, 1), set(a, 0)});
    return event_probability(table, Event{{table.column_name(d, 0), 0}, {table.column_name(d, 1), 0}});
}

double true_sace(const StructuralModel& model) {
    const auto& a = model.role_variable(role::A);
    const auto& d = model.role_variable(role::D);
    const auto& y = model.role_variable(role::Y);
    auto table = counterfactual_joint(model, {set(a, 1), set(a, 0)});
    const Event stratum{{table.column_name(d, 0), 0}, {table.column_name(d, 1), 0}};
    if (event_probability(table, stratum) <= 0.0)
        throw Error(ErrorCode::positivity, "empty principal stratum {" + stratum.to_string() + "}");
    return conditional_mean(table, table.column_name(y, 0), stratum) -
           conditional_mean(table, table.column_name(y, 1), stratum);
}

double true_ate(const StructuralModel& model) {
    if (model.truncation)
        throw Error(ErrorCode::undefined_due_to_truncation,
                    "undefined-due-to-truncation: Y is undefined when D=1");
    const auto& a = model.role_variable(role::A);
    const auto& y = model.role_variable(role::Y);
    auto table = counterfactual_joint(model, {set(a, 1), set(a, 0)});
    return conditional_mean(table, table.column_name(y, 0), Event::always()) -
           conditional_mean(table, table.column_name(y, 1), Event::always());
}

double naive_contrast(const ObservedLaw& law, int d) {
    require_binary_arm(d);
    return conditional_mean(law, role::Y, Event{{role::A, 1}, {role::D, d}}) -
           conditional_mean(law, role::Y, Event{{role::A, 0}, {role::D, d}});
}

double marginal_contrast(const ObservedLaw& law) {
    return conditional_mean(law, role::Y, Event{{role::A, 1}}) -
           conditional_mean(law, role::Y, Event{{role::A, 0}});
}

EstimandReport compute_report(const StructuralModel& model) {
    EstimandReport r;
    const auto& a = model.role_variable(role::A);
    const auto& a_d = model.role_variable(role::A_D);
    const auto& a_y = model.role_variable(role::A_Y);
    for (int ap : {0, 1})
        r.provenance.push_back("{" + a_d + "=" + std::to_string(ap) + "}, {" + a_d + "=" + std::to_string(ap) +
                               "," + a_y + "=1}, {" + a_d + "=" + std::to_string(ap) + "," + a_y + "=0}");
    r.provenance.push_back("{" + a + "=1}, {" + a + "=0}");

    r.cse0 = true_cse(model, 0);
    r.cse1 = true_cse(model, 1);
    r.always_event_free = always_event_free_probability(model);
    if (r.always_event_free > 0.0) {
        r.sace = true_sace(model);
        r.notes.push_back("sace is a cross-world quantity computed under the shared-noise coupling");
    } else {
        r.notes.push_back("sace not computed: empty always-event-free stratum");
    }
    if (!model.truncation)
        r.ate = true_ate(model);
    else
        r.notes.push_back("ate undefined-due-to-truncation");

    const auto law = observed_law(model);
    try {
        r.naive_d0 = naive_contrast(law, 0);
    } catch (const Error& e) {
        r.notes.push_back(std::string("naive_d0 not computed: ") + e.what());
    }
    if (!model.truncation) {
        try {
            r.naive_d1 = naive_contrast(law, 1);
        } catch (const Error& e) {
            r.notes.push_back(std::string("naive_d1 not computed: ") + e.what());
        }
        r.marginal = marginal_contrast(law);
    }
    return r;
}

}  // namespace sepfx::estimands
