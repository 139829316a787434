#include "sepfx/identification.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace sepfx::identification {

std::string Functional::name() const {
    if (kind == FunctionalKind::prop1) return "prop1";
    return "prop3(a'=" + std::to_string(a_prime) + ")";
}

namespace {

std::string label_of(const Event& e) {
    std::string out;
    for (const auto& l : e.literals()) {
        if (!out.empty()) out += ',';
        out += l.column + "=" + std::to_string(l.code);
    }
    return out;
}

double require_stratum(const ObservedLaw& law, const Event& e, const char* assumption,
                       std::vector<Stratum>& strata) {
    const double p = event_probability(law, e);
    if (p <= 0.0)
        throw Error(ErrorCode::positivity,
                    std::string("positivity") + assumption + ": empty stratum " + label_of(e));
    strata.push_back({label_of(e), p});
    return p;
}

std::set<int> l_values(const ObservedLaw& law) {
    const auto col = law.column_index(role::L);
    std::set<int> out;
    for (std::size_t i = 0; i < law.rows(); ++i) out.insert(law.cell(i, col));
    return out;
}

}  // namespace

FunctionalResult prop1_functional(const ObservedLaw& law) {
    FunctionalResult r;
    r.functional = Functional::prop1();
    const Event treated{{role::A, 1}, {role::D, 0}};
    const Event control{{role::A, 0}, {role::D, 0}};
    require_stratum(law, treated, "", r.strata);
    require_stratum(law, control, "", r.strata);
    r.value = conditional_mean(law, role::Y, treated) - conditional_mean(law, role::Y, control);
    return r;
}

FunctionalResult prop3_functional(const ObservedLaw& law, int a_prime) {
    if (a_prime != 0 && a_prime != 1) throw Error(ErrorCode::invalid_argument, "a' must be 0 or 1");
    if (!law.has_l()) throw Error(ErrorCode::missing_role, "missing role 'L' in observed law");
    FunctionalResult r;
    r.functional = Functional::prop3(a_prime);
    const Event reference{{role::D, 0}, {role::A, a_prime}};
    const double p_ref = require_stratum(law, reference, "", r.strata);

    double value = 0.0;
    for (int l : l_values(law)) {
        if (event_probability(law, Event{{role::D, 0}, {role::L, l}}) <= 0.0) continue;
        const Event s1{{role::L, l}, {role::A, 1}, {role::D, 0}};
        const Event s0{{role::L, l}, {role::A, 0}, {role::D, 0}};
        require_stratum(law, s1, " (A8)", r.strata);
        require_stratum(law, s0, " (A8)", r.strata);
        const double contrast = conditional_mean(law, role::Y, s1) - conditional_mean(law, role::Y, s0);
        const double weight = event_probability(law, Event{{role::L, l}, {role::D, 0}, {role::A, a_prime}}) / p_ref;
        value += contrast * weight;
    }
    r.value = value;
    return r;
}

FunctionalResult evaluate(const ObservedLaw& law, const Functional& functional) {
    if (functional.kind == FunctionalKind::prop1) return prop1_functional(law);
    return prop3_functional(law, functional.a_prime);
}

namespace {

// Welford running mean / sum of squared deviations.
struct Accumulator {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double y) {
        ++n;
        const double delta = y - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (y - mean);
    }
};

StratumCount summarize(const std::string& label, const Accumulator& acc) {
    StratumCount s;
    s.label = label;
    s.n = acc.n;
    if (acc.n == 0) return s;
    s.mean = acc.mean;
    if (acc.n > 1) s.variance = acc.m2 / static_cast<double>(acc.n - 1);
    return s;
}

[[noreturn]] void empty_stratum(const std::string& label) {
    throw Error(ErrorCode::empty_stratum, "empty sample stratum: no rows with " + label);
}

}  // namespace

PlugInEstimate plug_in(const Dataset& data, const Functional& functional, const std::string& strata_column) {
    PlugInEstimate est;
    est.functional = functional;
    est.seed = data.seed;
    est.n = data.n;
    const auto a_col = data.column(role::A);
    const auto d_col = data.column(role::D);
    const auto y_col = data.column(role::Y);

    auto check_y = [&](std::size_t i) {
        const int y = data.cell(i, y_col);
        if (y == kUndefined)
            throw Error(ErrorCode::truncated_outcome, "row " + std::to_string(i) + ": Y undefined with D=0");
        return static_cast<double>(y);
    };

    if (functional.kind == FunctionalKind::prop1) {
        Accumulator arm[2];
        for (std::size_t i = 0; i < data.n; ++i) {
            if (data.cell(i, d_col) != 0) continue;
            const int a = data.cell(i, a_col);
            if (a != 0 && a != 1) continue;
            const double y = check_y(i);
            arm[a].add(y);
        }
        const auto s1 = summarize("A=1,D=0", arm[1]);
        const auto s0 = summarize("A=0,D=0", arm[0]);
        if (s1.n == 0) empty_stratum(s1.label);
        if (s0.n == 0) empty_stratum(s0.label);
        est.point = s1.mean - s0.mean;
        est.standard_error = std::sqrt(s1.variance / s1.n + s0.variance / s0.n);
        est.strata = {s1, s0};
        return est;
    }

    const auto l_col = data.column(strata_column);
    const int a_ref = functional.a_prime;
    std::map<int, Accumulator> by_l[2];
    std::map<int, std::size_t> any_arm;
    for (std::size_t i = 0; i < data.n; ++i) {
        if (data.cell(i, d_col) != 0) continue;
        const int a = data.cell(i, a_col);
        if (a != 0 && a != 1) continue;
        const int l = data.cell(i, l_col);
        const double y = check_y(i);
        by_l[a][l].add(y);
        any_arm[l]++;
    }
    std::size_t n_ref = 0;
    for (const auto& [l, acc] : by_l[a_ref]) n_ref += acc.n;
    if (n_ref == 0) empty_stratum("A=" + std::to_string(a_ref) + ",D=0");

    double point = 0.0, within = 0.0, weighted_sq = 0.0;
    for (const auto& [l, total] : any_arm) {
        const std::string suffix = strata_column + "=" + std::to_string(l);
        const auto s1 = summarize(suffix + ",A=1,D=0", by_l[1][l]);
        const auto s0 = summarize(suffix + ",A=0,D=0", by_l[0][l]);
        if (s1.n == 0) empty_stratum(s1.label);
        if (s0.n == 0) empty_stratum(s0.label);
        const double w = static_cast<double>(by_l[a_ref][l].n) / static_cast<double>(n_ref);
        const double contrast = s1.mean - s0.mean;
        point += w * contrast;
        within += w * w * (s1.variance / s1.n + s0.variance / s0.n);
        weighted_sq += w * contrast * contrast;
        est.strata.push_back(s1);
        est.strata.push_back(s0);
    }
    const double weight_var = std::max(0.0, (weighted_sq - point * point) / static_cast<double>(n_ref));
    est.point = point;
    est.standard_error = std::sqrt(within + weight_var);
    return est;
}

}  // namespace sepfx::identification
