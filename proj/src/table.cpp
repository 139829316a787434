#include "sepfx/table.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

namespace sepfx {

std::size_t ProbabilityTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return i;
    throw Error(ErrorCode::unknown_column, "unknown column '" + name + "'");
}

bool ProbabilityTable::has_column(const std::string& name) const {
    return std::any_of(columns_.begin(), columns_.end(), [&](const Column& c) { return c.name == name; });
}

double ProbabilityTable::total_probability() const {
    double total = 0.0;
    for (double p : probabilities_) total += p;
    return total;
}

void ProbabilityTable::add_row(std::span<const int> cells, double probability) {
    cells_.insert(cells_.end(), cells.begin(), cells.end());
    probabilities_.push_back(probability);
}

WorldTable::WorldTable(std::vector<Intervention> interventions, std::vector<Column> columns)
    : interventions_(std::move(interventions)) {
    columns_ = std::move(columns);
}

std::string WorldTable::column_name(const std::string& variable, std::size_t world) const {
    for (const auto& c : columns_)
        if (c.variable == variable && (c.world < 0 || c.world == static_cast<int>(world))) return c.name;
    throw Error(ErrorCode::unknown_column,
                "no column for " + variable + " in world " + std::to_string(world));
}

std::size_t WorldTable::column(const std::string& variable, std::size_t world) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const auto& c = columns_[i];
        if (c.variable == variable && (c.world < 0 || c.world == static_cast<int>(world))) return i;
    }
    throw Error(ErrorCode::unknown_column,
                "no column for " + variable + " in world " + std::to_string(world));
}

ObservedLaw::ObservedLaw(std::vector<Column> columns, bool truncation) : truncation_(truncation) {
    columns_ = std::move(columns);
}

Event Event::operator&&(const Event& other) const {
    Event out = *this;
    out.never_ = never_ || other.never_;
    out.literals_.insert(out.literals_.end(), other.literals_.begin(), other.literals_.end());
    return out;
}

std::string Event::to_string() const {
    if (never_) return "false";
    if (literals_.empty()) return "true";
    std::string out;
    for (const auto& l : literals_) {
        if (!out.empty()) out += " & ";
        out += l.column + "=" + std::to_string(l.code);
    }
    return out;
}

WorldTable counterfactual_joint(const StructuralModel& model,
                                const std::vector<Intervention>& interventions,
                                const EnumerationOptions& options) {
    return counterfactual_joint(CompiledModel(model), interventions, options);
}

WorldTable counterfactual_joint(const CompiledModel& cm, const std::vector<Intervention>& interventions,
                                const EnumerationOptions& options) {
    const auto& model = cm.model();
    std::vector<Intervention> worlds = interventions;
    if (worlds.empty()) worlds.emplace_back();
    for (std::size_t i = 0; i < worlds.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (worlds[i] == worlds[j])
                throw Error(ErrorCode::invalid_argument, "duplicate intervention {" + worlds[i].label() + "}");

    const uint64_t configurations = cm.configuration_count();
    if (configurations > options.max_configurations) {
        throw Error(ErrorCode::enumeration_limit,
                    "noise space has " + std::to_string(configurations) +
                        " configurations, above the cap of " + std::to_string(options.max_configurations));
    }

    std::vector<std::vector<int>> forced;
    for (const auto& w : worlds) forced.push_back(cm.resolve(w));

    // Column layout: declared variable order, one column per world for endogenous.
    std::vector<Column> columns;
    struct Source {
        std::size_t var;
        std::size_t world;
    };
    std::vector<Source> sources;
    for (std::size_t v = 0; v < cm.variable_count(); ++v) {
        const auto& var = cm.var(v);
        if (var.kind == VariableKind::exogenous) {
            columns.push_back({var.name, var.name, -1});
            sources.push_back({v, 0});
            continue;
        }
        for (std::size_t w = 0; w < worlds.size(); ++w) {
            std::string name = worlds[w].empty() ? var.name : var.name + "^{" + worlds[w].label() + "}";
            columns.push_back({std::move(name), var.name, static_cast<int>(w)});
            sources.push_back({v, w});
        }
    }
    WorldTable table(worlds, columns);

    // Truncation masks Y in world w wherever D in world w equals 1.
    std::optional<std::size_t> y_var, d_var;
    std::optional<std::size_t> d_one;
    if (model.truncation && model.has_role(role::Y) && model.has_role(role::D)) {
        y_var = cm.index(model.role_variable(role::Y));
        d_var = cm.index(model.role_variable(role::D));
        d_one = cm.var(*d_var).index_of(1);
    }

    const auto& exo = cm.exogenous();
    std::vector<std::size_t> digit(exo.size(), 0);
    std::vector<std::vector<int>> values(worlds.size(), std::vector<int>(cm.variable_count(), 0));
    std::vector<int> row(columns.size());

    for (uint64_t c = 0; c < configurations; ++c) {
        double p = 1.0;
        for (std::size_t k = 0; k < exo.size(); ++k) p *= cm.weights(exo[k])[digit[k]];
        if (p > 0.0) {
            for (std::size_t w = 0; w < worlds.size(); ++w) {
                for (std::size_t k = 0; k < exo.size(); ++k) values[w][exo[k]] = static_cast<int>(digit[k]);
                cm.evaluate(values[w], forced[w]);
            }
            for (std::size_t col = 0; col < sources.size(); ++col) {
                const auto [v, w] = sources[col];
                int idx = values[w][v];
                if (y_var && v == *y_var && d_one && values[w][*d_var] == static_cast<int>(*d_one))
                    row[col] = kUndefined;
                else
                    row[col] = cm.var(v).support[idx];
            }
            table.add_row(row, p);
        }
        for (std::size_t k = exo.size(); k-- > 0;) {
            if (++digit[k] < cm.var(exo[k]).support.size()) break;
            digit[k] = 0;
        }
    }
    return table;
}

ObservedLaw project_observed(const WorldTable& table, const StructuralModel& model) {
    if (table.interventions().size() != 1 || !table.interventions().front().empty())
        throw Error(ErrorCode::invalid_argument, "observed projection needs the factual world only");
    std::vector<std::string> roles = {role::A};
    if (model.has_role(role::L)) roles.push_back(role::L);
    roles.push_back(role::D);
    roles.push_back(role::Y);

    std::vector<Column> columns;
    std::vector<std::size_t> source;
    for (const auto& r : roles) {
        columns.push_back({r, r, 0});
        source.push_back(table.column(model.role_variable(r), 0));
    }
    std::map<std::vector<int>, double> mass;
    std::vector<int> key(roles.size());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t k = 0; k < source.size(); ++k) key[k] = table.cell(i, source[k]);
        mass[key] += table.probability(i);
    }
    ObservedLaw law(columns, model.truncation);
    law.y_support = model.variable(model.role_variable(role::Y)).support;
    for (const auto& [cells, p] : mass) law.add_row(cells, p);
    return law;
}

ObservedLaw observed_law(const StructuralModel& model, const EnumerationOptions& options) {
    return project_observed(counterfactual_joint(model, {}, options), model);
}

namespace {

struct ResolvedEvent {
    std::vector<std::pair<std::size_t, int>> literals;
    bool never = false;

    bool holds(const ProbabilityTable& t, std::size_t row) const {
        if (never) return false;
        for (const auto& [col, code] : literals)
            if (t.cell(row, col) != code) return false;
        return true;
    }
};

ResolvedEvent resolve(const ProbabilityTable& table, const Event& event) {
    ResolvedEvent out;
    out.never = event.is_never();
    for (const auto& l : event.literals()) out.literals.emplace_back(table.column_index(l.column), l.code);
    return out;
}

}  // namespace

double event_probability(const ProbabilityTable& table, const Event& event) {
    auto resolved = resolve(table, event);
    double total = 0.0;
    for (std::size_t i = 0; i < table.rows(); ++i)
        if (resolved.holds(table, i)) total += table.probability(i);
    return total;
}

double event_probability(const ProbabilityTable& table, const RowPredicate& predicate) {
    double total = 0.0;
    for (std::size_t i = 0; i < table.rows(); ++i)
        if (predicate(table, i)) total += table.probability(i);
    return total;
}

double conditional_mean(const ProbabilityTable& table, const std::string& target, const Event& condition) {
    const auto col = table.column_index(target);
    auto resolved = resolve(table, condition);
    double mass = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        if (!resolved.holds(table, i)) continue;
        const double p = table.probability(i);
        if (p == 0.0) continue;
        const int v = table.cell(i, col);
        if (v == kUndefined)
            throw Error(ErrorCode::truncated_outcome,
                        "truncated outcome: " + target + " is undefined on part of {" + condition.to_string() +
                            "}; condition on D=0");
        mass += p;
        weighted += p * v;
    }
    if (mass <= 0.0)
        throw Error(ErrorCode::positivity, "positivity: P(" + condition.to_string() + ") = 0");
    return weighted / mass;
}

void dump(const ProbabilityTable& table, std::ostream& out) {
    for (const auto& c : table.columns()) out << c.name << '\t';
    out << "probability\n";
    std::ostringstream num;
    num.precision(17);
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t c = 0; c < table.cols(); ++c) {
            int v = table.cell(i, c);
            if (v == kUndefined)
                out << "undefined";
            else
                out << v;
            out << '\t';
        }
        num.str("");
        num << table.probability(i);
        out << num.str() << '\n';
    }
}

}  // namespace sepfx
