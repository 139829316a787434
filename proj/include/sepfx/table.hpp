#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "sepfx/scm.hpp"

namespace sepfx {

/// Cell value of a truncated outcome (Y when D = 1 under truncation).
inline constexpr int kUndefined = std::numeric_limits<int>::min();

struct Column {
    std::string name;      // e.g. "U", "D", "D^{A=1}", "Y^{A_D=0,A_Y=1}"
    std::string variable;  // underlying model variable (or role name in an ObservedLaw)
    int world = -1;        // intervention index; -1 for exogenous columns
};

/// Exact probability table: rows of integer cells with a probability each.
class ProbabilityTable {
public:
    std::size_t rows() const { return probabilities_.size(); }
    std::size_t cols() const { return columns_.size(); }
    const std::vector<Column>& columns() const { return columns_; }

    /// Throws unknown_column.
    std::size_t column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;

    int cell(std::size_t row, std::size_t col) const { return cells_[row * columns_.size() + col]; }
    double probability(std::size_t row) const { return probabilities_[row]; }
    double total_probability() const;

    void add_row(std::span<const int> cells, double probability);

protected:
    std::vector<Column> columns_;
    std::vector<int> cells_;
    std::vector<double> probabilities_;
};

/// Joint over the exogenous variables and one counterfactual copy of every
/// endogenous variable per intervention, all sharing one noise draw.
class WorldTable : public ProbabilityTable {
public:
    WorldTable(std::vector<Intervention> interventions, std::vector<Column> columns);

    const std::vector<Intervention>& interventions() const { return interventions_; }
    /// Column of `variable` in world `world` (exogenous columns ignore `world`).
    std::size_t column(const std::string& variable, std::size_t world) const;
    std::string column_name(const std::string& variable, std::size_t world) const;

private:
    std::vector<Intervention> interventions_;
};

/// Joint over the observed roles A, [L], D, Y with Y possibly kUndefined.
class ObservedLaw : public ProbabilityTable {
public:
    explicit ObservedLaw(std::vector<Column> columns, bool truncation);

    bool has_l() const { return has_column(role::L); }
    bool truncation() const { return truncation_; }
    /// Support codes of Y, needed to interpret the Y column.
    std::vector<int> y_support;

private:
    bool truncation_;
};

/// Conjunction of column == code literals.
class Event {
public:
    struct Literal {
        std::string column;
        int code;
    };

    Event() = default;
    Event(std::initializer_list<Literal> literals) : literals_(literals) {}

    static Event always() { return Event{}; }
    static Event never() {
        Event e;
        e.never_ = true;
        return e;
    }

    Event& and_(const std::string& column, int code) {
        literals_.push_back({column, code});
        return *this;
    }
    Event operator&&(const Event& other) const;

    const std::vector<Literal>& literals() const { return literals_; }
    bool is_never() const { return never_; }
    std::string to_string() const;

private:
    std::vector<Literal> literals_;
    bool never_ = false;
};

struct EnumerationOptions {
    uint64_t max_configurations = uint64_t{1} << 24;
};

/// Enumerates every positive-probability noise configuration (lexicographic in
/// declared exogenous order) and evaluates all worlds under it. An empty list
/// means the single factual world.
WorldTable counterfactual_joint(const StructuralModel& model,
                                const std::vector<Intervention>& interventions,
                                const EnumerationOptions& options = {});
WorldTable counterfactual_joint(const CompiledModel& model,
                                const std::vector<Intervention>& interventions,
                                const EnumerationOptions& options = {});

/// Marginal of `table` onto the named columns; rows sorted by cell tuple.
ObservedLaw project_observed(const WorldTable& table, const StructuralModel& model);

ObservedLaw observed_law(const StructuralModel& model, const EnumerationOptions& options = {});

double event_probability(const ProbabilityTable& table, const Event& event);

using RowPredicate = std::function<bool(const ProbabilityTable&, std::size_t row)>;
double event_probability(const ProbabilityTable& table, const RowPredicate& predicate);

/// E(target | condition). Throws positivity for a null condition and
/// truncated_outcome when the condition admits rows with undefined target.
double conditional_mean(const ProbabilityTable& table, const std::string& target,
                        const Event& condition);

/// Tab-separated dump: a header line, then one row per line, probability last.
void dump(const ProbabilityTable& table, std::ostream& out);

}  // namespace sepfx
