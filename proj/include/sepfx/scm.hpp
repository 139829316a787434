#pragma once

// Finite structural causal models in response-function form.
//
// A model is a set of named finite variables. Exogenous variables carry an
// independent noise distribution; every endogenous variable carries a total
// truth table over its parents. Causal roles (A, A_D, A_Y, D_A, D, Y, U, L, M)
// map onto variable names.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sepfx/error.hpp"

namespace sepfx {

enum class VariableKind { exogenous, endogenous };

struct FiniteVariable {
    std::string name;
    std::vector<int> support;
    VariableKind kind = VariableKind::endogenous;

    /// Position of `code` in the support, or nullopt.
    std::optional<std::size_t> index_of(int code) const;
    bool is_binary() const { return support == std::vector<int>{0, 1}; }
};

struct NoiseSpec {
    std::string variable;
    std::vector<double> weights;  // one per support code, in support order
};

/// `table` is flattened row-major over the parents' supports (the last parent
/// varies fastest); entries are codes of the target's support.
struct Mechanism {
    std::string target;
    std::vector<std::string> parents;
    std::vector<int> table;
};

namespace role {
inline constexpr const char* A = "A";
inline constexpr const char* A_D = "A_D";
inline constexpr const char* A_Y = "A_Y";
inline constexpr const char* D_A = "D_A";
inline constexpr const char* D = "D";
inline constexpr const char* Y = "Y";
inline constexpr const char* U = "U";
inline constexpr const char* L = "L";
inline constexpr const char* M = "M";
}  // namespace role

struct StructuralModel {
    std::vector<FiniteVariable> variables;
    std::vector<NoiseSpec> noise;
    std::vector<Mechanism> mechanisms;
    std::map<std::string, std::string> roles;
    bool truncation = false;  // Y undefined whenever D = 1

    const FiniteVariable& variable(const std::string& name) const;
    const FiniteVariable* find_variable(const std::string& name) const;
    const Mechanism* find_mechanism(const std::string& target) const;
    const NoiseSpec* find_noise(const std::string& variable) const;

    bool has_role(const std::string& r) const { return roles.count(r) != 0; }
    /// Variable name bound to role `r`; throws missing_role.
    const std::string& role_variable(const std::string& r) const;
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
    std::string summary() const;
};

ValidationReport validate_model(const StructuralModel& model);
/// Throws invalid_model carrying the report summary when validation fails.
void require_valid(const StructuralModel& model);

struct Intervention {
    std::map<std::string, int> assignments;

    bool empty() const { return assignments.empty(); }
    /// "A=1" / "A_D=0,A_Y=1"; empty string for the factual world.
    std::string label() const;
    friend bool operator==(const Intervention&, const Intervention&) = default;
};

inline Intervention set(const std::string& var, int code) { return Intervention{{{var, code}}}; }

/// Incremental construction of models; mechanisms are given as functions of
/// parent codes and tabulated eagerly.
class ModelBuilder {
public:
    using TableFn = std::function<int(std::span<const int>)>;

    ModelBuilder& exogenous(const std::string& name, std::vector<int> support,
                            std::vector<double> weights);
    ModelBuilder& endogenous(const std::string& name, std::vector<int> support,
                             std::vector<std::string> parents, const TableFn& fn);
    ModelBuilder& role(const std::string& r, const std::string& variable);
    ModelBuilder& truncation(bool on);

    StructuralModel build() const;

private:
    StructuralModel model_;
};

/// Replaces the table of `target` with one generated by `fn` over `parents`.
void retabulate(StructuralModel& model, const std::string& target,
                std::vector<std::string> parents, const ModelBuilder::TableFn& fn);

/// Index-based evaluator over a validated model (holds its own copy). Values
/// are support indices, not codes, so tables are plain offset lookups.
class CompiledModel {
public:
    explicit CompiledModel(const StructuralModel& model);

    const StructuralModel& model() const { return model_; }
    std::size_t variable_count() const { return model_.variables.size(); }
    std::size_t index(const std::string& name) const;
    const std::vector<std::size_t>& exogenous() const { return exogenous_; }
    const std::vector<std::size_t>& topological_order() const { return topo_; }
    const FiniteVariable& var(std::size_t i) const { return model_.variables[i]; }
    bool is_exogenous(std::size_t i) const { return var(i).kind == VariableKind::exogenous; }
    std::span<const double> weights(std::size_t exo_var) const { return weights_[exo_var]; }
    uint64_t configuration_count() const;  // saturates at UINT64_MAX

    /// Per-variable forced support index (or -1) for an intervention.
    std::vector<int> resolve(const Intervention& intervention) const;

    /// Fills endogenous entries of `values` given exogenous entries.
    void evaluate(std::span<int> values, std::span<const int> forced) const;

private:
    struct Table {
        std::vector<std::size_t> parents;
        std::vector<std::size_t> strides;
        std::vector<int> entries;  // target support indices
    };
    StructuralModel model_;
    std::map<std::string, std::size_t> by_name_;
    std::vector<std::size_t> exogenous_;
    std::vector<std::size_t> topo_;
    std::vector<Table> tables_;
    std::vector<std::vector<double>> weights_;
};

}  // namespace sepfx
