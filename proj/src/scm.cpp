#include "sepfx/scm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace sepfx {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_model: return "invalid model";
        case ErrorCode::invalid_argument: return "invalid argument";
        case ErrorCode::unknown_column: return "unknown column";
        case ErrorCode::positivity: return "positivity";
        case ErrorCode::truncated_outcome: return "truncated outcome";
        case ErrorCode::undefined_due_to_truncation: return "undefined-due-to-truncation";
        case ErrorCode::missing_role: return "missing role";
        case ErrorCode::empty_stratum: return "empty stratum";
        case ErrorCode::enumeration_limit: return "enumeration limit";
        case ErrorCode::calibration: return "calibration";
        case ErrorCode::parse: return "parse";
    }
    return "unknown";
}

std::optional<std::size_t> FiniteVariable::index_of(int code) const {
    auto it = std::find(support.begin(), support.end(), code);
    if (it == support.end()) return std::nullopt;
    return static_cast<std::size_t>(it - support.begin());
}

const FiniteVariable* StructuralModel::find_variable(const std::string& name) const {
    for (const auto& v : variables)
        if (v.name == name) return &v;
    return nullptr;
}

const FiniteVariable& StructuralModel::variable(const std::string& name) const {
    if (const auto* v = find_variable(name)) return *v;
    throw Error(ErrorCode::invalid_argument, "unknown variable '" + name + "'");
}

const Mechanism* StructuralModel::find_mechanism(const std::string& target) const {
    for (const auto& m : mechanisms)
        if (m.target == target) return &m;
    return nullptr;
}

const NoiseSpec* StructuralModel::find_noise(const std::string& var) const {
    for (const auto& n : noise)
        if (n.variable == var) return &n;
    return nullptr;
}

const std::string& StructuralModel::role_variable(const std::string& r) const {
    auto it = roles.find(r);
    if (it == roles.end()) throw Error(ErrorCode::missing_role, "missing role '" + r + "'");
    return it->second;
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < errors.size(); ++i) out << (i ? "; " : "") << errors[i];
    return out.str();
}

namespace {

constexpr double kNormalizationTolerance = 1e-12;

std::size_t table_size(const StructuralModel& model, const Mechanism& m) {
    std::size_t size = 1;
    for (const auto& p : m.parents) {
        const auto* v = model.find_variable(p);
        if (!v) return 0;
        size *= v->support.size();
    }
    return size;
}

// Repeatedly emits the first (in declared order) mechanism whose endogenous
// parents are all emitted; returns false on a cycle.
bool topological_sort(const StructuralModel& model, std::vector<std::string>& order) {
    std::set<std::string> done;
    std::vector<const Mechanism*> pending;
    for (const auto& v : model.variables)
        if (const auto* m = model.find_mechanism(v.name)) pending.push_back(m);
    while (!pending.empty()) {
        auto it = std::find_if(pending.begin(), pending.end(), [&](const Mechanism* m) {
            return std::all_of(m->parents.begin(), m->parents.end(), [&](const std::string& p) {
                const auto* pv = model.find_variable(p);
                return !pv || pv->kind == VariableKind::exogenous || done.count(p);
            });
        });
        if (it == pending.end()) return false;
        order.push_back((*it)->target);
        done.insert((*it)->target);
        pending.erase(it);
    }
    return true;
}

}  // namespace

ValidationReport validate_model(const StructuralModel& model) {
    ValidationReport report;
    auto& errors = report.errors;

    std::set<std::string> names;
    for (const auto& v : model.variables) {
        if (v.name.empty()) errors.push_back("variable with empty name");
        if (!names.insert(v.name).second) errors.push_back("duplicate variable '" + v.name + "'");
        if (v.support.empty()) errors.push_back("empty support for " + v.name);
        std::set<int> codes(v.support.begin(), v.support.end());
        if (codes.size() != v.support.size()) errors.push_back("duplicate support code in " + v.name);
    }

    for (const auto& v : model.variables) {
        std::size_t noise_count = 0, mech_count = 0;
        for (const auto& n : model.noise) noise_count += n.variable == v.name;
        for (const auto& m : model.mechanisms) mech_count += m.target == v.name;
        if (v.kind == VariableKind::exogenous) {
            if (noise_count != 1) errors.push_back("exogenous " + v.name + " needs exactly one noise spec");
            if (mech_count != 0) errors.push_back("exogenous " + v.name + " has a mechanism");
        } else {
            if (mech_count != 1) errors.push_back("endogenous " + v.name + " needs exactly one mechanism");
            if (noise_count != 0) errors.push_back("endogenous " + v.name + " has a noise spec");
        }
    }

    for (const auto& n : model.noise) {
        const auto* v = model.find_variable(n.variable);
        if (!v) {
            errors.push_back("noise for unknown variable '" + n.variable + "'");
            continue;
        }
        if (n.weights.size() != v->support.size()) {
            errors.push_back("normalization: weight count mismatch for " + n.variable);
            continue;
        }
        double total = 0.0;
        bool negative = false;
        for (double w : n.weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) negative = true;
            total += w;
        }
        if (negative) errors.push_back("normalization: negative or non-finite weight for " + n.variable);
        if (std::abs(total - 1.0) > kNormalizationTolerance) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "normalization: weights of " << n.variable << " sum to " << total;
            errors.push_back(msg.str());
        }
    }

    bool parents_ok = true;
    for (const auto& m : model.mechanisms) {
        const auto* target = model.find_variable(m.target);
        if (!target) {
            errors.push_back("mechanism for unknown variable '" + m.target + "'");
            parents_ok = false;
            continue;
        }
        std::set<std::string> seen;
        bool ok = true;
        for (const auto& p : m.parents) {
            if (!model.find_variable(p)) {
                errors.push_back("unknown parent '" + p + "' of " + m.target);
                ok = false;
            }
            if (!seen.insert(p).second) {
                errors.push_back("duplicate parent '" + p + "' of " + m.target);
                ok = false;
            }
        }
        if (!ok) {
            parents_ok = false;
            continue;
        }
        if (m.table.size() != table_size(model, m)) {
            errors.push_back("partial table for " + m.target);
            continue;
        }
        for (int code : m.table) {
            if (!target->index_of(code)) {
                errors.push_back("table of " + m.target + " yields code " + std::to_string(code) +
                                 " outside its support");
                break;
            }
        }
    }

    if (parents_ok) {
        std::vector<std::string> order;
        if (!topological_sort(model, order)) errors.push_back("cyclic mechanism graph");
    }

    static const std::set<std::string> binary_roles = {role::A, role::A_D, role::A_Y,
                                                       role::D, role::D_A, role::M};
    for (const char* required : {role::A, role::D, role::Y})
        if (!model.has_role(required)) errors.push_back("missing role " + std::string(required));
    for (const auto& [r, name] : model.roles) {
        const auto* v = model.find_variable(name);
        if (!v) {
            errors.push_back("role " + r + " names unknown variable '" + name + "'");
            continue;
        }
        if (binary_roles.count(r) && !v->is_binary())
            errors.push_back("role " + r + " must have binary support {0,1}");
    }
    return report;
}

void require_valid(const StructuralModel& model) {
    auto report = validate_model(model);
    if (!report.ok()) throw Error(ErrorCode::invalid_model, report.summary());
}

std::string Intervention::label() const {
    std::string out;
    for (const auto& [var, code] : assignments) {
        if (!out.empty()) out += ',';
        out += var + "=" + std::to_string(code);
    }
    return out;
}

ModelBuilder& ModelBuilder::exogenous(const std::string& name, std::vector<int> support,
                                      std::vector<double> weights) {
    model_.variables.push_back({name, std::move(support), VariableKind::exogenous});
    model_.noise.push_back({name, std::move(weights)});
    return *this;
}

namespace {

std::vector<int> tabulate(const StructuralModel& model, const std::vector<std::string>& parents,
                          const ModelBuilder::TableFn& fn) {
    std::vector<const std::vector<int>*> supports;
    std::size_t size = 1;
    for (const auto& p : parents) {
        supports.push_back(&model.variable(p).support);
        size *= supports.back()->size();
    }
    std::vector<int> table;
    table.reserve(size);
    std::vector<std::size_t> idx(parents.size(), 0);
    std::vector<int> codes(parents.size());
    for (std::size_t row = 0; row < size; ++row) {
        for (std::size_t k = 0; k < parents.size(); ++k) codes[k] = (*supports[k])[idx[k]];
        table.push_back(fn(codes));
        for (std::size_t k = parents.size(); k-- > 0;) {
            if (++idx[k] < supports[k]->size()) break;
            idx[k] = 0;
        }
    }
    return table;
}

}  // namespace

ModelBuilder& ModelBuilder::endogenous(const std::string& name, std::vector<int> support,
                                       std::vector<std::string> parents, const TableFn& fn) {
    model_.variables.push_back({name, std::move(support), VariableKind::endogenous});
    auto table = tabulate(model_, parents, fn);
    model_.mechanisms.push_back({name, std::move(parents), std::move(table)});
    return *this;
}

ModelBuilder& ModelBuilder::role(const std::string& r, const std::string& variable) {
    model_.roles[r] = variable;
    return *this;
}

ModelBuilder& ModelBuilder::truncation(bool on) {
    model_.truncation = on;
    return *this;
}

StructuralModel ModelBuilder::build() const { return model_; }

void retabulate(StructuralModel& model, const std::string& target,
                std::vector<std::string> parents, const ModelBuilder::TableFn& fn) {
    for (auto& m : model.mechanisms) {
        if (m.target != target) continue;
        m.table = tabulate(model, parents, fn);
        m.parents = std::move(parents);
        return;
    }
    throw Error(ErrorCode::invalid_argument, "no mechanism for '" + target + "'");
}

CompiledModel::CompiledModel(const StructuralModel& model) : model_(model) {
    require_valid(model_);
    const auto n = model_.variables.size();
    tables_.resize(n);
    weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        by_name_[model_.variables[i].name] = i;
        if (model_.variables[i].kind == VariableKind::exogenous) exogenous_.push_back(i);
    }
    for (const auto& noise : model_.noise) weights_[by_name_.at(noise.variable)] = noise.weights;
    for (const auto& m : model_.mechanisms) {
        auto& t = tables_[by_name_.at(m.target)];
        const auto& target = model_.variables[by_name_.at(m.target)];
        for (const auto& p : m.parents) t.parents.push_back(by_name_.at(p));
        t.strides.assign(t.parents.size(), 1);
        for (std::size_t k = t.parents.size(); k-- > 1;)
            t.strides[k - 1] = t.strides[k] * model_.variables[t.parents[k]].support.size();
        t.entries.reserve(m.table.size());
        for (int code : m.table) t.entries.push_back(static_cast<int>(*target.index_of(code)));
    }
    std::vector<std::string> order;
    topological_sort(model_, order);
    for (const auto& name : order) topo_.push_back(by_name_.at(name));
}

std::size_t CompiledModel::index(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw Error(ErrorCode::invalid_argument, "unknown variable '" + name + "'");
    return it->second;
}

uint64_t CompiledModel::configuration_count() const {
    uint64_t total = 1;
    for (auto i : exogenous_) {
        uint64_t k = var(i).support.size();
        if (total > std::numeric_limits<uint64_t>::max() / k) return std::numeric_limits<uint64_t>::max();
        total *= k;
    }
    return total;
}

std::vector<int> CompiledModel::resolve(const Intervention& intervention) const {
    std::vector<int> forced(variable_count(), -1);
    for (const auto& [name, code] : intervention.assignments) {
        auto it = by_name_.find(name);
        if (it == by_name_.end())
            throw Error(ErrorCode::invalid_argument, "intervention on unknown variable '" + name + "'");
        const auto& v = var(it->second);
        if (v.kind != VariableKind::endogenous)
            throw Error(ErrorCode::invalid_argument, "intervention on exogenous variable '" + name + "'");
        auto idx = v.index_of(code);
        if (!idx)
            throw Error(ErrorCode::invalid_argument,
                        "intervention code " + std::to_string(code) + " outside support of " + name);
        forced[it->second] = static_cast<int>(*idx);
    }
    return forced;
}

void CompiledModel::evaluate(std::span<int> values, std::span<const int> forced) const {
    for (auto i : topo_) {
        if (forced[i] >= 0) {
            values[i] = forced[i];
            continue;
        }
        const auto& t = tables_[i];
        std::size_t offset = 0;
        for (std::size_t k = 0; k < t.parents.size(); ++k)
            offset += static_cast<std::size_t>(values[t.parents[k]]) * t.strides[k];
        values[i] = t.entries[offset];
    }
}

}  // namespace sepfx
