#pragma once

// Brute-force reference evaluator for tests. Walks the noise space with its own
// odometer and evaluates mechanisms by recursive table lookup, sharing nothing
// with the library's compiled evaluator.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sepfx/scm.hpp"

namespace oracle {

using Do = std::map<std::string, int>;

class World {
public:
    World(const sepfx::StructuralModel& m, std::map<std::string, int> noise) : m_(&m), noise_(std::move(noise)) {}

    int value(const std::string& var, const Do& intervention = {}) const {
        if (auto it = noise_.find(var); it != noise_.end()) return it->second;
        if (auto it = intervention.find(var); it != intervention.end()) return it->second;
        const sepfx::Mechanism* mech = nullptr;
        for (const auto& mm : m_->mechanisms)
            if (mm.target == var) mech = &mm;
        std::size_t row = 0;
        for (const auto& p : mech->parents) {
            const auto& support = variable(p).support;
            const int code = value(p, intervention);
            std::size_t pos = 0;
            while (support[pos] != code) ++pos;
            row = row * support.size() + pos;
        }
        return mech->table[row];
    }

    /// Outcome under an intervention; nullopt when truncated.
    std::optional<int> outcome(const Do& intervention = {}) const {
        const auto& d = m_->roles.at("D");
        if (m_->truncation && value(d, intervention) == 1) return std::nullopt;
        return value(m_->roles.at("Y"), intervention);
    }

    int noise(const std::string& var) const { return noise_.at(var); }

private:
    const sepfx::FiniteVariable& variable(const std::string& name) const {
        for (const auto& v : m_->variables)
            if (v.name == name) return v;
        throw std::runtime_error("oracle: unknown variable " + name);
    }

    const sepfx::StructuralModel* m_;
    std::map<std::string, int> noise_;
};

/// Calls fn(world, probability) for every positive-probability noise configuration.
inline void enumerate(const sepfx::StructuralModel& m, const std::function<void(const World&, double)>& fn) {
    std::vector<const sepfx::FiniteVariable*> exo;
    std::vector<const std::vector<double>*> weights;
    for (const auto& v : m.variables) {
        if (v.kind != sepfx::VariableKind::exogenous) continue;
        exo.push_back(&v);
        for (const auto& n : m.noise)
            if (n.variable == v.name) weights.push_back(&n.weights);
    }
    std::vector<std::size_t> idx(exo.size(), 0);
    for (;;) {
        double p = 1.0;
        std::map<std::string, int> noise;
        for (std::size_t k = 0; k < exo.size(); ++k) {
            p *= (*weights[k])[idx[k]];
            noise[exo[k]->name] = exo[k]->support[idx[k]];
        }
        if (p > 0.0) fn(World(m, std::move(noise)), p);
        std::size_t k = 0;
        for (; k < exo.size(); ++k) {
            if (++idx[k] < exo[k]->support.size()) break;
            idx[k] = 0;
        }
        if (k == exo.size()) return;
    }
}

using Pred = std::function<bool(const World&)>;

inline double prob(const sepfx::StructuralModel& m, const Pred& pred) {
    double total = 0.0;
    enumerate(m, [&](const World& w, double p) {
        if (pred(w)) total += p;
    });
    return total;
}

/// E(f | cond); f must be defined wherever cond holds.
inline double mean(const sepfx::StructuralModel& m, const std::function<double(const World&)>& f, const Pred& cond) {
    double num = 0.0, den = 0.0;
    enumerate(m, [&](const World& w, double p) {
        if (!cond(w)) return;
        num += p * f(w);
        den += p;
    });
    return num / den;
}

inline std::string r(const sepfx::StructuralModel& m, const char* role) { return m.roles.at(role); }

inline double cse(const sepfx::StructuralModel& m, int ap) {
    const Do event{{r(m, "A_D"), ap}};
    const Do on{{r(m, "A_D"), ap}, {r(m, "A_Y"), 1}}, off{{r(m, "A_D"), ap}, {r(m, "A_Y"), 0}};
    auto free = [&](const World& w) { return w.value(r(m, "D"), event) == 0; };
    return mean(m, [&](const World& w) { return double(*w.outcome(on)); }, free) -
           mean(m, [&](const World& w) { return double(*w.outcome(off)); }, free);
}

inline double sace(const sepfx::StructuralModel& m) {
    const Do a1{{r(m, "A"), 1}}, a0{{r(m, "A"), 0}};
    auto stratum = [&](const World& w) { return w.value(r(m, "D"), a1) == 0 && w.value(r(m, "D"), a0) == 0; };
    return mean(m, [&](const World& w) { return double(*w.outcome(a1) - *w.outcome(a0)); }, stratum);
}

inline double ate(const sepfx::StructuralModel& m) {
    const Do a1{{r(m, "A"), 1}}, a0{{r(m, "A"), 0}};
    return mean(m, [&](const World& w) { return double(*w.outcome(a1) - *w.outcome(a0)); },
                [](const World&) { return true; });
}

/// Observed E(Y | A=a, D=d[, L=l]).
inline double observed_mean(const sepfx::StructuralModel& m, int a, int d, std::optional<int> l = std::nullopt) {
    auto cond = [&](const World& w) {
        return w.value(r(m, "A")) == a && w.value(r(m, "D")) == d && (!l || w.value(r(m, "L")) == *l);
    };
    return mean(m, [&](const World& w) { return double(*w.outcome()); }, cond);
}

inline double prop1(const sepfx::StructuralModel& m) { return observed_mean(m, 1, 0) - observed_mean(m, 0, 0); }

inline double prop3(const sepfx::StructuralModel& m, int ap, const std::vector<int>& l_support) {
    const auto& a_var = r(m, "A");
    const auto& d_var = r(m, "D");
    const auto& l_var = r(m, "L");
    // One pass: mass and outcome sums of every (L=l, A=a, D=0) cell.
    std::map<std::pair<int, int>, std::pair<double, double>> cells;
    enumerate(m, [&](const World& w, double p) {
        if (w.value(d_var) != 0) return;
        auto& c = cells[{w.value(l_var), w.value(a_var)}];
        c.first += p;
        c.second += p * *w.outcome();
    });
    auto cell = [&](int l, int a) {
        auto it = cells.find({l, a});
        return it == cells.end() ? std::pair<double, double>{0.0, 0.0} : it->second;
    };
    double ref = 0.0;
    for (int l : l_support) ref += cell(l, ap).first;
    double total = 0.0;
    for (int l : l_support) {
        const auto c1 = cell(l, 1), c0 = cell(l, 0);
        if (c1.first + c0.first <= 0.0) continue;
        total += cell(l, ap).first / ref * (c1.second / c1.first - c0.second / c0.first);
    }
    return total;
}

}  // namespace oracle
