#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sepfx/sampling.hpp"
#include "sepfx/table.hpp"

namespace sepfx::identification {

enum class FunctionalKind { prop1, prop3 };

struct Functional {
    FunctionalKind kind = FunctionalKind::prop1;
    int a_prime = 0;  // standardization arm, prop3 only

    static Functional prop1() { return {FunctionalKind::prop1, 0}; }
    static Functional prop3(int a_prime) { return {FunctionalKind::prop3, a_prime}; }
    std::string name() const;
};

struct Stratum {
    std::string label;  // e.g. "A=1,D=0" or "L=1,A=0,D=0"
    double probability = 0.0;
};

struct FunctionalResult {
    double value = 0.0;
    Functional functional;
    std::vector<Stratum> strata;
};

/// E(Y | A=1, D=0) - E(Y | A=0, D=0). Identifies CSE(0) = CSE(1) under the
/// independent-mechanism assumptions, and also SACE under monotonicity plus
/// cross-world independence.
FunctionalResult prop1_functional(const ObservedLaw& law);

/// sum_l [E(Y | D=0, L=l, A=1) - E(Y | D=0, L=l, A=0)] * P(L=l | D=0, A=a').
/// Strata with P(D=0, L=l) = 0 are skipped.
FunctionalResult prop3_functional(const ObservedLaw& law, int a_prime);

FunctionalResult evaluate(const ObservedLaw& law, const Functional& functional);

struct StratumCount {
    std::string label;
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance of Y
};

struct PlugInEstimate {
    double point = 0.0;
    double standard_error = 0.0;
    Functional functional;
    std::vector<StratumCount> strata;
    std::optional<uint64_t> seed;
    std::size_t n = 0;
};

/// Sample-analogue plug-in with delta-method standard error. For prop3 the
/// stratum weights are treated as estimated (multinomial term added).
PlugInEstimate plug_in(const Dataset& data, const Functional& functional,
                       const std::string& strata_column = "L");

}  // namespace sepfx::identification
