#pragma once

// Named scenario fixtures. All numeric defaults are fixture choices; the only
// externally sourced numbers are the adherence-trial calibration targets.

#include <array>
#include <random>
#include <string>
#include <vector>

#include "sepfx/scm.hpp"

namespace sepfx::zoo {

/// Exogenous uniform on [0,1) discretized at a set of cutpoints, so that
/// events {uniform < p} for any registered p are exact unions of codes.
class SharedUniform {
public:
    void add(double cut);
    std::vector<int> support() const;
    std::vector<double> weights() const;
    /// Number of leading codes making up the event {uniform < p}; p must be registered.
    int codes_below(double p) const;

private:
    std::vector<double> cuts_{1.0};  // sorted upper edges
};

/// Plastic-surgery trial (`toy1`). Valid ranges: probabilities in [0,1],
/// 0 <= da_cut <= da_levels, thresholds nonnegative with y_base + y_ay + y_u <= y_levels.
struct SurgeryParams {
    double p_a = 0.5;
    double p_u = 0.5;
    int da_levels = 5;  // eps_DA uniform on {0..da_levels-1}
    int da_cut = 1;     // D_A = A_D and eps_DA < da_cut
    double p_death_u = 0.5;  // weight of eps_D = 1; D = D_A or (U and eps_D)
    int y_levels = 10;  // eps_Y uniform on {0..y_levels-1}
    int y_base = 3;     // Y = 1 iff eps_Y < y_base + y_ay*A_Y + y_u*U
    int y_ay = 4;
    int y_u = 2;
    bool truncation = true;

    void validate() const;
};

StructuralModel build_surgery(const SurgeryParams& params = {});

/// `toy1V`: D_A additionally requires a U-dependent threshold,
/// cut(u) = (1 - w) * base.da_cut + w * da_cut_u[u] with w = u_dependence.
struct ViolationParams {
    SurgeryParams base;
    int da_cut_u0 = 0;
    int da_cut_u1 = 2;
    double u_dependence = 1.0;  // in [0,1]; cut(u) must come out integral

    void validate() const;
};

StructuralModel build_violation(const ViolationParams& params = {});

/// Sufficient-component causes: D_A = d0 | (d1 & A) | (d2 & !A),
/// D = D_A | d3 | (U & d4) | (!U & d5); Y attached as in the surgery fixture.
struct PieParams {
    std::array<double, 6> p{0.1, 0.2, 0.3, 0.1, 0.2, 0.15};
    double p_u = 0.5;
    double p_a = 0.5;

    void validate() const;
};

StructuralModel build_pie(const PieParams& params = {});

/// Treatment-affected common cause L of D_A, D and Y. Index order is
/// [A_D][L] for p_da, [L][U] for q_d.
struct WithLParams {
    double p_a = 0.5;
    double p_u = 0.5;
    std::array<double, 2> p_l{0.3, 0.7};  // P(L=1 | A_D=a)
    std::array<std::array<double, 2>, 2> p_da{{{0.05, 0.10}, {0.20, 0.40}}};
    std::array<std::array<double, 2>, 2> q_d{{{0.10, 0.30}, {0.20, 0.50}}};
    double y_base = 0.2;                    // P(Y=1) = y_base + y_ay[L]*A_Y + y_l*L + y_u*U
    std::array<double, 2> y_ay{0.1, 0.4};
    double y_l = 0.1;
    double y_u = 0.2;

    void validate() const;
};

/// Throws positivity "(A8)" when some (D=0, L=l, A=a) stratum is empty
/// while P(D=0, L=l) > 0.
StructuralModel build_with_l(const WithLParams& params = {});

struct CalibrationTarget {
    double d0_a1 = 0.225;  // P(D=0 | A=1), NRT arm adherence
    double d0_a0 = 0.399;  // P(D=0 | A=0), e-cigarette arm adherence
    double y1_a1 = 0.107;  // P(Y=1 | A=1)
    double y1_a0 = 0.156;  // P(Y=1 | A=0)
    double tolerance = 1e-6;

    static CalibrationTarget published() { return {}; }
    void validate() const;
};

/// Free parameters of the adherence family; the `fixed_` values are pinned.
struct AdherenceParams {
    double p_side = 0.0;  // P(D_A=1 | A=1)
    double q_mean = 0.5;  // q_u = q_mean -/+ q_spread for U = 0/1
    double alpha1 = 0.2;  // P(Y=1 | A_Y=a, D=0, U=0) for a = 1, 0
    double alpha0 = 0.2;

    static constexpr double fixed_p_u = 0.5;
    static constexpr double fixed_q_spread = 0.1;
    static constexpr double fixed_y_d = -0.05;  // non-adherence shift in P(Y=1)
    static constexpr double fixed_y_u = -0.04;  // U shift in P(Y=1)
};

StructuralModel build_adherence_from(const AdherenceParams& params);

/// P(D=0|A=1), P(D=0|A=0), P(Y=1|A=1), P(Y=1|A=0) of the observed law.
std::array<double, 4> adherence_moments(const StructuralModel& model);

class CalibrationError : public Error {
public:
    CalibrationError(const std::string& message, double best_residual,
                     std::array<double, 4> residuals)
        : Error(ErrorCode::calibration, message), best_residual_(best_residual), residuals_(residuals) {}
    double best_residual() const { return best_residual_; }
    const std::array<double, 4>& residuals() const { return residuals_; }

private:
    double best_residual_;
    std::array<double, 4> residuals_;
};

struct AdherenceFit {
    AdherenceParams params;
    StructuralModel model;
    std::array<double, 4> residuals{};
    double max_residual = 0.0;
    int sweeps = 0;
};

/// Coordinate-wise bisection, one moment per parameter. Throws
/// CalibrationError when the sweep budget runs out above tolerance.
AdherenceFit calibrate_adherence(const CalibrationTarget& targets, int max_sweeps = 50);
StructuralModel build_adherence(const CalibrationTarget& targets = CalibrationTarget::published());

/// Maternal smoking (A), low birth weight (D), infant mortality (Y).
struct BirthweightParams {
    double p_a = 0.5;
    double p_u = 0.1;
    int da_levels = 10;
    int da_cut = 3;      // P(D_A=1 | A_D=1) = 0.3
    int y_levels = 100;  // P(Y=1 | A_Y, U) = (y_base + y_a*A_Y + y_u*U) / y_levels
    int y_base = 1;
    int y_a = 2;
    int y_u = 30;

    void validate() const;
};

StructuralModel build_birthweight(const BirthweightParams& params = {});

/// Surgery layout in which neither treatment component enters any mechanism.
StructuralModel build_null_effect(bool truncation = true);

/// Multiplies every code of Y's support (and table) by k.
StructuralModel scaled_outcome(const StructuralModel& model, int k);

std::vector<std::string> fixture_names();
/// Throws invalid_argument for unknown names.
StructuralModel build_fixture(const std::string& name);

enum class Monotonicity { any, monotone, non_monotone };

struct RandomModelOptions {
    Monotonicity monotonicity = Monotonicity::any;
    double positivity_margin = 0.01;
};

/// Random model of the two-component trial form: A -> {A_D, A_Y}, A_D -> D_A -> D,
/// U -> {D, Y}, A_Y -> Y (and D -> Y when Y is not truncated). Categorical
/// tables are drawn uniformly and redrawn until every (A=a, D=0) stratum has
/// probability >= margin.
StructuralModel random_fig4_model(std::mt19937_64& rng, const RandomModelOptions& options = {});

/// As above plus a measured L with A_D -> L -> {D_A, D, Y}; redrawn until every
/// (D=0, L=l, A=a) stratum has probability >= margin.
StructuralModel random_fig7_model(std::mt19937_64& rng, const RandomModelOptions& options = {});

}  // namespace sepfx::zoo
