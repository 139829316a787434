#include "sepfx/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sepfx/table.hpp"

namespace sepfx::zoo {

namespace {

void check_probability(double p, const std::string& name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorCode::invalid_argument, "invalid params: " + name + " must lie in [0,1]");
}

std::vector<int> iota_support(int n) {
    std::vector<int> s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 0);
    return s;
}

std::vector<double> uniform_weights(int n) { return std::vector<double>(static_cast<std::size_t>(n), 1.0 / n); }

std::vector<double> coin(double p) { return {1.0 - p, p}; }

const std::vector<int> kBinary{0, 1};

// Treatment and its two components: A randomized, A_D = A_Y = A observed.
void add_treatment(ModelBuilder& b) {
    b.endogenous("A", kBinary, {"eps_A"}, [](auto v) { return v[0]; });
    b.endogenous("A_D", kBinary, {"A"}, [](auto v) { return v[0]; });
    b.endogenous("A_Y", kBinary, {"A"}, [](auto v) { return v[0]; });
    b.role(role::A, "A").role(role::A_D, "A_D").role(role::A_Y, "A_Y");
}

void add_roles(ModelBuilder& b) {
    b.role(role::D_A, "D_A").role(role::D, "D").role(role::Y, "Y").role(role::U, "U");
}

}  // namespace

void SharedUniform::add(double cut) {
    check_probability(cut, "cutpoint");
    if (cut <= 0.0) return;
    auto it = std::lower_bound(cuts_.begin(), cuts_.end(), cut);
    if (it == cuts_.end() || *it != cut) cuts_.insert(it, cut);
}

std::vector<int> SharedUniform::support() const { return iota_support(static_cast<int>(cuts_.size())); }

std::vector<double> SharedUniform::weights() const {
    std::vector<double> w;
    double prev = 0.0;
    for (double c : cuts_) {
        w.push_back(c - prev);
        prev = c;
    }
    return w;
}

int SharedUniform::codes_below(double p) const {
    if (p <= 0.0) return 0;
    auto it = std::lower_bound(cuts_.begin(), cuts_.end(), p);
    if (it == cuts_.end() || *it != p)
        throw Error(ErrorCode::invalid_argument, "cutpoint was not registered");
    return static_cast<int>(it - cuts_.begin()) + 1;
}

// --- surgery / toy1 -------------------------------------------------------

void SurgeryParams::validate() const {
    check_probability(p_a, "p_a");
    check_probability(p_u, "p_u");
    check_probability(p_death_u, "p_death_u");
    if (da_levels < 1 || da_cut < 0 || da_cut > da_levels)
        throw Error(ErrorCode::invalid_argument, "invalid params: need 0 <= da_cut <= da_levels");
    if (y_levels < 1 || y_levels > 10000)
        throw Error(ErrorCode::invalid_argument, "invalid params: y_levels must lie in [1, 10000]");
    if (y_base < 0 || y_ay < 0 || y_u < 0)
        throw Error(ErrorCode::invalid_argument, "invalid params: outcome thresholds must be nonnegative");
    if (y_base + y_ay + y_u > y_levels)
        throw Error(ErrorCode::invalid_argument, "invalid params: outcome threshold exceeds " +
                                                     std::to_string(y_levels));
}

namespace {

ModelBuilder surgery_noise(const SurgeryParams& p) {
    ModelBuilder b;
    b.exogenous("U", kBinary, coin(p.p_u));
    b.exogenous("eps_A", kBinary, coin(p.p_a));
    b.exogenous("eps_DA", iota_support(p.da_levels), uniform_weights(p.da_levels));
    b.exogenous("eps_D", kBinary, coin(p.p_death_u));
    b.exogenous("eps_Y", iota_support(p.y_levels), uniform_weights(p.y_levels));
    add_treatment(b);
    return b;
}

void surgery_outcome(ModelBuilder& b, const SurgeryParams& p) {
    b.endogenous("D", kBinary, {"D_A", "U", "eps_D"},
                 [](auto v) { return v[0] == 1 || (v[1] == 1 && v[2] == 1) ? 1 : 0; });
    b.endogenous("Y", kBinary, {"A_Y", "U", "eps_Y"}, [p](auto v) {
        return v[2] < p.y_base + p.y_ay * v[0] + p.y_u * v[1] ? 1 : 0;
    });
    add_roles(b);
    b.truncation(p.truncation);
}

}  // namespace

StructuralModel build_surgery(const SurgeryParams& p) {
    p.validate();
    auto b = surgery_noise(p);
    b.endogenous("D_A", kBinary, {"A_D", "eps_DA"},
                 [p](auto v) { return v[0] == 1 && v[1] < p.da_cut ? 1 : 0; });
    surgery_outcome(b, p);
    return b.build();
}

// --- toy1V ----------------------------------------------------------------

void ViolationParams::validate() const {
    base.validate();
    check_probability(u_dependence, "u_dependence");
    for (int cut : {da_cut_u0, da_cut_u1})
        if (cut < 0 || cut > base.da_levels)
            throw Error(ErrorCode::invalid_argument, "invalid params: U-specific cut outside [0, da_levels]");
}

StructuralModel build_violation(const ViolationParams& p) {
    p.validate();
    if (p.u_dependence == 0.0) return build_surgery(p.base);

    std::array<int, 2> cut{};
    for (int u : {0, 1}) {
        const double c = (1.0 - p.u_dependence) * p.base.da_cut +
                         p.u_dependence * (u == 0 ? p.da_cut_u0 : p.da_cut_u1);
        if (std::abs(c - std::round(c)) > 1e-9)
            throw Error(ErrorCode::invalid_argument, "invalid params: interpolated D_A cut is not integral");
        cut[static_cast<std::size_t>(u)] = static_cast<int>(std::round(c));
    }
    auto b = surgery_noise(p.base);
    b.endogenous("D_A", kBinary, {"A_D", "U", "eps_DA"},
                 [cut](auto v) { return v[0] == 1 && v[2] < cut[static_cast<std::size_t>(v[1])] ? 1 : 0; });
    surgery_outcome(b, p.base);
    return b.build();
}

// --- causal pies ----------------------------------------------------------

void PieParams::validate() const {
    for (std::size_t i = 0; i < p.size(); ++i) check_probability(p[i], "p" + std::to_string(i));
    check_probability(p_u, "p_u");
    check_probability(p_a, "p_a");
}

StructuralModel build_pie(const PieParams& params) {
    params.validate();
    const SurgeryParams y;  // outcome part shared with the surgery fixture
    ModelBuilder b;
    b.exogenous("U", kBinary, coin(params.p_u));
    b.exogenous("eps_A", kBinary, coin(params.p_a));
    for (std::size_t i = 0; i < 6; ++i) b.exogenous("delta" + std::to_string(i), kBinary, coin(params.p[i]));
    b.exogenous("eps_Y", iota_support(y.y_levels), uniform_weights(y.y_levels));
    add_treatment(b);
    b.endogenous("D_A", kBinary, {"A_D", "delta0", "delta1", "delta2"}, [](auto v) {
        return v[1] == 1 || (v[2] == 1 && v[0] == 1) || (v[3] == 1 && v[0] == 0) ? 1 : 0;
    });
    b.endogenous("D", kBinary, {"D_A", "U", "delta3", "delta4", "delta5"}, [](auto v) {
        return v[0] == 1 || v[2] == 1 || (v[1] == 1 && v[3] == 1) || (v[1] == 0 && v[4] == 1) ? 1 : 0;
    });
    b.endogenous("Y", kBinary, {"A_Y", "U", "eps_Y"},
                 [y](auto v) { return v[2] < y.y_base + y.y_ay * v[0] + y.y_u * v[1] ? 1 : 0; });
    add_roles(b);
    b.truncation(true);
    return b.build();
}

// --- treatment-affected common cause L ------------------------------------

void WithLParams::validate() const {
    check_probability(p_a, "p_a");
    check_probability(p_u, "p_u");
    for (int a : {0, 1}) {
        check_probability(p_l[a], "p_l");
        for (int l : {0, 1}) {
            check_probability(p_da[a][l], "p_da");
            check_probability(q_d[a][l], "q_d");
            for (int u : {0, 1})
                for (int ay : {0, 1})
                    check_probability(y_base + y_ay[l] * ay + y_l * l + y_u * u, "P(Y=1 | A_Y, L, U)");
        }
    }
}

StructuralModel build_with_l(const WithLParams& p) {
    p.validate();
    SharedUniform l_noise, da_noise, d_noise, y_noise;
    for (int a : {0, 1}) l_noise.add(p.p_l[a]);
    for (const auto& row : p.p_da)
        for (double v : row) da_noise.add(v);
    for (const auto& row : p.q_d)
        for (double v : row) d_noise.add(v);
    auto y_prob = [p](int ay, int l, int u) { return p.y_base + p.y_ay[l] * ay + p.y_l * l + p.y_u * u; };
    for (int ay : {0, 1})
        for (int l : {0, 1})
            for (int u : {0, 1}) y_noise.add(y_prob(ay, l, u));

    ModelBuilder b;
    b.exogenous("U", kBinary, coin(p.p_u));
    b.exogenous("eps_A", kBinary, coin(p.p_a));
    b.exogenous("eps_L", l_noise.support(), l_noise.weights());
    b.exogenous("eps_DA", da_noise.support(), da_noise.weights());
    b.exogenous("eps_D", d_noise.support(), d_noise.weights());
    b.exogenous("eps_Y", y_noise.support(), y_noise.weights());
    add_treatment(b);
    b.endogenous("L", kBinary, {"A_D", "eps_L"},
                 [=](auto v) { return v[1] < l_noise.codes_below(p.p_l[v[0]]) ? 1 : 0; });
    b.endogenous("D_A", kBinary, {"A_D", "L", "eps_DA"},
                 [=](auto v) { return v[2] < da_noise.codes_below(p.p_da[v[0]][v[1]]) ? 1 : 0; });
    b.endogenous("D", kBinary, {"D_A", "L", "U", "eps_D"}, [=](auto v) {
        return v[0] == 1 || v[3] < d_noise.codes_below(p.q_d[v[1]][v[2]]) ? 1 : 0;
    });
    b.endogenous("Y", kBinary, {"A_Y", "L", "U", "eps_Y"},
                 [=](auto v) { return v[3] < y_noise.codes_below(y_prob(v[0], v[1], v[2])) ? 1 : 0; });
    add_roles(b);
    b.role(role::L, "L");
    b.truncation(true);
    auto model = b.build();

    const auto law = observed_law(model);
    for (int l : {0, 1}) {
        if (event_probability(law, Event{{role::D, 0}, {role::L, l}}) <= 0.0) continue;
        for (int a : {0, 1})
            if (event_probability(law, Event{{role::D, 0}, {role::L, l}, {role::A, a}}) <= 0.0)
                throw Error(ErrorCode::positivity, "positivity (A8): empty stratum D=0,L=" + std::to_string(l) +
                                                       ",A=" + std::to_string(a));
    }
    return model;
}

// --- adherence trial ------------------------------------------------------

void CalibrationTarget::validate() const {
    check_probability(d0_a1, "target P(D=0|A=1)");
    check_probability(d0_a0, "target P(D=0|A=0)");
    check_probability(y1_a1, "target P(Y=1|A=1)");
    check_probability(y1_a0, "target P(Y=1|A=0)");
    if (!(tolerance > 0.0)) throw Error(ErrorCode::invalid_argument, "calibration tolerance must be positive");
}

StructuralModel build_adherence_from(const AdherenceParams& p) {
    using P = AdherenceParams;
    const std::array<double, 2> q{p.q_mean - P::fixed_q_spread, p.q_mean + P::fixed_q_spread};
    const std::array<double, 2> alpha{p.alpha0, p.alpha1};
    auto y_prob = [=](int a, int d, int u) { return alpha[a] + P::fixed_y_d * d + P::fixed_y_u * u; };

    check_probability(p.p_side, "p_side");
    for (double v : q) check_probability(v, "q_u");
    SharedUniform da_noise, d_noise, y_noise;
    da_noise.add(p.p_side);
    for (double v : q) d_noise.add(v);
    for (int a : {0, 1})
        for (int d : {0, 1})
            for (int u : {0, 1}) {
                check_probability(y_prob(a, d, u), "P(Y=1 | A_Y, D, U)");
                y_noise.add(y_prob(a, d, u));
            }

    ModelBuilder b;
    b.exogenous("U", kBinary, coin(P::fixed_p_u));
    b.exogenous("eps_A", kBinary, coin(0.5));
    b.exogenous("eps_DA", da_noise.support(), da_noise.weights());
    b.exogenous("eps_D", d_noise.support(), d_noise.weights());
    b.exogenous("eps_Y", y_noise.support(), y_noise.weights());
    add_treatment(b);
    const int side_codes = da_noise.codes_below(p.p_side);
    b.endogenous("D_A", kBinary, {"A_D", "eps_DA"},
                 [=](auto v) { return v[0] == 1 && v[1] < side_codes ? 1 : 0; });
    b.endogenous("D", kBinary, {"D_A", "U", "eps_D"},
                 [=](auto v) { return v[0] == 1 || v[2] < d_noise.codes_below(q[v[1]]) ? 1 : 0; });
    b.endogenous("Y", kBinary, {"A_Y", "D", "U", "eps_Y"},
                 [=](auto v) { return v[3] < y_noise.codes_below(y_prob(v[0], v[1], v[2])) ? 1 : 0; });
    add_roles(b);
    b.truncation(false);
    return b.build();
}

std::array<double, 4> adherence_moments(const StructuralModel& model) {
    const auto law = observed_law(model);
    const double a1 = event_probability(law, Event{{role::A, 1}});
    const double a0 = event_probability(law, Event{{role::A, 0}});
    return {event_probability(law, Event{{role::A, 1}, {role::D, 0}}) / a1,
            event_probability(law, Event{{role::A, 0}, {role::D, 0}}) / a0,
            event_probability(law, Event{{role::A, 1}, {role::Y, 1}}) / a1,
            event_probability(law, Event{{role::A, 0}, {role::Y, 1}}) / a0};
}

AdherenceFit calibrate_adherence(const CalibrationTarget& targets, int max_sweeps) {
    targets.validate();
    using P = AdherenceParams;
    const std::array<double, 4> goal{targets.d0_a1, targets.d0_a0, targets.y1_a1, targets.y1_a0};

    const double alpha_lo = 0.1;  // keeps every P(Y=1 | a, d, u) strictly positive
    struct Coordinate {
        double P::*field;
        std::size_t moment;
        double lo, hi;
    };
    // Each moment is monotone in its paired parameter with the others held fixed.
    const std::array<Coordinate, 4> coords{{
        {&P::q_mean, 1, P::fixed_q_spread, 1.0 - P::fixed_q_spread},
        {&P::p_side, 0, 0.0, 1.0},
        {&P::alpha1, 2, alpha_lo, 1.0},
        {&P::alpha0, 3, alpha_lo, 1.0},
    }};

    P params;
    auto residuals_of = [&](const P& p) {
        const auto m = adherence_moments(build_adherence_from(p));
        std::array<double, 4> r{};
        for (std::size_t i = 0; i < 4; ++i) r[i] = m[i] - goal[i];
        return r;
    };
    auto max_abs = [](const std::array<double, 4>& r) {
        double out = 0.0;
        for (double v : r) out = std::max(out, std::abs(v));
        return out;
    };

    std::array<double, 4> residuals = residuals_of(params);
    int sweep = 0;
    for (; sweep < max_sweeps && max_abs(residuals) > targets.tolerance * 1e-3; ++sweep) {
        for (const auto& c : coords) {
            auto moment_at = [&](double x) {
                P trial = params;
                trial.*c.field = x;
                return residuals_of(trial)[c.moment];
            };
            double lo = c.lo, hi = c.hi;
            const double f_lo = moment_at(lo), f_hi = moment_at(hi);
            double best;
            if (std::abs(f_lo) <= targets.tolerance * 1e-3) {
                best = lo;  // boundary solution, e.g. no treatment-induced non-adherence
            } else if (std::abs(f_hi) <= targets.tolerance * 1e-3) {
                best = hi;
            } else if ((f_lo < 0) == (f_hi < 0)) {
                best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;  // no bracket, stay at the nearer edge
            } else {
                const bool increasing = f_lo < 0;
                for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    const double f = moment_at(mid);
                    if ((f < 0) == increasing)
                        lo = mid;
                    else
                        hi = mid;
                }
                best = std::abs(moment_at(lo)) <= std::abs(moment_at(hi)) ? lo : hi;
            }
            params.*c.field = best;
        }
        residuals = residuals_of(params);
    }

    const double worst = max_abs(residuals);
    if (worst > targets.tolerance) {
        throw CalibrationError("calibration did not converge within " + std::to_string(max_sweeps) +
                                   " sweeps; best max residual " + std::to_string(worst),
                               worst, residuals);
    }
    AdherenceFit fit;
    fit.params = params;
    fit.model = build_adherence_from(params);
    fit.residuals = residuals;
    fit.max_residual = worst;
    fit.sweeps = sweep;
    return fit;
}

StructuralModel build_adherence(const CalibrationTarget& targets) { return calibrate_adherence(targets).model; }

// --- birth weight ---------------------------------------------------------

void BirthweightParams::validate() const {
    check_probability(p_a, "p_a");
    check_probability(p_u, "p_u");
    if (da_levels < 1 || da_cut < 0 || da_cut > da_levels)
        throw Error(ErrorCode::invalid_argument, "invalid params: need 0 <= da_cut <= da_levels");
    if (y_levels < 1 || y_base < 0 || y_a < 0 || y_u < 0 || y_base + y_a + y_u > y_levels)
        throw Error(ErrorCode::invalid_argument, "invalid params: mortality thresholds outside [0, y_levels]");
}

StructuralModel build_birthweight(const BirthweightParams& p) {
    p.validate();
    ModelBuilder b;
    b.exogenous("U", kBinary, coin(p.p_u));
    b.exogenous("eps_A", kBinary, coin(p.p_a));
    b.exogenous("eps_DA", iota_support(p.da_levels), uniform_weights(p.da_levels));
    b.exogenous("eps_Y", iota_support(p.y_levels), uniform_weights(p.y_levels));
    add_treatment(b);
    b.endogenous("D_A", kBinary, {"A_D", "eps_DA"},
                 [p](auto v) { return v[0] == 1 && v[1] < p.da_cut ? 1 : 0; });
    b.endogenous("D", kBinary, {"D_A", "U"}, [](auto v) { return v[0] == 1 || v[1] == 1 ? 1 : 0; });
    b.endogenous("Y", kBinary, {"A_Y", "U", "eps_Y"},
                 [p](auto v) { return v[2] < p.y_base + p.y_a * v[0] + p.y_u * v[1] ? 1 : 0; });
    add_roles(b);
    b.truncation(false);
    return b.build();
}

// --- misc -----------------------------------------------------------------

StructuralModel build_null_effect(bool truncation) {
    SurgeryParams p;
    p.truncation = truncation;
    auto model = build_surgery(p);
    retabulate(model, "D_A", {"eps_DA"}, [p](auto v) { return v[0] < p.da_cut ? 1 : 0; });
    retabulate(model, "Y", {"U", "eps_Y"}, [p](auto v) { return v[1] < p.y_base + p.y_u * v[0] ? 1 : 0; });
    return model;
}

StructuralModel scaled_outcome(const StructuralModel& model, int k) {
    if (k == 0) throw Error(ErrorCode::invalid_argument, "scale factor must be nonzero");
    StructuralModel out = model;
    const auto& y = model.role_variable(role::Y);
    for (auto& v : out.variables)
        if (v.name == y)
            for (auto& c : v.support) c *= k;
    for (auto& m : out.mechanisms)
        if (m.target == y)
            for (auto& c : m.table) c *= k;
    return out;
}

std::vector<std::string> fixture_names() {
    return {"toy1", "toy1V", "pie", "with_l", "adherence", "birthweight", "null"};
}

StructuralModel build_fixture(const std::string& name) {
    if (name == "toy1") return build_surgery();
    if (name == "toy1V") return build_violation();
    if (name == "pie") return build_pie();
    if (name == "with_l") return build_with_l();
    if (name == "adherence") return build_adherence();
    if (name == "birthweight") return build_birthweight();
    if (name == "null") return build_null_effect();
    throw Error(ErrorCode::invalid_argument, "unknown fixture '" + name + "'");
}

// --- random families ------------------------------------------------------

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& v : w) total += v = uniform(rng, 0.05, 1.0);
    for (auto& v : w) v /= total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) acc += w[i];
    w.back() = 1.0 - acc;
    return w;
}

// A categorical table over parent configurations, realized through one
// shared uniform noise via cumulative cutpoints.
struct CategoricalTable {
    std::size_t categories = 2;
    std::vector<std::vector<double>> cumulative;  // per parent configuration
    SharedUniform noise;

    CategoricalTable(std::mt19937_64& rng, std::size_t configs, std::size_t k) : categories(k) {
        for (std::size_t c = 0; c < configs; ++c) {
            auto w = random_simplex(rng, k);
            std::vector<double> cum;
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < k; ++j) {
                cum.push_back(acc += w[j]);
                noise.add(acc);
            }
            cumulative.push_back(std::move(cum));
        }
    }

    int value(std::size_t config, int code) const {
        const auto& cum = cumulative[config];
        for (std::size_t j = 0; j < cum.size(); ++j)
            if (code < noise.codes_below(cum[j])) return static_cast<int>(j);
        return static_cast<int>(categories - 1);
    }
};

bool positivity_margin(const StructuralModel& model, double margin, bool with_l) {
    const auto law = observed_law(model);
    if (!with_l) {
        for (int a : {0, 1})
            if (event_probability(law, Event{{role::A, a}, {role::D, 0}}) < margin) return false;
        return true;
    }
    const auto& support = model.variable(model.role_variable(role::L)).support;
    for (int l : support)
        for (int a : {0, 1})
            if (event_probability(law, Event{{role::L, l}, {role::A, a}, {role::D, 0}}) < margin) return false;
    return true;
}

StructuralModel draw_model(std::mt19937_64& rng, const RandomModelOptions& options, bool with_l) {
    const std::size_t u_card = std::uniform_int_distribution<int>(2, 3)(rng);
    const std::size_t y_card = std::uniform_int_distribution<int>(2, 3)(rng);
    const std::size_t l_card = with_l ? std::uniform_int_distribution<int>(2, 3)(rng) : 1;
    const bool truncation = std::bernoulli_distribution(0.5)(rng);
    const double p_a = uniform(rng, 0.2, 0.8);

    // D_A | A_D, L: event {eps_DA < p[a][l]}; the shared noise couples arms monotonically
    // when p[1][l] >= p[0][l].
    std::vector<std::array<double, 2>> p_da(l_card);
    for (auto& pl : p_da) {
        double x = uniform(rng, 0.0, 0.5), y = uniform(rng, 0.0, 0.5);
        if (options.monotonicity == Monotonicity::monotone && x < y) std::swap(x, y);
        if (options.monotonicity == Monotonicity::non_monotone && x >= y) std::swap(x, y);
        pl = {y, x};  // [A_D=0], [A_D=1]
    }
    SharedUniform da_noise;
    for (const auto& pl : p_da) {
        da_noise.add(pl[0]);
        da_noise.add(pl[1]);
    }
    std::vector<double> q(l_card * u_card);
    SharedUniform d_noise;
    for (auto& v : q) d_noise.add(v = uniform(rng, 0.0, 0.6));

    ModelBuilder b;
    b.exogenous("U", iota_support(static_cast<int>(u_card)), random_simplex(rng, u_card));
    b.exogenous("eps_A", kBinary, coin(p_a));
    add_treatment(b);

    std::vector<std::string> l_parent;
    if (with_l) {
        CategoricalTable l_table(rng, 2, l_card);
        b.exogenous("eps_L", l_table.noise.support(), l_table.noise.weights());
        b.endogenous("L", iota_support(static_cast<int>(l_card)), {"A_D", "eps_L"},
                     [l_table](auto v) { return l_table.value(static_cast<std::size_t>(v[0]), v[1]); });
        b.role(role::L, "L");
        l_parent.push_back("L");
    }

    b.exogenous("eps_DA", da_noise.support(), da_noise.weights());
    std::vector<std::string> da_parents{"A_D"};
    da_parents.insert(da_parents.end(), l_parent.begin(), l_parent.end());
    da_parents.push_back("eps_DA");
    b.endogenous("D_A", kBinary, da_parents, [=](auto v) {
        const std::size_t l = with_l ? static_cast<std::size_t>(v[1]) : 0;
        return v.back() < da_noise.codes_below(p_da[l][static_cast<std::size_t>(v[0])]) ? 1 : 0;
    });

    b.exogenous("eps_D", d_noise.support(), d_noise.weights());
    std::vector<std::string> d_parents{"D_A"};
    d_parents.insert(d_parents.end(), l_parent.begin(), l_parent.end());
    d_parents.push_back("U");
    d_parents.push_back("eps_D");
    b.endogenous("D", kBinary, d_parents, [=](auto v) {
        const std::size_t l = with_l ? static_cast<std::size_t>(v[1]) : 0;
        const std::size_t u = static_cast<std::size_t>(v[v.size() - 2]);
        return v[0] == 1 || v.back() < d_noise.codes_below(q[l * u_card + u]) ? 1 : 0;
    });

    // Y | A_Y, [L], U, [D]
    std::vector<std::string> y_parents{"A_Y"};
    y_parents.insert(y_parents.end(), l_parent.begin(), l_parent.end());
    y_parents.push_back("U");
    if (!truncation) y_parents.push_back("D");
    const std::size_t configs = 2 * l_card * u_card * (truncation ? 1 : 2);
    CategoricalTable y_table(rng, configs, y_card);
    b.exogenous("eps_Y", y_table.noise.support(), y_table.noise.weights());
    y_parents.push_back("eps_Y");
    b.endogenous("Y", iota_support(static_cast<int>(y_card)), y_parents, [=](auto v) {
        std::size_t config = 0;
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            const std::size_t card = k == 0 ? 2
                                     : (with_l && k == 1) ? l_card
                                     : (y_parents[k] == "U") ? u_card
                                                             : 2;
            config = config * card + static_cast<std::size_t>(v[k]);
        }
        return y_table.value(config, v.back());
    });
    add_roles(b);
    b.truncation(truncation);
    return b.build();
}

}  // namespace

StructuralModel random_fig4_model(std::mt19937_64& rng, const RandomModelOptions& options) {
    for (;;) {
        auto model = draw_model(rng, options, false);
        if (positivity_margin(model, options.positivity_margin, false)) return model;
    }
}

StructuralModel random_fig7_model(std::mt19937_64& rng, const RandomModelOptions& options) {
    for (;;) {
        auto model = draw_model(rng, options, true);
        if (positivity_margin(model, options.positivity_margin, true)) return model;
    }
}

}  // namespace sepfx::zoo
