// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "sepfx/audit.hpp"
#include "sepfx/estimands.hpp"
#include "sepfx/identification.hpp"
#include "sepfx/report.hpp"
#include "sepfx/sampling.hpp"
#include "sepfx/scenario.hpp"
#include "sepfx/zoo.hpp"

using namespace sepfx;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        if (pass) detail = what;  // first failure explains the line
        pass = false;
    }
};

int failures = 0;

void criterion(int number, const char* title, const std::function<Outcome()>& body, double budget_s = 0.0) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (budget_s > 0.0 && seconds >= budget_s) o.require(false, "runtime over budget");
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s (%s) [%.2f s]\n", o.pass ? "PASS" : "FAIL", number, title, o.detail.c_str(),
                seconds);
    std::fflush(stdout);
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Audited {
    StructuralModel model;
    audit::AuditReport report;
};

// Random two-component models whose prop1 audit gate opens; `rejected` counts the rest.
std::vector<Audited> audited_fig4(uint64_t seed, int count, int& rejected) {
    std::mt19937_64 rng(seed);
    std::vector<Audited> out;
    rejected = 0;
    while (static_cast<int>(out.size()) < count) {
        auto m = zoo::random_fig4_model(rng);
        auto r = audit::run_all(m);
        if (!audit::gate_prop1(r).cse) {
            ++rejected;
            continue;
        }
        out.push_back({std::move(m), std::move(r)});
    }
    return out;
}

}  // namespace

int main() {
    const auto suite_start = Clock::now();
    int rejected = 0;
    std::vector<Audited> fig4;

    criterion(
        1, "prop1 functional equals CSE on 200 audited random models",
        [&] {
            Outcome o;
            fig4 = audited_fig4(20240601, 200, rejected);
            double worst = 0.0;
            for (const auto& a : fig4) {
                const double f = identification::prop1_functional(observed_law(a.model)).value;
                const double c0 = estimands::true_cse(a.model, 0), c1 = estimands::true_cse(a.model, 1);
                worst = std::max({worst, std::abs(f - c0), std::abs(f - c1), std::abs(c0 - c1)});
            }
            o.require(worst < 1e-9, "max deviation " + fmt(worst));
            o.detail = o.pass ? "max deviation " + fmt(worst) + ", " + std::to_string(rejected) + " rejected" : o.detail;
            return o;
        },
        30.0);

    criterion(2, "prop1 functional equals SACE on the monotone subset", [&] {
        Outcome o;
        int monotone = 0;
        double worst = 0.0;
        for (const auto& a : fig4) {
            if (!a.report.find("monotonicity")->passed()) continue;
            ++monotone;
            const double f = identification::prop1_functional(observed_law(a.model)).value;
            worst = std::max(worst, std::abs(f - estimands::true_sace(a.model)));
        }
        o.require(monotone > 0, "no monotone models in the suite");
        o.require(worst < 1e-9, "max deviation " + fmt(worst));
        if (o.pass) o.detail = std::to_string(monotone) + " monotone models, max deviation " + fmt(worst);
        return o;
    });

    criterion(3, "prop3 functional equals CSE on 200 random models with L", [&] {
        Outcome o;
        std::mt19937_64 rng(20240602);
        double worst = 0.0;
        int used = 0;
        while (used < 200) {
            const auto m = zoo::random_fig7_model(rng);
            if (!audit::gate_prop3(audit::run_all(m)).cse) continue;
            ++used;
            const auto law = observed_law(m);
            for (int ap : {0, 1})
                worst = std::max(worst, std::abs(identification::prop3_functional(law, ap).value -
                                                 estimands::true_cse(m, ap)));
        }
        o.require(worst < 1e-9, "max deviation " + fmt(worst));
        zoo::WithLParams flat;
        flat.p_l = {0.0, 0.0};
        const auto law = observed_law(zoo::build_with_l(flat));
        const double p1 = identification::prop1_functional(law).value;
        o.require(identification::prop3_functional(law, 0).value == p1 &&
                      identification::prop3_functional(law, 1).value == p1,
                  "degenerate L differs from the unstratified functional");
        if (o.pass) o.detail = "max deviation " + fmt(worst) + ", degenerate L exact";
        return o;
    });

    criterion(4, "lemma audits across fixtures and random models", [&] {
        Outcome o;
        double l1 = 0.0, l2 = 0.0;
        int checked = 0;
        auto lemmas = [&](const StructuralModel& m) {
            const auto ms = audit::audit_multiplicative_survival(m);
            const auto pi = audit::audit_posterior_invariance(m);
            o.require(ms.status != audit::Status::inconclusive && pi.status != audit::Status::inconclusive,
                      "inconclusive lemma audit");
            l1 = std::max(l1, ms.residual);
            l2 = std::max(l2, pi.residual);
            ++checked;
        };
        lemmas(zoo::build_surgery());
        for (double a : {0.0, 0.1, 0.5, 0.9})
            for (double b : {0.0, 0.2, 0.7})
                for (double c : {0.0, 0.3, 0.6})
                    for (double u : {0.2, 0.5}) {
                        zoo::PieParams p;
                        p.p = {a, b, c, 0.1, 0.2, 0.15};
                        p.p_u = u;
                        lemmas(zoo::build_pie(p));
                    }
        for (const auto& a : fig4) lemmas(a.model);
        o.require(l1 < 1e-12, "multiplicative survival residual " + fmt(l1));
        o.require(l2 < 1e-9, "posterior invariance residual " + fmt(l2));

        int monotone = 0;
        std::vector<StructuralModel> mono = {zoo::build_surgery(), zoo::build_adherence(), zoo::build_birthweight()};
        for (const auto& a : fig4) mono.push_back(a.model);
        for (const auto& m : mono) {
            if (!audit::audit_monotonicity(m).passed()) continue;
            ++monotone;
            o.require(audit::audit_event_equivalence(m).passed(), "event equivalence fails on a monotone model");
        }
        if (o.pass)
            o.detail = std::to_string(checked) + " models, survival " + fmt(l1) + ", posterior " + fmt(l2) + ", event equivalence on " +
                       std::to_string(monotone) + " monotone models";
        return o;
    });

    criterion(5, "violation sensitivity on toy1V", [] {
        Outcome o;
        const auto m = zoo::build_violation();
        const double f = identification::prop1_functional(observed_law(m)).value;
        const double cse = estimands::true_cse(m, 0);
        o.require(std::abs(f - 0.379487) < 1e-6, "functional " + fmt(f));
        o.require(std::abs(cse - 0.4) < 1e-12, "true CSE " + fmt(cse));
        o.require(std::abs(f - cse) > 0.01, "bias too small");
        const auto ms = audit::audit_multiplicative_survival(m);
        o.require(ms.status == audit::Status::fail && ms.residual > 0.01, "multiplicative survival did not fail");
        const auto bundle = cli::build_report(cli::fixture_scenario("toy1V"), {});
        bool gated = false;
        for (const auto& row : bundle.identify)
            if (row.functional == "prop1") gated = row.interpretation.rfind("no causal interpretation", 0) == 0;
        o.require(gated, "report does not gate prop1");
        if (o.pass) o.detail = "functional " + std::to_string(f) + ", bias " + fmt(f - cse) + ", residual " + fmt(ms.residual);
        return o;
    });

    criterion(6, "birth-weight paradox sign pattern", [] {
        Outcome o;
        const auto m = zoo::build_birthweight();
        const auto law = observed_law(m);
        const double low = estimands::naive_contrast(law, 1), normal = estimands::naive_contrast(law, 0);
        const double cse = estimands::true_cse(m, 0), marginal = estimands::marginal_contrast(law);
        o.require(low <= -0.15, "contrast among D=1 " + fmt(low));
        o.require(std::abs(normal - cse) < 1e-9 && std::abs(normal - 0.02) < 1e-9, "contrast among D=0 " + fmt(normal));
        o.require(marginal > 0.0, "marginal " + fmt(marginal));
        if (o.pass) o.detail = "D=1 " + std::to_string(low) + ", D=0 " + std::to_string(normal) + ", marginal " + fmt(marginal);
        return o;
    });

    criterion(7, "adherence calibration to the published marginals", [] {
        Outcome o;
        const auto fit = zoo::calibrate_adherence(zoo::CalibrationTarget::published());
        const auto got = zoo::adherence_moments(fit.model);
        const double want[4] = {0.225, 0.399, 0.107, 0.156};
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
        o.require(worst < 1e-6, "max residual " + fmt(worst));
        o.require(audit::audit_monotonicity(fit.model).passed(), "monotonicity audit failed");
        if (o.pass) o.detail = "max residual " + fmt(worst) + " after " + std::to_string(fit.sweeps) + " sweeps";
        return o;
    });

    criterion(8, "response types", [] {
        Outcome o;
        const auto t = audit::classify_response_types(zoo::build_surgery());
        o.require(std::abs(t.compliers - 0.6) < 1e-12 && std::abs(t.never_takers - 0.15) < 1e-12 &&
                      std::abs(t.defiers - 0.25) < 1e-12 && std::abs(t.always_takers) < 1e-12,
                  "toy1 proportions");
        o.require(std::abs(t.total() - 1.0) < 1e-12, "toy1 proportions do not sum to 1");
        std::mt19937_64 rng(20240603);
        zoo::RandomModelOptions opts;
        opts.monotonicity = zoo::Monotonicity::monotone;
        double worst_sum = 0.0, worst_always = 0.0;
        for (int i = 0; i < 200; ++i) {
            const auto m = zoo::random_fig4_model(rng, opts);
            o.require(audit::audit_monotonicity(m).passed(), "random monotone model fails monotonicity");
            const auto r = audit::classify_response_types(m);
            worst_always = std::max(worst_always, r.always_takers);
            worst_sum = std::max(worst_sum, std::abs(r.total() - 1.0));
        }
        o.require(worst_always == 0.0, "always-takers " + fmt(worst_always));
        o.require(worst_sum < 1e-12, "sum deviation " + fmt(worst_sum));
        if (o.pass) o.detail = "toy1 exact, 200 monotone models with no always-takers, sum deviation " + fmt(worst_sum);
        return o;
    });

    criterion(9, "Monte Carlo coverage and reproducibility", [] {
        Outcome o;
        const auto m = zoo::build_surgery();
        const double exact = identification::prop1_functional(observed_law(m)).value;
        int covered = 0;
        for (uint64_t seed = 1; seed <= 20; ++seed) {
            const auto est = identification::plug_in(sample_dataset(m, 1000000, seed), identification::Functional::prop1());
            covered += std::abs(est.point - exact) < 4 * est.standard_error;
        }
        o.require(covered >= 19, std::to_string(covered) + "/20 within 4 SE");

        cli::RunOptions run;
        run.seed = 42;
        run.n = 100000;
        const auto base = fs::temp_directory_path() / ("sepfx_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(base);
        const auto scenario = cli::fixture_scenario("toy1");
        cli::write_report(cli::build_report(scenario, run), base / "a");
        cli::write_report(cli::build_report(scenario, run), base / "b");
        int files = 0;
        for (const auto& entry : fs::directory_iterator(base / "a")) {
            ++files;
            o.require(slurp(entry.path()) == slurp(base / "b" / entry.path().filename()),
                      entry.path().filename().string() + " differs between runs");
        }
        fs::remove_all(base);
        if (o.pass) o.detail = std::to_string(covered) + "/20 within 4 SE, " + std::to_string(files) + " report files identical";
        return o;
    });

    const double total = std::chrono::duration<double>(Clock::now() - suite_start).count();
    const bool in_budget = total < 300.0;
    if (!in_budget) ++failures;
    std::printf("%s full suite runtime %.2f s (budget 300 s)\n", in_budget ? "PASS" : "FAIL", total);
    return failures == 0 ? 0 : 1;
}
