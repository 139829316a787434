#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sepfx/audit.hpp"
#include "sepfx/estimands.hpp"
#include "sepfx/identification.hpp"
#include "sepfx/zoo.hpp"
#include "support/oracle.hpp"

using namespace sepfx;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::parse;
}

}  // namespace

TEST_SUITE("true_cse") {
    TEST_CASE("toy1 both arms") {
        const auto m = zoo::build_surgery();
        CHECK(std::abs(estimands::true_cse(m, 0) - 0.4) < 1e-12);
        CHECK(std::abs(estimands::true_cse(m, 1) - estimands::true_cse(m, 0)) < 1e-12);
    }

    TEST_CASE("null effect") {
        for (bool trunc : {true, false}) {
            const auto m = zoo::build_null_effect(trunc);
            CHECK(estimands::true_cse(m, 0) == 0.0);
            CHECK(estimands::true_cse(m, 1) == 0.0);
        }
    }

    TEST_CASE("errors") {
        auto m = zoo::build_surgery();
        CHECK(code_of([&] { estimands::true_cse(m, 2); }) == ErrorCode::invalid_argument);
        m.roles.erase(role::A_Y);
        CHECK(code_of([&] { estimands::true_cse(m, 0); }) == ErrorCode::missing_role);

        zoo::SurgeryParams p;
        p.da_cut = 5;  // D_A = A_D, so nobody is event-free under A_D = 1
        const auto dead = zoo::build_surgery(p);
        CHECK(code_of([&] { estimands::true_cse(dead, 1); }) == ErrorCode::positivity);
        CHECK(std::abs(estimands::true_cse(dead, 0) - 0.4) < 1e-12);
    }

    TEST_CASE("matches the reference evaluator on every fixture") {
        for (const auto& name : zoo::fixture_names()) {
            CAPTURE(name);
            const auto m = zoo::build_fixture(name);
            for (int ap : {0, 1}) CHECK(std::abs(estimands::true_cse(m, ap) - oracle::cse(m, ap)) < 1e-12);
        }
    }
}

TEST_SUITE("true_sace") {
    TEST_CASE("toy1") {
        const auto m = zoo::build_surgery();
        CHECK(std::abs(estimands::true_sace(m) - 0.4) < 1e-12);
        CHECK(std::abs(estimands::always_event_free_probability(m) - 0.6) < 1e-12);
        const double p_free_treated =
            oracle::prob(m, [](const oracle::World& w) { return w.value("D", {{"A", 1}}) == 0; });
        CHECK(std::abs(estimands::always_event_free_probability(m) - p_free_treated) < 1e-12);
    }

    TEST_CASE("null effect and empty stratum") {
        CHECK(estimands::true_sace(zoo::build_null_effect()) == 0.0);
        zoo::SurgeryParams p;
        p.da_cut = 5;
        p.p_death_u = 1.0;
        p.p_u = 1.0;  // everyone dies under both arms
        CHECK(code_of([&] { estimands::true_sace(zoo::build_surgery(p)); }) == ErrorCode::positivity);
    }

    TEST_CASE("matches the reference evaluator on every fixture") {
        for (const auto& name : zoo::fixture_names()) {
            CAPTURE(name);
            const auto m = zoo::build_fixture(name);
            CHECK(std::abs(estimands::true_sace(m) - oracle::sace(m)) < 1e-12);
        }
    }
}

TEST_SUITE("true_ate") {
    TEST_CASE("birthweight and null") {
        CHECK(std::abs(estimands::true_ate(zoo::build_birthweight()) - 0.02) < 1e-12);
        CHECK(estimands::true_ate(zoo::build_null_effect(false)) == 0.0);
        const auto m = zoo::build_adherence();
        CHECK(std::abs(estimands::true_ate(m) - oracle::ate(m)) < 1e-12);
    }

    TEST_CASE("refuses under truncation") {
        try {
            estimands::true_ate(zoo::build_surgery());
            FAIL("expected refusal");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::undefined_due_to_truncation);
            CHECK(std::string(e.what()).find("undefined-due-to-truncation") != std::string::npos);
        }
    }
}

TEST_SUITE("naive_contrast") {
    TEST_CASE("examples") {
        const auto bw = observed_law(zoo::build_birthweight());
        CHECK(estimands::naive_contrast(bw, 1) == doctest::Approx(-0.199).epsilon(0.001));
        CHECK(std::abs(estimands::naive_contrast(bw, 0) - 0.02) < 1e-12);
        CHECK(std::abs(estimands::naive_contrast(observed_law(zoo::build_surgery()), 0) - 0.4) < 1e-12);
    }

    TEST_CASE("errors") {
        const auto toy = observed_law(zoo::build_surgery());
        CHECK(code_of([&] { estimands::naive_contrast(toy, 1); }) == ErrorCode::truncated_outcome);
        CHECK(code_of([&] { estimands::marginal_contrast(toy); }) == ErrorCode::truncated_outcome);
        zoo::BirthweightParams p;
        p.p_u = 0.0;
        p.da_cut = 0;  // nobody has low birth weight
        const auto law = observed_law(zoo::build_birthweight(p));
        CHECK(code_of([&] { estimands::naive_contrast(law, 1); }) == ErrorCode::positivity);
    }
}

TEST_SUITE("report") {
    TEST_CASE("toy1 fields") {
        const auto r = estimands::compute_report(zoo::build_surgery());
        CHECK(std::abs(r.cse0 - 0.4) < 1e-12);
        CHECK(std::abs(r.cse1 - 0.4) < 1e-12);
        REQUIRE(r.sace);
        CHECK(std::abs(*r.sace - 0.4) < 1e-12);
        CHECK_FALSE(r.ate);
        CHECK_FALSE(r.naive_d1);
        CHECK_FALSE(r.marginal);
        REQUIRE(r.naive_d0);
        CHECK(std::abs(*r.naive_d0 - 0.4) < 1e-12);
        CHECK_FALSE(r.provenance.empty());
    }

    TEST_CASE("ate is absent iff truncation is set") {
        for (const auto& name : zoo::fixture_names()) {
            CAPTURE(name);
            const auto m = zoo::build_fixture(name);
            const auto r = estimands::compute_report(m);
            CHECK(r.ate.has_value() == !m.truncation);
            for (double v : {r.cse0, r.cse1, r.always_event_free}) CHECK(std::isfinite(v));
        }
    }
}

TEST_SUITE("properties") {
    TEST_CASE("scale equivariance") {
        for (int k : {2, 4, 3}) {
            CAPTURE(k);
            for (const auto& name : {"toy1", "birthweight", "with_l", "toy1V"}) {
                CAPTURE(name);
                const auto m = zoo::build_fixture(name);
                const auto s = zoo::scaled_outcome(m, k);
                const auto a = estimands::compute_report(m), b = estimands::compute_report(s);
                CHECK(b.cse0 == doctest::Approx(k * a.cse0).epsilon(1e-12));
                CHECK(b.cse1 == doctest::Approx(k * a.cse1).epsilon(1e-12));
                CHECK(*b.sace == doctest::Approx(k * *a.sace).epsilon(1e-12));
                CHECK(*b.naive_d0 == doctest::Approx(k * *a.naive_d0).epsilon(1e-12));
                CHECK(b.ate.has_value() == a.ate.has_value());
                if (a.ate) CHECK(*b.ate == doctest::Approx(k * *a.ate).epsilon(1e-12));
                if (a.naive_d1) CHECK(*b.naive_d1 == doctest::Approx(k * *a.naive_d1).epsilon(1e-12));
            }
        }
        CHECK_THROWS_AS(zoo::scaled_outcome(zoo::build_surgery(), 0), Error);
    }

    TEST_CASE("audited random models have CSE(0) = CSE(1)") {
        std::mt19937_64 rng(17);
        int audited = 0;
        for (int i = 0; i < 200; ++i) {
            const auto m = zoo::random_fig4_model(rng);
            if (!audit::gate_prop1(audit::run_all(m)).cse) continue;
            ++audited;
            CHECK(std::abs(estimands::true_cse(m, 0) - estimands::true_cse(m, 1)) < 1e-9);
        }
        CHECK(audited == 200);
    }

    TEST_CASE("monotone models: always-event-free stratum equals the treated event-free set") {
        std::mt19937_64 rng(23);
        zoo::RandomModelOptions opts;
        opts.monotonicity = zoo::Monotonicity::monotone;
        for (int i = 0; i < 100; ++i) {
            const auto m = zoo::random_fig4_model(rng, opts);
            REQUIRE(audit::audit_monotonicity(m).passed());
            const double treated_free =
                oracle::prob(m, [](const oracle::World& w) { return w.value("D", {{"A", 1}}) == 0; });
            CHECK(std::abs(estimands::always_event_free_probability(m) - treated_free) < 1e-12);
        }
    }

    TEST_CASE("violation: estimand unmoved, naive contrast biased") {
        const auto m = zoo::build_violation();
        CHECK(std::abs(estimands::true_cse(m, 0) - 0.4) < 1e-12);
        CHECK(std::abs(estimands::naive_contrast(observed_law(m), 0) - 0.4) > 0.01);
    }

    TEST_CASE("ternary outcome random models agree with the reference evaluator") {
        std::mt19937_64 rng(99);
        int ternary = 0;
        for (int i = 0; i < 60; ++i) {
            const auto m = zoo::random_fig4_model(rng);
            if (m.variable(m.role_variable(role::Y)).support.size() == 3) ++ternary;
            for (int ap : {0, 1}) CHECK(std::abs(estimands::true_cse(m, ap) - oracle::cse(m, ap)) < 1e-12);
            CHECK(std::abs(estimands::true_sace(m) - oracle::sace(m)) < 1e-12);
        }
        CHECK(ternary > 0);
    }
}
