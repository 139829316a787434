#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "sepfx/csv.hpp"
#include "sepfx/report.hpp"
#include "sepfx/scenario.hpp"

using namespace sepfx;
using namespace sepfx::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sepfx_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::string& args) {
    const auto dir = scratch("run");
    const std::string cmd = std::string(SEPFX_BINARY) + " " + args + " >" + (dir / "out").string() + " 2>" +
                            (dir / "err").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "out"), slurp(dir / "err")};
}

std::string scenario(const std::string& name) { return std::string(SEPFX_SCENARIOS) + "/" + name + ".json"; }

bool same_law(const ObservedLaw& a, const ObservedLaw& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (a.probability(i) != b.probability(i)) return false;
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (a.cell(i, c) != b.cell(i, c)) return false;
    }
    return true;
}

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

ParseError parse_error(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error");
    return ParseError(0, "", "");
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_SUITE("scenario files") {
    TEST_CASE("every fixture round-trips to an identical observed law") {
        for (const auto& name : zoo::fixture_names()) {
            CAPTURE(name);
            const auto s = fixture_scenario(name);
            const auto text = export_scenario(s);
            const auto back = parse_scenario(text);
            CHECK(same_law(observed_law(s.model), observed_law(back.model)));
            CHECK(export_scenario(back) == text);
            CHECK(back.name == name);
            CHECK(scenario_hash(back) == scenario_hash(s));
        }
    }

    TEST_CASE("shipped scenario files match the fixtures") {
        for (const auto& name : zoo::fixture_names()) {
            CAPTURE(name);
            CHECK(slurp(scenario(name)) == export_scenario(fixture_scenario(name)));
        }
    }

    TEST_CASE("missing role names line and key") {
        const auto text = slurp(scenario("toy1"));
        const auto broken = replace_once(text, "\"D\": \"D\", ", "");
        const auto e = parse_error(broken);
        CHECK(e.path() == "roles.D");
        CHECK(std::string(e.what()).find("missing role D") != std::string::npos);
        const auto lines = lines_of(broken);
        REQUIRE(e.line() >= 1);
        CHECK(lines[e.line() - 1].find("\"roles\"") != std::string::npos);
    }

    TEST_CASE("unknown keys are rejected at every level") {
        const auto text = slurp(scenario("toy1"));
        CHECK(parse_error(replace_once(text, "\"truncation\": true", "\"truncation\": true, \"extra\": 1")).path() ==
              "extra");
        const auto nested = parse_error(replace_once(text, "\"parents\": [\"eps_A\"]", "\"parentz\": [\"eps_A\"]"));
        CHECK(nested.path().find("mechanisms.A") == 0);
        const auto var = parse_error(replace_once(text, "\"kind\": \"exogenous\"}", "\"kind\": \"exogenous\", \"x\": 0}"));
        CHECK(var.line() == 5);
        const auto role = parse_error(replace_once(text, "\"U\": \"U\"", "\"Q\": \"U\""));
        CHECK(role.path() == "roles.Q");
    }

    TEST_CASE("syntax errors report the line") {
        const auto text = slurp(scenario("toy1"));
        const auto e = parse_error(replace_once(text, "\"description\": ", "\"description\" "));
        CHECK(e.line() == 3);
        CHECK(e.code() == ErrorCode::parse);
    }

    TEST_CASE("model errors map to key paths") {
        const auto text = slurp(scenario("toy1"));
        const auto partial = parse_error(replace_once(text, "\"table\": [0, 0, 0, 1, 1, 1, 1, 1]", "\"table\": [0, 0, 0]"));
        CHECK(partial.path().find("mechanisms.D") == 0);
        CHECK(std::string(partial.what()).find("partial table for D") != std::string::npos);
        const auto norm = parse_error(replace_once(text, "\"U\": [0.5, 0.5]", "\"U\": [0.5, 0.6]"));
        CHECK(norm.path().find("noise.U") == 0);
        CHECK(std::string(norm.what()).find("normalization") != std::string::npos);
    }

    TEST_CASE("calibration block") {
        const auto s = fixture_scenario("adherence");
        REQUIRE(s.calibration);
        const auto r = calibration_residuals(s);
        REQUIRE(r);
        for (double x : *r) CHECK(std::abs(x) < 1e-6);
        CHECK_FALSE(calibration_residuals(fixture_scenario("toy1")));

        auto moved = s;
        moved.calibration->y1_a1 = 0.2;
        CHECK(std::abs((*calibration_residuals(moved))[2]) > 0.05);
    }
}

TEST_SUITE("csv") {
    TEST_CASE("dataset round-trip keeps undefined outcomes") {
        const auto data = sample_dataset(zoo::build_surgery(), 2000, 11);
        std::stringstream text;
        write_dataset_csv(data, text);
        const auto load = read_dataset_csv(text);
        CHECK(load.rejected.empty());
        CHECK(load.data.columns == data.columns);
        CHECK(load.data.cells == data.cells);
        CHECK(load.data.n == data.n);
        CHECK_FALSE(load.data.seed);
    }

    TEST_CASE("with_l round-trip") {
        const auto data = sample_dataset(zoo::build_with_l(), 500, 2);
        std::stringstream text;
        write_dataset_csv(data, text);
        CHECK(read_dataset_csv(text).data.cells == data.cells);
    }

    TEST_CASE("row rejections and header errors") {
        std::istringstream in("A,D,Y\n1,0,1\n1,0,\n0,1,\n0,0,x\n0,0,0,9\n0,0,0\n");
        const auto load = read_dataset_csv(in);
        CHECK(load.data.n == 3);
        REQUIRE(load.rejected.size() == 3);
        CHECK(load.rejected[0].line == 3);
        CHECK(load.rejected[1].line == 5);
        CHECK(load.rejected[2].line == 6);

        std::istringstream no_y("A,D\n1,0\n");
        CHECK_THROWS_AS(read_dataset_csv(no_y), ParseError);
        std::istringstream empty("");
        CHECK_THROWS_AS(read_dataset_csv(empty), ParseError);
    }

    TEST_CASE("formatting") {
        for (double x : {0.1, 1.0 / 3.0, -0.198918918918913, 1e-300, 12345.678})
            CHECK(std::stod(format_double(x)) == x);
        CHECK(csv_field("plain") == "plain");
        CHECK(csv_field("a,b") == "\"a,b\"");
        CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    }

    TEST_CASE("plug-in on a reloaded sample equals the in-memory estimate") {
        const auto data = sample_dataset(zoo::build_with_l(), 20000, 5);
        std::stringstream text;
        write_dataset_csv(data, text);
        const auto reloaded = read_dataset_csv(text).data;
        for (const auto& f : {identification::Functional::prop1(), identification::Functional::prop3(1)}) {
            const auto a = identification::plug_in(data, f), b = identification::plug_in(reloaded, f);
            CHECK(a.point == b.point);
            CHECK(a.standard_error == b.standard_error);
        }
    }
}

TEST_SUITE("report") {
    TEST_CASE("birthweight identify rows") {
        const auto s = fixture_scenario("birthweight");
        const auto b = build_report(s, {});
        std::map<std::string, IdentifyRow> rows;
        for (const auto& r : b.identify) rows[r.functional] = r;
        REQUIRE(rows.count("naive_d1"));
        CHECK(*rows["naive_d1"].value == doctest::Approx(-0.198918919).epsilon(1e-8));
        CHECK(std::abs(*rows["naive_d0"].value - 0.02) < 1e-9);
        CHECK(std::abs(*rows["naive_d0"].value - b.truth.cse0) < 1e-9);
        CHECK(*rows["marginal"].value > 0.0);
        CHECK(rows["naive_d1"].interpretation == "descriptive contrast; no causal interpretation");
        CHECK(rows["prop1"].interpretation == "CSE(0)=CSE(1); SACE");
    }

    TEST_CASE("adherence moments") {
        const auto b = build_report(fixture_scenario("adherence"), {});
        CHECK(std::abs(b.moments.d0_a1 - 0.225) < 1e-6);
        CHECK(std::abs(b.moments.d0_a0 - 0.399) < 1e-6);
        CHECK(std::abs(*b.moments.y_a1 - 0.107) < 1e-6);
        CHECK(std::abs(*b.moments.y_a0 - 0.156) < 1e-6);
    }

    TEST_CASE("gating honesty") {
        std::vector<Scenario> scenarios;
        for (const auto& name : zoo::fixture_names()) scenarios.push_back(fixture_scenario(name));
        std::mt19937_64 rng(61);
        zoo::RandomModelOptions non;
        non.monotonicity = zoo::Monotonicity::non_monotone;
        for (int i = 0; i < 15; ++i) {
            scenarios.push_back({"r4", "", zoo::random_fig4_model(rng, non), std::nullopt});
            scenarios.push_back({"r7", "", zoo::random_fig7_model(rng), std::nullopt});
        }
        // Violations layered on a random model: the outcome component leaks into D.
        auto leaky = zoo::random_fig4_model(rng);
        const auto& d = leaky.role_variable(role::D);
        const auto old = *leaky.find_mechanism(d);
        std::vector<std::size_t> sizes;
        for (const auto& p : old.parents) sizes.push_back(leaky.variable(p).support.size());
        auto parents = old.parents;
        parents.push_back(leaky.role_variable(role::A_Y));
        retabulate(leaky, d, parents, [&](auto v) {
            if (v.back() == 1) return 1;
            std::size_t row = 0;
            for (std::size_t k = 0; k < sizes.size(); ++k) {
                const auto& support = leaky.variable(old.parents[k]).support;
                row = row * sizes[k] + static_cast<std::size_t>(std::find(support.begin(), support.end(), v[k]) - support.begin());
            }
            return old.table[row];
        });
        scenarios.push_back({"leaky", "", leaky, std::nullopt});

        for (const auto& s : scenarios) {
            const auto b = build_report(s, {});
            const auto passed = [&](const char* name) {
                const auto* c = b.audit.find(name);
                return c && c->passed();
            };
            for (const auto& row : b.identify) {
                CAPTURE(row.functional);
                CAPTURE(row.interpretation);
                const bool causal = row.interpretation.find("CSE") != std::string::npos;
                if (row.functional.rfind("naive", 0) == 0 || row.functional == "marginal") CHECK_FALSE(causal);
                if (row.functional == "prop1" && causal) {
                    for (const char* n : {"structure", "positivity", "determinism", "decomposition",
                                          "multiplicative_survival", "posterior_invariance"})
                        CHECK(passed(n));
                    if (row.interpretation.find("SACE") != std::string::npos) {
                        CHECK(passed("monotonicity"));
                        CHECK(passed("crossworld"));
                    }
                }
                if (row.functional.rfind("prop3", 0) == 0 && causal)
                    for (const char* n : {"structure", "positivity_l", "determinism", "decomposition"}) CHECK(passed(n));
                if (!causal && row.functional.rfind("prop", 0) == 0)
                    CHECK(row.interpretation.find("no causal interpretation") == 0);
            }
        }
    }

    TEST_CASE("reports are byte-identical across runs") {
        const auto s = fixture_scenario("with_l");
        RunOptions o;
        o.seed = 9;
        o.n = 5000;
        const auto d1 = scratch("rep1"), d2 = scratch("rep2");
        write_report(build_report(s, o), d1);
        write_report(build_report(s, o), d2);
        for (const auto& f : {"summary.txt", "audit.csv", "truth.csv", "identify.csv", "provenance.csv", "sample.csv",
                              "estimates.csv"}) {
            CAPTURE(f);
            REQUIRE(fs::exists(d1 / f));
            CHECK(slurp(d1 / f) == slurp(d2 / f));
        }
        o.seed = 10;
        const auto d3 = scratch("rep3");
        write_report(build_report(s, o), d3);
        CHECK(slurp(d1 / "sample.csv") != slurp(d3 / "sample.csv"));
        CHECK(slurp(d1 / "provenance.csv").find("seed,9") != std::string::npos);
    }
}

TEST_SUITE("command line") {
    TEST_CASE("check exit codes") {
        CHECK(run("check " + scenario("toy1")).code == 0);
        const auto warn = run("check " + scenario("toy1V"));
        CHECK(warn.code == 0);
        CHECK(warn.err.find("warning") != std::string::npos);
        const auto strict = run("--strict check " + scenario("toy1V"));
        CHECK(strict.code == 2);
        CHECK(strict.out.find("failed: structure multiplicative_survival posterior_invariance") != std::string::npos);

        const auto dir = scratch("malformed");
        spit(dir / "bad.json", replace_once(slurp(scenario("toy1")), "\"D\": \"D\", ", ""));
        const auto bad = run("check " + (dir / "bad.json").string());
        CHECK(bad.code == 1);
        CHECK(bad.err.find("key roles.D") != std::string::npos);
        CHECK(run("check /nonexistent/file.json").code == 1);
    }

    TEST_CASE("calibration mismatch exits 3 with residuals") {
        const auto dir = scratch("calib");
        spit(dir / "adh.json", replace_once(slurp(scenario("adherence")), "0.107", "0.2"));
        const auto r = run("report " + (dir / "adh.json").string());
        CHECK(r.code == 3);
        CHECK(r.err.find("residual P(Y=1|A=1)") != std::string::npos);
        CHECK(run("truth " + scenario("adherence")).code == 0);
    }

    TEST_CASE("estimate matches in-process plug-in") {
        const auto dir = scratch("estimate");
        CHECK(run("--n 3000 --seed 4 --out " + dir.string() + " sample " + scenario("toy1")).code == 0);
        const auto r = run("estimate " + (dir / "sample.csv").string());
        CHECK(r.code == 0);
        const auto est =
            identification::plug_in(sample_dataset(zoo::build_surgery(), 3000, 4), identification::Functional::prop1());
        CHECK(r.out.find("point," + format_double(est.point)) != std::string::npos);
        CHECK(r.out.find("standard_error," + format_double(est.standard_error)) != std::string::npos);
    }

    TEST_CASE("hand-written exact 2x2 law") {
        const auto dir = scratch("hand");
        spit(dir / "d.csv", "A,D,Y\n1,0,1\n1,0,0\n0,0,0\n0,1,\n");
        const auto r = run("estimate " + (dir / "d.csv").string());
        CHECK(r.code == 0);
        CHECK(r.out.find("point,0.5\n") != std::string::npos);
    }

    TEST_CASE("blank outcome at D=0 is rejected with a diagnostic") {
        const auto dir = scratch("blank");
        spit(dir / "d.csv", "A,D,Y\n1,0,1\n1,0,\n0,0,0\n");
        const auto r = run("estimate " + (dir / "d.csv").string());
        CHECK(r.code == 0);
        CHECK(r.err.find("rejected row at line 3") != std::string::npos);
        CHECK(r.out.find("rejected_rows,1") != std::string::npos);
    }

    TEST_CASE("empty stratum exits 2") {
        const auto dir = scratch("empty");
        spit(dir / "d.csv", "A,D,Y\n1,1,\n0,0,1\n");
        const auto r = run("estimate " + (dir / "d.csv").string());
        CHECK(r.code == 2);
        CHECK(r.err.find("A=1,D=0") != std::string::npos);
        spit(dir / "l.csv", "A,D,Y,L\n1,0,1,0\n0,0,1,0\n1,0,1,1\n");
        CHECK(run("estimate --functional prop3:1 " + (dir / "l.csv").string()).code == 2);
    }

    TEST_CASE("argument errors exit 1") {
        CHECK(run("sample " + scenario("toy1")).code == 1);
        CHECK(run("export-scenario nope").code == 1);
        CHECK(run("frobnicate").code == 1);
        CHECK(run("estimate --functional prop9 x.csv").code == 1);
        CHECK(run("--help").code == 0);
    }

    TEST_CASE("export-scenario writes the shipped file") {
        const auto r = run("export-scenario pie");
        CHECK(r.code == 0);
        CHECK(r.out == slurp(scenario("pie")));
    }

    TEST_CASE("report files are byte-identical across invocations") {
        const auto a = scratch("cli_a"), b = scratch("cli_b");
        CHECK(run("--n 2000 --seed 7 --out " + a.string() + " report " + scenario("birthweight")).code == 0);
        CHECK(run("--n 2000 --seed 7 --out " + b.string() + " report " + scenario("birthweight")).code == 0);
        for (const auto& entry : fs::directory_iterator(a)) {
            CAPTURE(entry.path().filename().string());
            CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
        }
    }

    TEST_CASE("identify and response-types") {
        const auto id = run("identify " + scenario("toy1V"));
        CHECK(id.code == 0);
        CHECK(id.out.find("no causal interpretation; audits failed") != std::string::npos);
        const auto rt = run("response-types " + scenario("toy1"));
        CHECK(rt.code == 0);
        CHECK(rt.out.find("always_takers,0\n") != std::string::npos);
        CHECK(rt.out.find("inadmissible_patterns,0") != std::string::npos);
        CHECK(run("--strict report " + scenario("toy1V")).code == 2);
        CHECK(run("report " + scenario("toy1V")).code == 0);
    }
}
