#include <doctest.h>

#include <array>
#include <cstdio>
#include <string>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out; // stdout and stderr interleaved
};

// Run the installed driver with the given arguments and capture its output.
RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(WILDRAM_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    int status = pclose(pipe);
    r.exit_code = WEXITSTATUS(status);
    return r;
}

std::string fixture(const char* name) {
    return std::string(WILDRAM_FIXTURE_DIR "/") + name;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("ramification subcommand prints the derived data") {
    RunResult r = run_cli("ram --p 5 --n 2 --m 1 --lower 1,21");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "upper jumps: 1, 5"));
    CHECK(contains(r.out, "conductor: 5"));
    CHECK(contains(r.out, "different degree: 128 (lower) / 128 (upper)"));

    // the same filtration handed over in upper form round-trips
    RunResult u = run_cli("ram --p 5 --n 2 --m 1 --upper 1,5");
    CHECK(u.exit_code == 0);
    CHECK(contains(u.out, "lower jumps: 1, 21"));
}

TEST_CASE("graph check distinguishes clean and broken input") {
    RunResult ok = run_cli("graph check " + fixture("pgl3.json"));
    CHECK(ok.exit_code == 0);
    CHECK(contains(ok.out, "all checks passed"));

    RunResult bad = run_cli("graph check " + fixture("broken_global.json"));
    CHECK(bad.exit_code == 1);
    CHECK(contains(bad.out, "FAIL: 3 violations"));

    RunResult alpha = run_cli("graph check " + fixture("sl2_tower.json") + " --alpha 2");
    CHECK(alpha.exit_code == 0);
    CHECK(contains(alpha.out, "equality"));
}

TEST_CASE("group analysis reports the p-part") {
    RunResult r = run_cli("analyze-group \"sl2 q=11\" --p 5");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "order 1320"));
    CHECK(contains(r.out, "cyclic"));
}

TEST_CASE("congruence solver output") {
    RunResult r = run_cli("hensel --p 7 --n 2 --smallest-prime-power");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "classes mod 7: 2, 4"));
    CHECK(contains(r.out, "67"));

    RunResult none = run_cli("hensel --p 5");
    CHECK(none.exit_code == 1);
}

TEST_CASE("enumeration counts admissible configurations") {
    RunResult r = run_cli("graph enumerate --p 5 --m 2 --wild-branch 2");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "4 admissible etale tail configurations"));
}

TEST_CASE("monodromy report verdict and exit semantics") {
    RunResult good = run_cli("graph report " + fixture("pgl3.json") + " --e-abs 1");
    CHECK(good.exit_code == 0);
    CHECK(contains(good.out, "verdict: potentially good reduction"));

    RunResult contra =
        run_cli("graph report " + fixture("pgl3.json") + " --e-abs 1 --bad-reduction");
    CHECK(contra.exit_code == 1);
    CHECK(contains(contra.out, "inconsistent"));
}

TEST_CASE("worked evaluation honest failure modes") {
    RunResult lax = run_cli("appendix-a --r 2 --prec 5");
    CHECK(lax.exit_code == 0);
    CHECK(contains(lax.out, "FAILS")); // the reference mismatch is reported either way

    RunResult strict = run_cli("appendix-a --r 2 --prec 5 --strict");
    CHECK(strict.exit_code == 1);
}

TEST_CASE("json output is deterministic byte for byte") {
    RunResult a = run_cli("--json ram --p 3 --n 3 --m 2 --lower 1,4,13");
    RunResult b = run_cli("ram --json --p 3 --n 3 --m 2 --lower 1,4,13");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(contains(a.out, "\"conductor\""));
}

TEST_CASE("usage and input errors use distinct exit codes") {
    RunResult missing = run_cli("graph check /nonexistent.json");
    CHECK(missing.exit_code == 1);
    CHECK(contains(missing.out, "error [BadGraph]"));

    RunResult bogus = run_cli("graph check --bogus-flag");
    CHECK(bogus.exit_code == 2);
}
