#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "isospec/pipeline.hpp"

using namespace isospec;

namespace {

const char* kAcceptance = R"({
  "algebra": {"a": -1, "b": 3},
  "v0": 2,
  "locals": [
    {"p": 2, "kind": "RamifiedFull"},
    {"p": 3, "kind": "RamifiedFull"},
    {"p": 5, "kind": "SymmetricCongruence", "k": 1}
  ],
  "conjugator": [{"p": 5, "matrix": [[2, 0], [0, 1]]}],
  "enumeration": {"height_bound": 60, "trace_bound": 30, "margin_factor": 3}
})";

RunConfig acceptance() { return parse_run_config(Json::parse(kAcceptance)); }

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("rationals") {
    CHECK(parse_rational(Json(7)) == Rat(7));
    CHECK(parse_rational(Json("-3/6")) == Rat(-1, 2));
    CHECK(parse_rational(Json("5")) == Rat(5));
    CHECK_THROWS_AS(parse_rational(Json("x")), ConfigError);
    CHECK_THROWS_AS(parse_rational(Json("1/0")), ConfigError);
    CHECK_THROWS_AS(parse_rational(Json(1.5)), ConfigError);
    CHECK(rational_json(Rat(4)) == Json(4));
    CHECK(rational_json(Rat(1, 3)) == Json("1/3"));
}

TEST_CASE("config parsing rejects malformed input") {
    auto bad = [](const char* text) { return parse_run_config(Json::parse(text)); };
    CHECK_THROWS_AS(bad(R"({"algebra": {"a": -1, "b": 3}, "colour": 1})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"algebra": {"a": -1}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"locals": [{"p": 5, "kind": "Iwahori"}]})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"locals": {"p": 5}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"conjugator": [{"p": 5}]})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"conjugator": [{"p": 5, "matrix": [[1,0],[0,1]], "element": [1,0,0,0]}]})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"output": "xml"})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"expect_verdict": "Maybe"})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"enumeration": {"height_bound": "big"}})"), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);

    CHECK_THROWS_AS(make_order(bad(R"({"algebra": {"a": 1, "b": 1}})")), ConfigError);
}

TEST_CASE("config round trip and lattice key") {
    const RunConfig c = acceptance();
    CHECK(c.locals.size() == 3);
    CHECK(c.v0 == 2);
    const Json j = to_json(c);
    CHECK(to_json(parse_run_config(j)) == j);

    // enumeration and obstruction settings do not change the lattices
    RunConfig d = c;
    d.enumeration.height_bound = 10;
    d.obstruction.radius = 5;
    CHECK(lattice_key(d) == lattice_key(c));
    std::swap(d.locals[0], d.locals[2]);
    CHECK(lattice_key(d) == lattice_key(c));
    d.conjugator.clear();
    CHECK(lattice_key(d) != lattice_key(c));
}

TEST_CASE("cache directory precedence") {
    RunConfig c;
    ::setenv("ISOSPEC_CACHE", "/tmp/from-env", 1);
    CHECK(resolve_cache_dir(std::nullopt, c) == std::filesystem::path("/tmp/from-env"));
    c.cache_dir = "/tmp/from-config";
    CHECK(resolve_cache_dir(std::nullopt, c) == std::filesystem::path("/tmp/from-config"));
    CHECK(resolve_cache_dir(std::string("/tmp/from-flag"), c) == std::filesystem::path("/tmp/from-flag"));
    ::unsetenv("ISOSPEC_CACHE");
    c.cache_dir.reset();
    CHECK_FALSE(resolve_cache_dir(std::nullopt, c).has_value());
}

TEST_CASE("pipeline exit policy") {
    SUBCASE("identity conjugator succeeds with an inconclusive certificate") {
        RunConfig c = acceptance();
        c.conjugator.clear();
        c.enumeration.height_bound = 30;
        const RunReport r = run_pipeline(c);
        CHECK(r.spectra_agree);
        CHECK(r.verdict == Verdict::Inconclusive);
        CHECK(r.exit_code == 0);
    }
    SUBCASE("acceptance configuration: spectra agree, certificate inconclusive") {
        const RunReport r = run_pipeline(acceptance());
        CHECK(r.spectra_agree);
        CHECK(r.verdict == Verdict::Inconclusive);
        CHECK_FALSE(r.verdict_as_expected);
        CHECK(r.exit_code == 1);
        CHECK(r.report["hypotheses"]["h3"]["pass"] == true);
        CHECK(r.report["torsion_free"]["criterion_place"] == 5);
        CHECK_FALSE(r.report.contains("timing"));

        RunConfig expecting = acceptance();
        expecting.expect_verdict = Verdict::Inconclusive;
        CHECK(run_pipeline(expecting).exit_code == 0);
    }
    SUBCASE("failed hypotheses are configuration errors") {
        RunConfig definite = acceptance();
        definite.a = Rat(-1);
        definite.b = Rat(-1);
        definite.locals.clear();
        definite.conjugator.clear();
        CHECK_THROWS_AS(run_pipeline(definite), ConfigError);
    }
}

TEST_CASE("cached runs reproduce the cold report byte for byte") {
    const auto dir = fresh_dir("isospec-test-cache");
    PipelineOptions o;
    o.cache_dir = dir;
    const RunConfig c = acceptance();
    const std::string cold = run_pipeline(c, o).report.dump(2);
    CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 2);

    const std::string warm = run_pipeline(c, o).report.dump(2);
    CHECK(cold == warm);
    CHECK(run_pipeline(c).report.dump(2) == cold);

    o.timing = true;
    CHECK(run_pipeline(c, o).report["timing"]["cache_hits"] == 2);

    // a corrupted entry is recomputed rather than trusted
    for (const auto& e : std::filesystem::directory_iterator(dir)) std::ofstream(e.path()) << "garbage\n";
    o.timing = false;
    CHECK(run_pipeline(c, o).report.dump(2) == cold);
    std::filesystem::remove_all(dir);
}

TEST_CASE("hand-written llmult data") {
    const Json good = Json::parse(R"({
      "type": "a''", "d": 1, "v0": 0,
      "places": [{"place": 0, "split": false}, {"place": 1, "split": false}, {"place": 2}],
      "k": {"0": [2, 2], "1": [0, 1], "2": [2, 1]}
    })");
    const DihedralDatum x = parse_datum(good);
    const auto r = verify_identity(x, parse_kdatum(good["k"]), {2});
    CHECK(r.lhs == 6);
    CHECK(r.equal);
    CHECK(identity_json(r)["rhs"] == 6);

    Json bad = good;
    bad["type"] = "b";
    CHECK_THROWS_AS(parse_datum(bad), ConfigError);
    bad = good;
    bad["places"][0]["mode"] = "Tempered";
    CHECK_THROWS_AS(parse_datum(bad), ConfigError);
    CHECK_THROWS_AS(parse_kdatum(Json::parse(R"({"zero": [1, 1]})")), ConfigError);
    CHECK_THROWS_AS(parse_kdatum(Json::parse(R"({"0": [1]})")), ConfigError);
}

TEST_CASE("text rendering") {
    const Json j = Json::parse(R"({"verdict": "Inconclusive", "bounds": {"lower": [1, 2]}, "notes": []})");
    const std::string t = render_text(j);
    CHECK(t.find("verdict: Inconclusive") != std::string::npos);
    CHECK(t.find("lower: [1,2]") != std::string::npos);
}
