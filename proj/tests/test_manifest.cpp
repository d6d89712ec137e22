#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"

#include "crforge/commands.hpp"
#include "crforge/manifest.hpp"
#include "crforge/report.hpp"

#include <fstream>
#include <sstream>

using namespace crforge;
using namespace crforge::testing;

TEST_CASE("parsing the quadric manifest reproduces the hand-built manifold") {
    Manifest m = parse_manifest("order 8\nmanifold M dim 2 codim 1 { Im(w) - |z|^2 }\n");
    const GenericManifold& M = m.manifold("M");
    GenericManifold ref = quadric(8);
    CHECK(M.Q()[0] == ref.Q()[0]);
    CHECK(M.Qbar()[0] == ref.Qbar()[0]);
}

TEST_CASE("parsing the twist manifest including its map") {
    Manifest m = parse_manifest(fixture_source("twist"));
    const GenericManifold& M = m.manifold("M");
    GenericManifold ref = twist_manifold(10);
    CHECK(M.Q()[0] == ref.Q()[0]);
    MapGerm tw = twist_map_fixture(10);
    CHECK(m.map("H").germ.H[0] == tw.H[0]);
    CHECK(m.map("H").germ.H[1] == tw.H[1]);
    CHECK(m.map("H").germ.H[2] == tw.H[2]);
}

TEST_CASE("complexified input form") {
    // the quadric given directly in (z, w, chi, tau)
    Manifest m = parse_manifest(
        "order 6\n"
        "manifold M dim 2 codim 1 complexified { (w - tau)/(2*i) - z*chi }\n");
    CHECK(m.manifold("M").Q()[0] == quadric(6).Q()[0]);
}

TEST_CASE("parse errors carry locations and causes") {
    CHECK_THROWS_AS(parse_manifest("order x"), ParseError);
    CHECK_THROWS_AS(parse_manifest("manifold M dim 2 codim 1 { Im(w) - |z|^2 }\nnonsense"),
                    ParseError);
    // unresolved name
    CHECK_THROWS_AS(parse_manifest("order 6\nmanifold M dim 2 codim 1 { Im(w) - |q|^2 }\n"),
                    ParseError);
    // arity: codim 2 with one expression
    CHECK_THROWS_AS(parse_manifest("order 6\nmanifold M dim 2 codim 2 { Im(w) }\n"),
                    ParseError);
    // non-real defining system propagates from normal-forming, with location
    try {
        parse_manifest("order 6\nmanifold M dim 2 codim 1 complexified { w - tau - z }\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("not real") != std::string::npos);
        CHECK(e.line == 2);
    }
    // holomorphy restriction in map bodies
    CHECK_THROWS_AS(
        parse_manifest("order 6\nmanifold M dim 2 codim 1 { Im(w) - |z|^2 }\n"
                       "map H : M -> M { conj(z), w }\n"),
        ParseError);
    // division by a non-unit
    CHECK_THROWS_AS(parse_manifest("order 6\nmanifold M dim 2 codim 1 { Im(w) - |z/z|^2 }\n"),
                    ParseError);
    // duplicate names
    CHECK_THROWS_AS(parse_manifest("order 6\nmanifold M dim 2 codim 1 { Im(w) }\n"
                                   "series M = z\n"),
                    ParseError);
    // maps must fix the origin
    CHECK_THROWS_AS(parse_manifest("order 6\nmanifold M dim 2 codim 1 { Im(w) - |z|^2 }\n"
                                   "map H : M -> M { z + 1, w }\n"),
                    ParseError);
}

TEST_CASE("series references resolve lazily and reject cycles") {
    Manifest m = parse_manifest(
        "order 6\n"
        "manifold M dim 2 codim 1 { Im(w) - |z|^2 }\n"
        "series a = z + b\n"
        "series b = z^2\n"
        "map H : M -> M { z + a - a, w }\n");
    CHECK(m.map("H").germ.H[0] == Series::variable(2, 6, 0));
    CHECK_THROWS_AS(parse_manifest("order 6\nmanifold M dim 2 codim 1 { Im(w) - |z|^2 }\n"
                                   "series a = a + z\n"
                                   "map H : M -> M { a, w }\n"),
                    ParseError);
}

TEST_CASE("round-trip: parse(render(m)) reproduces the manifest") {
    for (const auto& name : fixture_names()) {
        Manifest m = parse_manifest(fixture_source(name));
        std::string rendered = m.render();
        Manifest m2 = parse_manifest(rendered);
        CHECK(m2.render() == rendered);
        for (const auto& [mname, mf] : m.manifolds) {
            const GenericManifold& other = m2.manifold(mname);
            for (int k = 0; k < mf.d(); ++k) CHECK(mf.Q()[k] == other.Q()[k]);
        }
        for (const auto& [gname, g] : m.maps)
            for (int c = 0; c < g.germ.H.size(); ++c)
                CHECK(g.germ.H[c] == m2.map(gname).germ.H[c]);
    }
}

TEST_CASE("fixture files on disk match the embedded corpus") {
    for (const auto& name : fixture_names()) {
        std::ifstream in(std::string(CRFORGE_SOURCE_DIR) + "/fixtures/" + name + ".crf");
        REQUIRE(in.good());
        std::ostringstream buf;
        buf << in.rdbuf();
        CHECK(buf.str() == fixture_source(name));
    }
}

TEST_CASE("run_command: reports, determinism, order refusal") {
    Manifest m = parse_manifest(fixture_source("quadric"));
    CommandFlags flags;
    flags.order = 8;
    flags.manifold = "M";

    Report r1 = run_command(m, "finite-type", flags);
    CHECK(r1.exit_code() == 0);
    CHECK(r1.records.size() == 1);
    CHECK(r1.records[0].certificate["segre_j0"] == 2);

    // byte-identical machine reports for identical inputs and seed
    Report r2 = run_command(m, "finite-type", flags);
    CHECK(r1.json_lines() == r2.json_lines());
    CHECK(r1.json_lines().find("\"millis\":0") != std::string::npos);

    // orders above the manifest order are refused
    CommandFlags over = flags;
    over.order = 12;
    CHECK_THROWS_AS(run_command(m, "finite-type", over), std::invalid_argument);

    CHECK_THROWS_AS(run_command(m, "no-such-command", flags), std::invalid_argument);
}

TEST_CASE("run_command: map checks and exit codes") {
    Manifest m = parse_manifest(fixture_source("quadric"));
    CommandFlags flags;
    flags.order = 8;

    flags.map = "Id";
    CHECK(run_command(m, "check-map", flags).exit_code() == 0);
    flags.map = "Scale";
    CHECK(run_command(m, "check-map", flags).exit_code() == 0);
    flags.map = "Stretch";
    Report bad = run_command(m, "check-map", flags);
    CHECK(bad.exit_code() == 1);
    CHECK(bad.records[0].certificate["obstruction_degree"] == 2);

    // rank / ideal-equal on the twist fixture
    Manifest m29 = parse_manifest(fixture_source("twist"));
    CommandFlags f29;
    f29.order = 8;
    f29.map = "H";
    f29.map2 = "Id";
    CHECK(run_command(m29, "ideal-equal", f29).exit_code() == 0);
    CHECK(run_command(m29, "rank", f29).records[0].certificate["rank"] == 3);
}

TEST_CASE("run_command: systems and the determination experiment") {
    Manifest m = parse_manifest(fixture_source("quadric"));
    CommandFlags flags;
    flags.order = 8;
    flags.map = "Id";
    flags.level = 1;

    CHECK(run_command(m, "build-system", flags).exit_code() == 0);
    CHECK(run_command(m, "check-jet-solution", flags).exit_code() == 0);
    flags.segre_level = 0;
    CHECK(run_command(m, "check-jet-solution", flags).exit_code() == 0);
    flags.map2 = "Id";
    CHECK(run_command(m, "key-identity", flags).exit_code() == 0);

    CommandFlags det;
    det.order = 6;
    det.map = "Id";
    det.level = 2;
    det.trials = 4;
    det.seed = 5;
    Report r = run_command(m, "determine", det);
    CHECK(r.exit_code() == 0);
}

TEST_CASE("empty reports are a header plus zero records") {
    Report r;
    r.command = "noop";
    CHECK(r.human() == "crforge noop (seed 0)\n");
    CHECK(r.json_lines().empty());
    CHECK(r.exit_code() == 0);
}

TEST_CASE("selftest covers the corpus") {
    Manifest empty;
    CommandFlags flags;
    flags.order = 6; // keep the suite quick
    Report r = run_command(empty, "selftest", flags);
    CHECK(r.exit_code() == 0);
    CHECK(r.records.size() > 20);
}
