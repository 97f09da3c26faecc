#include "fk/io.hpp"
#include "fk/verify.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace fk;

namespace {

// Message of the ParseError thrown by fn, or "" if none.
template <class Fn>
std::string parse_failure(Fn fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

std::filesystem::path scratch_dir() {
    auto p = std::filesystem::temp_directory_path() / "fk_io_test";
    std::filesystem::create_directories(p);
    return p;
}

void write_file(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_SUITE("io") {

TEST_CASE("complex text round-trips") {
    GenConfig cfg;
    cfg.max_generators = 12;
    std::mt19937_64 rng(41);
    for (int k = 0; k < 200; ++k) {
        const FilteredComplex x = gen_complex(cfg, rng);
        const std::string text = format_complex(x);
        const FilteredComplex y = parse_complex(text);
        REQUIRE(same_structure(x, y));
        CHECK(y.size() == x.size());
        for (int i = 0; i < x.size(); ++i) CHECK(y.gens[i].id == x.gens[i].id);
        CHECK(format_complex(y) == text);
    }
}

TEST_CASE("comments, blank lines and order of d lines") {
    const FilteredComplex x = parse_complex("# E_2\n\ngen y 0 3   # top\nd y x\ngen x 1 1\n");
    REQUIRE(x.size() == 2);
    CHECK(format_barcode(barcode_of(x)) == "bar 1 1 3\n");
}

TEST_CASE("parse errors name file, line and token") {
    CHECK(parse_failure([] { parse_complex("gen a 0 0\ngen a 1 0\n", "f.cplx"); }) ==
          "f.cplx:2: duplicate generator id at 'a'");
    CHECK(parse_failure([] { parse_complex("gen a 0 0\nd a b\n", "f.cplx"); }) ==
          "f.cplx:2: unknown generator at 'b'");
    CHECK(parse_failure([] { parse_complex("gen a x 0\n", "f.cplx"); }) == "f.cplx:1: expected an integer at 'x'");
    CHECK(parse_failure([] { parse_complex("gen a 0 1/0\n", "f.cplx"); }) == "f.cplx:1: expected a rational at '1/0'");
    CHECK(parse_failure([] { parse_complex("gen a 0 0\nedge a a\n", "f.cplx"); }) ==
          "f.cplx:2: unknown keyword at 'edge'");
    // structural violations point at a generator line
    const std::string filt = parse_failure([] { parse_complex("gen a 0 0\ngen b 1 2\nd a b\n", "f.cplx"); });
    CHECK(filt.find("f.cplx:") == 0);
    CHECK(filt.find("filtration") != std::string::npos);
    const std::string deg = parse_failure([] { parse_complex("gen a 0 1\ngen b 0 0\nd a b\n", "f.cplx"); });
    CHECK(deg.find("degree") != std::string::npos);
}

TEST_CASE("clashing ids are written index-based") {
    FilteredComplex x;
    x.add_generator("a", 0, Q(0));
    x.add_generator("a", 1, Q(0));
    const auto ids = writable_ids(x);
    CHECK(ids[0] != ids[1]);
    const FilteredComplex y = parse_complex(format_complex(x));
    CHECK(same_structure(x, y));
}

TEST_CASE("map bodies round-trip") {
    GenConfig cfg;
    std::mt19937_64 rng(43);
    for (int k = 0; k < 100; ++k) {
        const FilteredComplex x = gen_complex(cfg, rng), y = gen_complex(cfg, rng);
        const ChainMap f = random_closed_map(x, y, rng, Q(1));
        const ChainMap g = parse_map_body(format_map_body(f), x, y);
        CHECK(same_matrix(f, g));
    }
}

TEST_CASE("map and family files resolve relative paths") {
    const auto dir = scratch_dir();
    write_file(dir / "a.cplx", "gen x 0 0\n");
    write_file(dir / "b.cplx", "gen x 0 1\n");
    write_file(dir / "eta.map", "map b.cplx a.cplx\nf x x\n");
    write_file(dir / "fam", "family\nmember a.cplx\nclosed-shift\n");
    const ChainMap f = read_map(dir / "eta.map");
    CHECK(f.source.gens[0].ell == Q(1));
    CHECK(shift_of_map(f) == Ext(-1));
    const FamilySpec s = read_family(dir / "fam");
    CHECK(s.members.size() == 1);
    CHECK(s.closed_shift);
    CHECK_FALSE(s.with_zero);
    CHECK(s.contains(interval_e1(Q(5))));
    CHECK_FALSE(s.contains(interval_e1(Q(5), 1)));

    write_file(dir / "bad.map", "map b.cplx a.cplx\nf x y\n");
    CHECK(parse_failure([&] { read_map(dir / "bad.map"); }).find("bad.map:2:") != std::string::npos);
    CHECK_THROWS_AS(read_complex(dir / "nope.cplx"), MalformedInput);
}

TEST_CASE("bundles round-trip and still verify") {
    GenConfig cfg;
    cfg.max_generators = 4;
    std::mt19937_64 rng(47);
    for (int k = 0; k < 60; ++k) {
        const FilteredComplex x = gen_complex(cfg, rng), y = gen_complex(cfg, rng);
        WitnessedTriangle t = triangle_from_morphism(random_closed_map(x, y, rng, Q(k % 3, 2)));
        if (k % 4 == 0) t = relax_weight(t, Q(1, 2));
        if (k % 5 == 0) t = rotate(t);
        REQUIRE(verify_triangle(t).ok);
        const std::string text = format_bundle(t);
        const WitnessedTriangle u = parse_bundle(text);
        CHECK(u.tri.weight == t.tri.weight);
        CHECK(same_structure(u.tri.C, t.tri.C));
        CHECK(same_matrix(u.tri.w, t.tri.w));
        CHECK(same_matrix(u.wit.psi, t.wit.psi));
        CHECK(verify_triangle(u).ok);
        CHECK(format_bundle(u) == text);
    }
}

TEST_CASE("bundle errors") {
    CHECK(parse_failure([] { parse_bundle("bundle\ncomplex A\ngen x 0 0\nend\n", "t.bundle"); }).find("t.bundle:") ==
          0);
    CHECK(parse_failure([] { parse_bundle("triangle\n", "t.bundle"); }).find("t.bundle:1:") == 0);
}

}  // TEST_SUITE
