#include "fk/barcode.hpp"
#include "support.hpp"

#include <doctest.h>

#include <functional>
#include <random>

using fk::Bar;
using fk::Barcode;
using fk::Ext;
using fk::Q;

namespace {

Bar fin(int deg, Q lo, Q hi) { return Bar{deg, lo, hi}; }
Bar inf(int deg, Q lo) { return Bar{deg, lo, std::nullopt}; }

Q absq(Q a) { return a < 0 ? -a : a; }

// Exhaustive bottleneck: every bar on the left is either short or matched to
// an unused bar on the right; unmatched right bars must be short.
Ext brute_bottleneck(const Barcode& a, const Barcode& b, fk::ShortRule rule) {
    auto short_cost = [&](const Bar& x) -> Ext {
        if (x.infinite()) return Ext::pos_inf();
        return rule == fk::ShortRule::strict ? Ext(2 * x.length()) : Ext(x.length() / 2);
    };
    auto pair_cost = [&](const Bar& x, const Bar& y) -> Ext {
        if (x.degree != y.degree || x.infinite() != y.infinite()) return Ext::pos_inf();
        Q c = absq(x.lo - y.lo);
        if (!x.infinite()) c = std::max(c, absq(*x.hi - *y.hi));
        return Ext(c);
    };
    Ext best = Ext::pos_inf();
    std::vector<bool> used(b.size(), false);
    std::function<void(std::size_t, Ext)> rec = [&](std::size_t i, Ext acc) {
        if (acc >= best) return;
        if (i == a.size()) {
            Ext total = acc;
            for (std::size_t j = 0; j < b.size(); ++j)
                if (!used[j]) total = fk::max(total, short_cost(b[j]));
            best = fk::min(best, total);
            return;
        }
        rec(i + 1, fk::max(acc, short_cost(a[i])));
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            rec(i + 1, fk::max(acc, pair_cost(a[i], b[j])));
            used[j] = false;
        }
    };
    rec(0, Ext(Q(0)));
    return best;
}

}  // namespace

TEST_SUITE("barcodes") {
    TEST_CASE("canonical forms of the building blocks") {
        CHECK(fk::barcode_of(fk::interval_e1(Q(2))) == Barcode{inf(0, Q(2))});
        CHECK(fk::barcode_of(fk::interval_e2(Q(3), Q(1))) == Barcode{fin(1, Q(1), Q(3))});
        CHECK(fk::format_barcode(fk::barcode_of(fk::interval_e2(Q(3), Q(1)))) == "bar 1 1 3\n");
        CHECK(fk::from_barcode({}).empty());
        CHECK(fk::same_structure(fk::from_barcode({fin(1, Q(1), Q(3))}),
                                 [] {
                                     fk::FilteredComplex x;
                                     x.add_generator("x", 1, Q(1));
                                     x.add_generator("y", 0, Q(3), {0});
                                     return x;
                                 }()));
    }

    TEST_CASE("zero-length bars are kept") {
        auto b = fk::barcode_of(fk::interval_e2(Q(2), Q(2)));
        CHECK(b == Barcode{fin(1, Q(2), Q(2))});
        CHECK(fk::boundary_depth(b) == Q(0));
    }

    TEST_CASE("round trip and basis-change invariance") {
        std::mt19937_64 rng(17);
        for (int t = 0; t < 100; ++t) {
            auto b = fk::sorted(fktest::random_barcode(rng, 8, -1, 2));
            auto x = fktest::random_basis_change(fk::from_barcode(b), rng);
            REQUIRE(fk::validate(x).empty());
            auto cf = fk::canonical_form(x);
            CHECK(cf.barcode == b);
            std::string why;
            CHECK_MESSAGE(fk::verify_canonical_form(x, cf, &why), why);
            CHECK(fk::barcode_of(fk::from_barcode(cf.barcode)) == cf.barcode);
            CHECK(static_cast<std::size_t>(x.size()) ==
                  cf.barcode.size() + std::count_if(b.begin(), b.end(), [](const Bar& bar) { return !bar.infinite(); }));
            auto again = fktest::random_basis_change(x, rng);
            CHECK(fk::barcode_of(again) == b);
            Q r = fktest::grid_value(rng, -5, 5);
            CHECK(fk::barcode_of(fk::shift_complex(x, r)) == fk::sorted(fk::shift_barcode(b, r)));
        }
    }

    TEST_CASE("boundary depth and acyclicity") {
        CHECK(fk::boundary_depth(fk::interval_e1(Q(4))) == Q(0));
        CHECK(fk::boundary_depth(fk::interval_e2(Q(3), Q(1))) == Q(2));
        CHECK(fk::is_r_acyclic(fk::interval_e2(Q(3), Q(1)), Q(2)));
        CHECK_FALSE(fk::is_r_acyclic(fk::interval_e2(Q(3), Q(1)), Q(19, 10)));
        CHECK(fk::is_r_acyclic(fk::FilteredComplex{}, Q(0)));
        CHECK_FALSE(fk::is_r_acyclic(fk::interval_e1(Q(0)), Q(100)));
    }

    TEST_CASE("acyclicity: barcode criterion matches nullhomotopy of the identity") {
        std::mt19937_64 rng(23);
        for (int t = 0; t < 60; ++t) {
            auto b = fktest::random_barcode(rng, 5, 0, 1, t % 3 == 0);
            auto x = fktest::random_basis_change(fk::from_barcode(b), rng);
            Q depth = fk::boundary_depth(b);
            CHECK(fk::is_r_acyclic(x, depth) == fk::acyclicity_witness(x, depth).has_value());
            if (depth > 0) {
                CHECK_FALSE(fk::is_r_acyclic(x, depth - Q(1, 8)));
                CHECK_FALSE(fk::acyclicity_witness(x, depth - Q(1, 8)).has_value());
            }
        }
    }

    TEST_CASE("persistence ranks") {
        auto e1 = fk::interval_e1(Q(2));
        CHECK(fk::persistence_rank(e1, Q(2), Q(5), 0) == 1);
        CHECK(fk::persistence_rank(e1, Q(1), Q(5), 0) == 0);
        auto e2 = fk::interval_e2(Q(3), Q(1));
        CHECK(fk::persistence_rank(e2, Q(1), Q(2), 1) == 1);
        CHECK(fk::persistence_rank(e2, Q(1), Q(3), 1) == 0);
        CHECK_THROWS_AS(fk::persistence_rank(e2, Q(3), Q(1), 1), fk::PreconditionError);

        std::mt19937_64 rng(29);
        for (int t = 0; t < 40; ++t) {
            auto b = fktest::random_barcode(rng, 6, 0, 2);
            auto x = fktest::random_basis_change(fk::from_barcode(b), rng);
            for (int k = 0; k < 5; ++k) {
                Q r = fktest::grid_value(rng, 0, 30);
                Q s = r + fktest::grid_value(rng, 0, 12);
                for (int deg = 0; deg <= 2; ++deg)
                    CHECK(fk::persistence_rank(b, r, s, deg) == fk::persistence_rank_direct(x, r, s, deg));
            }
        }
    }

    TEST_CASE("interval torsion agrees with acyclicity") {
        CHECK_FALSE(fk::interval_is_r_torsion(inf(0, Q(0)), Q(100)));
        CHECK(fk::interval_is_r_torsion(fin(0, Q(1), Q(3)), Q(2)));
        CHECK_FALSE(fk::interval_is_r_torsion(fin(0, Q(1), Q(3)), Q(15, 8)));
        CHECK(fk::interval_is_r_torsion(fin(0, Q(4), Q(4)), Q(0)));
        std::mt19937_64 rng(31);
        for (int t = 0; t < 50; ++t) {
            auto b = fktest::random_barcode(rng, 1);
            if (b.empty()) continue;
            Q r = fktest::grid_value(rng, 0, 16);
            CHECK(fk::interval_is_r_torsion(b[0], r) == fk::is_r_acyclic(fk::from_barcode(b), r));
        }
    }

    TEST_CASE("bottleneck examples") {
        Barcode b{fin(0, Q(1), Q(3)), inf(1, Q(2))};
        CHECK(fk::bottleneck(b, b).value == Ext(Q(0)));
        CHECK(fk::bottleneck({inf(0, Q(0))}, {inf(0, Q(1))}).value == Ext(Q(1)));
        CHECK(fk::bottleneck({fin(0, Q(1), Q(3))}, {}).value == Ext(Q(4)));
        CHECK(fk::bottleneck({fin(0, Q(1), Q(3))}, {}, fk::ShortRule::standard).value == Ext(Q(1)));
        CHECK(fk::bottleneck({inf(0, Q(0))}, {}).value.is_pos_inf());
        CHECK(fk::bottleneck({inf(0, Q(0))}, {inf(1, Q(0))}).value.is_pos_inf());
    }

    TEST_CASE("bottleneck against exhaustive enumeration") {
        std::mt19937_64 rng(37);
        for (int t = 0; t < 150; ++t) {
            auto a = fktest::random_barcode(rng, 5, 0, 1);
            auto b = fktest::random_barcode(rng, 5, 0, 1);
            for (auto rule : {fk::ShortRule::strict, fk::ShortRule::standard}) {
                auto res = fk::bottleneck(a, b, rule);
                CHECK(res.value == brute_bottleneck(a, b, rule));
                CHECK(res.value == fk::bottleneck(b, a, rule).value);
                if (res.value.finite()) CHECK(fk::bottleneck_feasible(a, b, res.value.value(), rule));
            }
        }
    }

    TEST_CASE("bottleneck triangle inequality") {
        std::mt19937_64 rng(41);
        for (int t = 0; t < 100; ++t) {
            auto a = fktest::random_barcode(rng, 4, 0, 1, false);
            auto b = fktest::random_barcode(rng, 4, 0, 1, false);
            auto c = fktest::random_barcode(rng, 4, 0, 1, false);
            for (auto rule : {fk::ShortRule::strict, fk::ShortRule::standard}) {
                auto ab = fk::bottleneck(a, b, rule).value;
                auto bc = fk::bottleneck(b, c, rule).value;
                auto ac = fk::bottleneck(a, c, rule).value;
                if (rule == fk::ShortRule::standard) CHECK(ac <= ab + bc);
                // the strict short rule is not a metric in general; it still bounds the standard one
                CHECK(fk::bottleneck(a, c, fk::ShortRule::standard).value <= ac);
            }
        }
    }
}
