#include "fk/tpc.hpp"
#include "support.hpp"

#include <doctest.h>

#include <map>
#include <memory>

using namespace fk;
using fktest::Q;

namespace {

std::mt19937_64 rng_for(int seed) { return std::mt19937_64(0x7c0ffeeULL + static_cast<unsigned>(seed)); }

// Identity matrix X → Σ^k X, a map of shift k.
ChainMap up_map(const FilteredComplex& x, const Q& k) {
    return map_from_matrix(x, shift_complex(x, k), F2SparseMatrix::identity(x.size()));
}

// Random witnessed triangle: the cone (or shifted cone) triangle of a random
// closed map, optionally relaxed.
WitnessedTriangle random_triangle(std::mt19937_64& rng, int max_bars = 3) {
    FilteredComplex x = fktest::random_complex(rng, max_bars);
    FilteredComplex y = fktest::random_complex(rng, max_bars);
    std::uniform_int_distribution<int> pick(0, 3);
    const Q bound = pick(rng) == 0 ? fktest::grid_value(rng, 1, 8) : Q(0);
    WitnessedTriangle t = triangle_from_morphism(fktest::random_closed_map(x, y, rng, bound));
    if (pick(rng) == 0) t = relax_weight(t, fktest::grid_value(rng, 1, 6));
    return t;
}

// Second triangle starting at the apex of t.
WitnessedTriangle random_triangle_from(std::mt19937_64& rng, const FilteredComplex& x) {
    FilteredComplex y = fktest::random_complex(rng, 3);
    std::uniform_int_distribution<int> pick(0, 2);
    const Q bound = pick(rng) == 0 ? fktest::grid_value(rng, 1, 8) : Q(0);
    WitnessedTriangle t = triangle_from_morphism(fktest::random_closed_map(x, y, rng, bound));
    if (pick(rng) == 0) t = relax_weight(t, fktest::grid_value(rng, 1, 6));
    return t;
}

F2SparseMatrix block_diag(const F2SparseMatrix& a, const F2SparseMatrix& b) {
    F2SparseMatrix m(a.nrows + b.nrows, 0);
    for (const auto& c : a.cols) m.cols.push_back(c);
    for (const auto& c : b.cols) {
        F2Vector v;
        for (int i : c) v.push_back(i + a.nrows);
        m.cols.push_back(v);
    }
    return m;
}

// Transports a witnessed triangle along random filtered isomorphisms of A, B and C.
WitnessedTriangle conjugate(const WitnessedTriangle& t, std::mt19937_64& rng) {
    ChainMap ma, mb, mc;
    FilteredComplex a = fktest::random_basis_change(t.tri.A, rng, &ma);
    FilteredComplex b = fktest::random_basis_change(t.tri.B, rng, &mb);
    FilteredComplex c = fktest::random_basis_change(t.tri.C, rng, &mc);
    const F2SparseMatrix ia = inverse(ma.matrix()), ib = inverse(mb.matrix()), ic = inverse(mc.matrix());
    const Q r = t.tri.weight;
    WitnessedTriangle out;
    out.tri.A = a;
    out.tri.B = b;
    out.tri.C = c;
    out.tri.weight = r;
    out.tri.u = map_from_matrix(a, b, multiply(ib, multiply(t.tri.u.matrix(), ma.matrix())));
    out.tri.v = map_from_matrix(b, c, multiply(ic, multiply(t.tri.v.matrix(), mb.matrix())));
    out.tri.w = map_from_matrix(c, shift_complex(translate(a), -r),
                                multiply(ia, multiply(t.tri.w.matrix(), mc.matrix())));
    Cone k = cone(out.tri.u);
    const F2SparseMatrix j = block_diag(mb.matrix(), ma.matrix());
    out.wit.Cprime = k.complex;
    out.wit.phi = map_from_matrix(k.complex, c, multiply(ic, multiply(t.wit.phi.matrix(), j)));
    out.wit.psi = map_from_matrix(shift_complex(c, r), k.complex,
                                  multiply(inverse(j), multiply(t.wit.psi.matrix(), mc.matrix())));
    return out;
}

bool has_clause(const TriangleCheck& c, const std::string& name) {
    return std::find(c.failed.begin(), c.failed.end(), name) != c.failed.end();
}

ChainMap as_level(const ChainMap& f, const FilteredComplex& target) { return reinterpret(f, f.source, target); }

// Oracle for σ: f is homotopic to a map of shift ≤ k iff the entries of f
// at ℓ-gap > k can be cleared by a boundary, decided by dense ranks.
bool oracle_has_rep(const ChainMap& f, const Q& k) {
    const FilteredComplex& x = f.source;
    const FilteredComplex& y = f.target;
    std::vector<std::pair<int, int>> high;
    for (int i = 0; i < x.size(); ++i)
        for (int j = 0; j < y.size(); ++j)
            if (y.gens[j].degree == x.gens[i].degree && y.gens[j].ell - x.gens[i].ell > k) high.emplace_back(i, j);
    if (high.empty()) return true;
    std::vector<std::pair<int, int>> hgen;
    for (int i = 0; i < x.size(); ++i)
        for (int j = 0; j < y.size(); ++j)
            if (y.gens[j].degree == x.gens[i].degree - 1) hgen.emplace_back(i, j);
    fktest::Dense m(high.size(), std::vector<bool>(hgen.size() + 1, false));
    for (std::size_t c = 0; c < hgen.size(); ++c) {
        ChainMap h = zero_map(x, y, -1);
        h.cols[hgen[c].first] = {hgen[c].second};
        ChainMap dh = hom_boundary(h);
        for (std::size_t r = 0; r < high.size(); ++r) {
            const auto& col = dh.cols[high[r].first];
            m[r][c] = std::binary_search(col.begin(), col.end(), high[r].second);
        }
    }
    for (std::size_t r = 0; r < high.size(); ++r) {
        const auto& col = f.cols[high[r].first];
        m[r][hgen.size()] = std::binary_search(col.begin(), col.end(), high[r].second);
    }
    fktest::Dense a = m;
    for (auto& row : a) row.pop_back();
    return fktest::dense_rank(a) == fktest::dense_rank(m);
}

}  // namespace

TEST_SUITE("tpc") {

TEST_CASE("r-equivalence") {
    FilteredComplex e2 = interval_e2(Q(3), Q(1));
    ChainMap id = identity_map(e2);
    CHECK(r_equivalent(id, id, Q(0), Q(0)));
    // depth of E_2(3,1) is 2
    CHECK_FALSE(r_equivalent(id, zero_map(e2, e2), Q(0), Q(1)));
    CHECK(r_equivalent(id, zero_map(e2, e2), Q(0), Q(2)));
    CHECK(r_equivalent(id, zero_map(e2, e2), Q(0), Q(5)));

    for (int seed = 0; seed < 60; ++seed) {
        auto rng = rng_for(seed);
        FilteredComplex x = fktest::random_complex(rng, 3), y = fktest::random_complex(rng, 3);
        ChainMap f = fktest::random_closed_map(x, y, rng, Q(0));
        ChainMap g = fktest::random_closed_map(x, y, rng, Q(0));
        const Q r = fktest::grid_value(rng, 0, 12);
        if (!r_equivalent(f, g, Q(0), r)) continue;
        CHECK(r_equivalent(f, g, Q(0), r + 1));
        const Q e = fktest::grid_value(rng, 0, 8);
        ChainMap n = eta(x, e);
        CHECK(r_equivalent(compose(f, n), compose(g, n), Q(0), r));
    }
}

TEST_CASE("r-isomorphisms") {
    FilteredComplex a = interval_e1(Q(0));
    CHECK(is_r_isomorphism(identity_map(a), Q(0)));
    CHECK(is_r_isomorphism(eta(a, Q(2)), Q(2)));
    CHECK_FALSE(is_r_isomorphism(eta(a, Q(2)), Q(7, 4)));
    // shift > 0 is never an r-isomorphism
    CHECK_FALSE(is_r_isomorphism(up_map(a, Q(1)), Q(5)));

    for (int seed = 0; seed < 60; ++seed) {
        auto rng = rng_for(seed);
        const Q r = fktest::grid_value(rng, 1, 8), s = fktest::grid_value(rng, 1, 8);
        ChainMap f = fktest::random_r_iso(rng, r);
        REQUIRE(is_r_isomorphism(f, r));
        ChainMap gs = eta(shift_complex(f.target, -s), s);
        CHECK(is_r_isomorphism(compose(gs, f), r + s));
        CHECK(is_r_isomorphism(compose(f, eta(f.source, s)), r + s));
    }
}

TEST_CASE("r-inverses") {
    FilteredComplex a = fktest::random_complex(*std::make_unique<std::mt19937_64>(5), 4);
    {
        RInverses inv = r_inverses(identity_map(a), Q(0));
        CHECK(same_matrix(inv.left, identity_map(a)));
        CHECK(same_matrix(inv.right, identity_map(a)));
    }
    {
        const Q r(3, 2);
        ChainMap n = eta(a, r);
        RInverses inv = r_inverses(n, r);
        CHECK(homotopic_within(compose(n, inv.right), eta(a, r), Ext(0)));
        ChainMap idm = map_from_matrix(n.source, inv.left.target, F2SparseMatrix::identity(a.size()));
        CHECK(homotopic_within(compose(inv.left, n), idm, Ext(0)));
    }
    CHECK_THROWS_AS(r_inverses(eta(interval_e1(Q(0)), Q(2)), Q(1)), PreconditionError);
    try {
        r_inverses(eta(interval_e1(Q(0)), Q(2)), Q(1));
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("cone bar") != std::string::npos);
    }

    for (int seed = 0; seed < 80; ++seed) {
        auto rng = rng_for(seed);
        const Q r = fktest::grid_value(rng, 0, 8);
        ChainMap f = fktest::random_r_iso(rng, r);
        RInverses inv = r_inverses(f, r);
        const FilteredComplex& x = f.source;
        const FilteredComplex& y = f.target;
        // φ∘f ≃_0 η_r^A with an explicit homotopy
        ChainMap lhs = compose(inv.left, f);
        ChainMap etaA = map_from_matrix(x, shift_complex(x, -r), F2SparseMatrix::identity(x.size()));
        auto h1 = find_homotopy(add(lhs, etaA), Ext(0));
        REQUIRE(h1);
        CHECK(same_matrix(hom_boundary(*h1), add(lhs, etaA)));
        // f∘ψ ≃_0 η_r^B
        ChainMap rhs = compose(f, inv.right);
        auto h2 = find_homotopy(add(rhs, eta(y, r)), Ext(0));
        REQUIRE(h2);
        CHECK(same_matrix(hom_boundary(*h2), add(rhs, eta(y, r))));
        // Σ^r φ ≃_r ψ
        ChainMap sphi = shift_map(inv.left, r);
        CHECK(r_equivalent(as_level(sphi, x), inv.right, Q(0), r));
        // the right inverse is a 2r-isomorphism
        CHECK(is_r_isomorphism(inv.right, 2 * r));
    }
}

TEST_CASE("left inverses from independent solves agree up to r") {
    for (int seed = 0; seed < 60; ++seed) {
        auto rng = rng_for(100 + seed);
        const Q r = fktest::grid_value(rng, 1, 8);
        ChainMap f = fktest::random_r_iso(rng, r);
        ChainMap m;
        FilteredComplex b2 = fktest::random_basis_change(f.target, rng, &m);
        ChainMap minv = map_from_matrix(f.target, b2, inverse(m.matrix()));
        ChainMap f2 = compose(minv, f);
        ChainMap phi = left_r_inverse(f, r);
        ChainMap phi2 = compose(left_r_inverse(f2, r), minv);
        CHECK(r_equivalent(phi, phi2, Q(0), r));
    }
}

TEST_CASE("maps agreeing after an r-isomorphism are r-equivalent") {
    for (int seed = 0; seed < 60; ++seed) {
        auto rng = rng_for(200 + seed);
        const Q r = fktest::grid_value(rng, 1, 8);
        // f: A → A ⊕ K includes A, K r-acyclic; d vanishes on A
        FilteredComplex a = fktest::random_complex(rng, 3);
        fk::Barcode kb = fktest::random_barcode(rng, 3, 0, 2, false);
        std::uniform_int_distribution<int> pct(0, 4);
        for (auto& bar : kb) *bar.hi = bar.lo + r * Q(pct(rng), 4);
        DirectSum s = direct_sum(a, from_barcode(kb));
        ChainMap bm;
        FilteredComplex b = fktest::random_basis_change(s.sum, rng, &bm);
        ChainMap f = compose(map_from_matrix(s.sum, b, inverse(bm.matrix())), s.in1);
        REQUIRE(is_r_isomorphism(f, r));
        FilteredComplex c = fktest::random_complex(rng, 3);
        ChainMap u = fktest::random_closed_map(b, c, rng, Q(0));
        ChainMap dk = fktest::random_closed_map(s.sum, c, rng, Q(0));
        ChainMap d = compose(compose(dk, compose(s.in2, s.pr2)), bm);
        ChainMap u2 = add(u, d);
        REQUIRE(same_matrix(compose(u, f), compose(u2, f)));
        CHECK(r_equivalent(u, u2, Q(0), r));
    }
}

TEST_CASE("cones of maps between acyclic complexes") {
    int tested = 0;
    for (int seed = 0; seed < 220; ++seed) {
        auto rng = rng_for(300 + seed);
        const Q r = fktest::grid_value(rng, 0, 8), s = fktest::grid_value(rng, 0, 8);
        auto acyclic = [&](const Q& depth) {
            fk::Barcode b = fktest::random_barcode(rng, 3, 0, 2, false);
            std::uniform_int_distribution<int> pct(0, 4);
            for (auto& bar : b) *bar.hi = bar.lo + depth * Q(pct(rng), 4);
            return fktest::random_basis_change(from_barcode(b), rng);
        };
        FilteredComplex x = acyclic(r), y = acyclic(s);
        REQUIRE(is_r_acyclic(x, r));
        REQUIRE(is_r_acyclic(y, s));
        ChainMap f = fktest::random_closed_map(x, y, rng, Q(0));
        CHECK(is_r_acyclic(cone(f).complex, r + s));
        ++tested;
    }
    CHECK(tested >= 200);
}

TEST_CASE("spectral invariant") {
    FilteredComplex a = interval_e1(Q(0));
    CHECK(spectral_invariant(identity_map(a)) == Ext(0));
    CHECK(spectral_invariant(zero_map(a, a)).is_neg_inf());
    CHECK(spectral_invariant(up_map(a, Q(3))) == Ext(Q(3)));
    CHECK(spectral_invariant(eta(a, Q(3))) == Ext(Q(-3)));
    CHECK(spectral_invariant(identity_map(interval_e2(Q(2), Q(0)))).is_neg_inf());

    int finite = 0;
    for (int seed = 0; seed < 80; ++seed) {
        auto rng = rng_for(400 + seed);
        // an infinite bar on both sides so that nonzero classes are common
        auto with_free = [&] {
            FilteredComplex c = direct_sum(fktest::random_complex(rng, 3), interval_e1(fktest::grid_value(rng))).sum;
            return fktest::random_basis_change(c, rng);
        };
        FilteredComplex x = with_free(), y = with_free();
        ChainMap f = fktest::random_closed_map(x, y, rng, fktest::grid_value(rng, 0, 12));
        ChainMap rep;
        Ext sigma = spectral_invariant(f, &rep);
        CHECK(sigma <= shift_of_map(f));
        if (sigma.is_neg_inf()) {
            CHECK(homotopic_within(f, zero_map(x, y), Ext::pos_inf()));
            continue;
        }
        ++finite;
        CHECK(shift_of_map(rep) <= sigma);
        CHECK(homotopic_within(f, rep, Ext::pos_inf()));
        CHECK(oracle_has_rep(f, sigma.value()));
        CHECK_FALSE(oracle_has_rep(f, sigma.value() - Q(1, 8)));
        CHECK_FALSE(representative_at(f, sigma.value() - Q(1, 8)).has_value());
        // invariant under adding boundaries
        ChainMap h = zero_map(x, y, -1);
        std::uniform_int_distribution<int> coin(0, 1);
        for (int i = 0; i < x.size(); ++i)
            for (int j = 0; j < y.size(); ++j)
                if (y.gens[j].degree == x.gens[i].degree - 1 && coin(rng)) h.cols[i].push_back(j);
        CHECK(spectral_invariant(add(f, hom_boundary(h))) == sigma);
    }
    CHECK(finite > 10);
}

TEST_CASE("triangles from morphisms") {
    FilteredComplex x = fktest::random_complex(*std::make_unique<std::mt19937_64>(9), 4);
    WitnessedTriangle s = singleton_triangle(x);
    CHECK(verify_triangle(s).ok);
    CHECK(s.tri.weight == Q(0));
    CHECK(s.tri.B.empty());
    CHECK(same_structure(s.tri.C, x));

    WitnessedTriangle z = triangle_from_morphism(zero_map(translate_inverse(x), FilteredComplex{}));
    CHECK(verify_triangle(z).ok);
    CHECK(z.tri.weight == Q(0));
    CHECK(z.tri.B.empty());
    CHECK(same_structure(z.tri.C, x));

    const Q r(5, 2);
    WitnessedTriangle e = eta_triangle(x, r);
    CHECK(verify_triangle(e).ok);
    CHECK(e.tri.weight == r);
    CHECK(e.tri.w.is_zero());
    CHECK(same_matrix(e.tri.u, eta(x, r)));

    // shift t > 0 between intervals
    FilteredComplex a = interval_e1(Q(0)), b = interval_e1(Q(2));
    WitnessedTriangle t = triangle_from_morphism(map_from_matrix(a, b, F2SparseMatrix::identity(1)));
    CHECK(t.tri.weight == Q(2));
    CHECK(verify_triangle(t).ok);

    for (int seed = 0; seed < 60; ++seed) {
        auto rng = rng_for(500 + seed);
        FilteredComplex p = fktest::random_complex(rng, 3), q = fktest::random_complex(rng, 3);
        ChainMap f = fktest::random_closed_map(p, q, rng, fktest::grid_value(rng, 0, 8));
        WitnessedTriangle w = triangle_from_morphism(f);
        TriangleCheck c = verify_triangle(w);
        CHECK_MESSAGE(c.ok, (c.failed.empty() ? "" : c.failed.front()));
        Ext sh = shift_of_map(f);
        CHECK(w.tri.weight == (sh > Ext(0) ? sh.value() : Q(0)));
    }
}

TEST_CASE("verify_triangle detects tampering and is stable under isomorphism") {
    int tampered = 0;
    for (int seed = 0; seed < 80; ++seed) {
        auto rng = rng_for(600 + seed);
        WitnessedTriangle t = random_triangle(rng);
        REQUIRE(verify_triangle(t).ok);
        WitnessedTriangle c = conjugate(t, rng);
        TriangleCheck cc = verify_triangle(c);
        CHECK_MESSAGE(cc.ok, (cc.failed.empty() ? "" : cc.failed.front()));

        ChainMap p = fktest::random_closed_map(t.tri.C, t.tri.w.target, rng, Q(0));
        if (p.is_zero()) continue;
        WitnessedTriangle bad = t;
        bad.tri.w = add(t.tri.w, p);
        TriangleCheck bc = verify_triangle(bad);
        if (bc.ok) continue;  // the change was absorbed up to homotopy
        ++tampered;
        CHECK(has_clause(bc, "w-factor"));
    }
    CHECK(tampered > 5);

    // tamper the weight and a map structurally
    auto rng = rng_for(699);
    WitnessedTriangle t = eta_triangle(direct_sum(interval_e1(Q(0)), fktest::random_complex(rng, 3)).sum, Q(2));
    WitnessedTriangle low = t;
    low.tri.weight = Q(1);
    CHECK_FALSE(verify_triangle(low).ok);
    WitnessedTriangle nonclosed = t;
    if (!t.tri.A.empty() && !t.tri.B.empty()) {
        nonclosed.tri.u.cols[0] = {};
        if (!is_closed(nonclosed.tri.u) || !homotopic_within(nonclosed.tri.u, t.tri.u, Ext(0)))
            CHECK_FALSE(verify_triangle(nonclosed).ok);
    }
}

TEST_CASE("relaxing and translating triangles") {
    for (int seed = 0; seed < 60; ++seed) {
        auto rng = rng_for(700 + seed);
        WitnessedTriangle t = random_triangle(rng);
        WitnessedTriangle same = relax_weight(t, Q(0));
        CHECK(same_matrix(same.tri.w, t.tri.w));
        CHECK(same.tri.weight == t.tri.weight);
        const Q s1 = fktest::grid_value(rng, 0, 8), s2 = fktest::grid_value(rng, 0, 8);
        WitnessedTriangle r1 = relax_weight(t, s1);
        CHECK(r1.tri.weight == t.tri.weight + s1);
        CHECK(verify_triangle(r1).ok);
        WitnessedTriangle r12 = relax_weight(r1, s2), r3 = relax_weight(t, s1 + s2);
        CHECK(same_matrix(r12.tri.w, r3.tri.w));
        CHECK(same_structure(r12.tri.w.target, r3.tri.w.target));
        CHECK(verify_triangle(r12).ok);

        for (int k : {1, -1, 2}) {
            WitnessedTriangle tk = translate_triangle(t, k);
            CHECK(tk.tri.weight == t.tri.weight);
            TriangleCheck c = verify_triangle(tk);
            CHECK_MESSAGE(c.ok, (c.failed.empty() ? "" : c.failed.front()));
        }
    }
}

TEST_CASE("rotation") {
    // weight 0: the standard rotation
    auto rng0 = rng_for(800);
    FilteredComplex x = fktest::random_complex(rng0, 3), y = fktest::random_complex(rng0, 3);
    WitnessedTriangle c0 = triangle_from_morphism(fktest::random_closed_map(x, y, rng0, Q(0)));
    WitnessedTriangle r0 = rotate(c0);
    CHECK(r0.tri.weight == Q(0));
    CHECK(verify_triangle(r0).ok);

    const Q r(3, 2);
    WitnessedTriangle e = eta_triangle(x, r);
    WitnessedTriangle re = rotate(e);
    CHECK(re.tri.weight == 2 * r);
    CHECK(verify_triangle(re).ok);

    for (int seed = 0; seed < 60; ++seed) {
        auto rng = rng_for(801 + seed);
        WitnessedTriangle t = random_triangle(rng);
        WitnessedTriangle rt = rotate(t);
        CHECK(rt.tri.weight == 2 * t.tri.weight);
        TriangleCheck c = verify_triangle(rt);
        CHECK_MESSAGE(c.ok, (c.failed.empty() ? "" : c.failed.front()));
        CHECK(same_structure(rt.tri.A, t.tri.B));
        CHECK(same_structure(rt.tri.B, t.tri.C));
        CHECK(same_matrix(rt.tri.u, t.tri.v));
        // the new middle map is r-equivalent to w̄
        CHECK(r_equivalent(rt.tri.v, t.tri.w, Q(0), t.tri.weight));

        WitnessedTriangle nt = rotate_negative(t);
        CHECK(nt.tri.weight == 2 * t.tri.weight);
        TriangleCheck nc = verify_triangle(nt);
        CHECK_MESSAGE(nc.ok, (nc.failed.empty() ? "" : nc.failed.front()));
        CHECK(same_structure(nt.tri.B, t.tri.A));
        CHECK(same_structure(nt.tri.C, t.tri.B));
        CHECK(same_matrix(nt.tri.v, t.tri.u));
    }
}

TEST_CASE("weighted octahedron") {
    {
        const Q r(1), s(5, 2);
        auto rng = rng_for(900);
        FilteredComplex e = fktest::random_complex(rng, 3);
        WitnessedTriangle d1 = eta_triangle(e, r);
        WitnessedTriangle d2 = relax_weight(triangle_from_morphism(eta(d1.tri.C, Q(0))), s);
        Octahedron o = octahedron(d1, d2);
        CHECK(o.d3.tri.weight == Q(0));
        CHECK(o.d4.tri.weight == r + s);
        CHECK(verify_triangle(o.d3).ok);
        CHECK(verify_triangle(o.d4).ok);
    }
    CHECK_THROWS_AS(octahedron(eta_triangle(interval_e1(Q(0)), Q(1)), eta_triangle(interval_e1(Q(0)), Q(1))),
                    PreconditionError);

    std::map<std::string, int> square_fail;
    for (int seed = 0; seed < 50; ++seed) {
        auto rng = rng_for(901 + seed);
        WitnessedTriangle d1 = random_triangle(rng);
        WitnessedTriangle d2 = random_triangle_from(rng, d1.tri.C);
        Octahedron o = octahedron(d1, d2);
        CHECK(o.d3.tri.weight == Q(0));
        CHECK(o.d4.tri.weight == d1.tri.weight + d2.tri.weight);
        TriangleCheck c3 = verify_triangle(o.d3), c4 = verify_triangle(o.d4);
        CHECK_MESSAGE(c3.ok, (c3.failed.empty() ? "" : c3.failed.front()));
        CHECK_MESSAGE(c4.ok, (c4.failed.empty() ? "" : c4.failed.front()));
        CHECK(same_structure(o.d3.tri.A, d1.tri.B));
        CHECK(same_structure(o.d3.tri.B, d2.tri.B));
        for (const auto& sq : o.squares) {
            CHECK_MESSAGE(sq.holds, sq.name);
            if (!sq.holds) ++square_fail[sq.name];
        }
    }
}

TEST_CASE("sums of triangles") {
    auto rng0 = rng_for(1000);
    FilteredComplex x = fktest::random_complex(rng0, 3);
    WitnessedTriangle a = eta_triangle(fktest::random_complex(rng0, 3), Q(1));
    WitnessedTriangle b = eta_triangle(fktest::random_complex(rng0, 3), Q(3));
    WitnessedTriangle ab = sum_triangles(a, b);
    CHECK(ab.tri.weight == Q(3));
    CHECK(verify_triangle(ab).ok);
    WitnessedTriangle ax = sum_triangles(a, identity_triangle(x));
    CHECK(ax.tri.weight == a.tri.weight);
    CHECK(verify_triangle(ax).ok);
    WitnessedTriangle zz = sum_triangles(identity_triangle(x), singleton_triangle(x));
    CHECK(zz.tri.weight == Q(0));
    CHECK(verify_triangle(zz).ok);

    for (int seed = 0; seed < 50; ++seed) {
        auto rng = rng_for(1001 + seed);
        WitnessedTriangle p = random_triangle(rng), q = random_triangle(rng);
        WitnessedTriangle pq = sum_triangles(p, q);
        CHECK(pq.tri.weight == std::max(p.tri.weight, q.tri.weight));
        CHECK(pq.tri.A.size() == p.tri.A.size() + q.tri.A.size());
        CHECK(pq.tri.C.size() == p.tri.C.size() + q.tri.C.size());
        TriangleCheck c = verify_triangle(pq);
        CHECK_MESSAGE(c.ok, (c.failed.empty() ? "" : c.failed.front()));
    }
}

TEST_CASE("filling morphisms of triangles") {
    for (int seed = 0; seed < 40; ++seed) {
        auto rng = rng_for(1100 + seed);
        WitnessedTriangle t = random_triangle(rng);
        Fill fl = fill_morphism(t, t, identity_map(t.tri.A), identity_map(t.tri.B));
        CHECK(fl.middle_ok);
        CHECK(fl.right_ok);
        const Q r = t.tri.weight;
        ChainMap n = map_from_matrix(t.tri.C, shift_complex(t.tri.C, -r), F2SparseMatrix::identity(t.tri.C.size()));
        CHECK(homotopic_within(fl.h, n, Ext(r)));

        // comparison with the underlying cone triangle: h′∘h ≃_0 η_3r
        WitnessedTriangle base = triangle_from_morphism(t.tri.u);
        if (base.tri.weight != Q(0)) continue;
        WitnessedTriangle rel = relax_weight(t, r);  // weight 2r
        Fill there = fill_morphism(rel, base, identity_map(t.tri.A), identity_map(t.tri.B));
        Fill back = fill_morphism(base, t, identity_map(t.tri.A), identity_map(t.tri.B));
        CHECK(there.middle_ok);
        CHECK(back.middle_ok);
        // back: C′ → C, there: C → Σ^{-2r}C′; shift back by -2r and compose
        ChainMap sback = reinterpret(shift_map(back.h, -2 * r), there.h.target, shift_complex(t.tri.C, -2 * r));
        ChainMap comp = compose(sback, there.h);
        ChainMap n3 = map_from_matrix(t.tri.C, shift_complex(t.tri.C, -3 * r),
                                      F2SparseMatrix::identity(t.tri.C.size()));
        CHECK(homotopic_within(reinterpret(comp, t.tri.C, n3.target), n3, Ext(0)));
    }

    // legs that are isomorphisms give an isomorphism
    for (int seed = 0; seed < 40; ++seed) {
        auto rng = rng_for(1200 + seed);
        const Q r = fktest::grid_value(rng, 0, 6), s = fktest::grid_value(rng, 0, 6);
        ChainMap f = fktest::random_r_iso(rng, r), g = fktest::random_r_iso(rng, s);
        std::uniform_int_distribution<int> mode(0, 2);
        ChainMap u1, u2;
        switch (mode(rng)) {
            case 0:
                u1 = zero_map(f.source, g.source);
                u2 = zero_map(f.target, g.target);
                break;
            case 1:
                g = identity_map(fktest::random_complex(rng, 3));
                u2 = fktest::random_closed_map(f.target, g.target, rng, Q(0));
                u1 = compose(u2, f);
                break;
            default:
                f = identity_map(fktest::random_complex(rng, 3));
                u1 = fktest::random_closed_map(f.source, g.source, rng, Q(0));
                u2 = compose(g, u1);
                break;
        }
        WitnessedTriangle d1 = triangle_from_morphism(u1), d2 = triangle_from_morphism(u2);
        Fill fl = fill_morphism(d1, d2, f, g);
        CHECK(fl.middle_ok);
        CHECK(fl.right_ok);
        CHECK(is_r_isomorphism(fl.h, r + s));
    }
}

TEST_CASE("limit weights") {
    const Q r(2);
    FilteredComplex a = interval_e1(Q(0));
    FilteredComplex zero;
    {
        // A → 0 → Σ^{-r}TA → TA with the identity matrix as last map
        LimitTriangle t{a, zero, shift_complex(translate(a), -r), zero_map(a, zero), {}, {}};
        t.v = zero_map(zero, t.C);
        t.w = map_from_matrix(t.C, translate(a), F2SparseMatrix::identity(1));
        LimitWeight u = unstable_weight_upper(t);
        CHECK(u.bound == Ext(r));
        CHECK(u.minimal_on_grid);
        REQUIRE(u.certificate);
        CHECK(verify_triangle(*u.certificate).ok);
        LimitWeight st = stable_weight_upper(t);
        CHECK(st.bound == Ext(r));
    }
    {
        // A → 0 → Σ^{r}TA → TA with η as last map
        LimitTriangle t{a, zero, shift_complex(translate(a), r), zero_map(a, zero), {}, {}};
        t.v = zero_map(zero, t.C);
        t.w = eta(translate(a), r);
        LimitWeight u = unstable_weight_upper(t);
        CHECK(u.bound == Ext(r));
        LimitWeight st = stable_weight_upper(t);
        CHECK(st.bound == Ext(0));
        CHECK(st.s == r);
    }
    {
        // a C₀ triangle has weight 0
        auto rng = rng_for(1300);
        FilteredComplex x = fktest::random_complex(rng, 3), y = fktest::random_complex(rng, 3);
        WitnessedTriangle c = triangle_from_morphism(fktest::random_closed_map(x, y, rng, Q(0)));
        LimitTriangle t{c.tri.A, c.tri.B, c.tri.C, c.tri.u, c.tri.v, c.tri.w};
        CHECK(unstable_weight_upper(t).bound == Ext(0));
        CHECK(stable_weight_upper(t).bound == Ext(0));
    }
    {
        // grid: 0 and the nonnegative ℓ differences
        LimitTriangle t{interval_e1(Q(1)), interval_e1(Q(3)), zero, {}, {}, {}};
        std::vector<Q> g = weight_grid(t);
        CHECK(g == std::vector<Q>{Q(0), Q(2)});
    }
}

TEST_CASE("triangular weights") {
    std::vector<std::pair<WitnessedTriangle, WitnessedTriangle>> pairs;
    for (int seed = 0; seed < 25; ++seed) {
        auto rng = rng_for(1400 + seed);
        WitnessedTriangle d1 = random_triangle(rng);
        pairs.emplace_back(d1, random_triangle_from(rng, d1.tri.C));
    }
    {
        // B = 0 in the first triangle
        auto rng = rng_for(1450);
        WitnessedTriangle d1 = singleton_triangle(fktest::random_complex(rng, 3));
        pairs.emplace_back(d1, random_triangle_from(rng, d1.tri.C));
    }
    for (const TriangularWeight& wf : {persistence_weight(), flat_weight(), mixed_weight(Q(1), Q(1)),
                                       mixed_weight(Q(3), Q(1, 2))}) {
        WeightReport rep = check_triangular_weight(wf, pairs);
        CHECK(rep.pairs == static_cast<int>(pairs.size()));
        CHECK_MESSAGE(rep.violations.empty(), wf.name << ": " << (rep.violations.empty() ? "" : rep.violations.front()));
    }
    CHECK(flat_weight().w0 == Q(1));
    CHECK(persistence_weight().w0 == Q(0));
    CHECK(mixed_weight(Q(1), Q(2)).w0 == Q(2));
}

}
