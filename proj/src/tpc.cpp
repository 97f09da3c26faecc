#include "fk/tpc.hpp"

#include "fk/solve.hpp"

#include <algorithm>

namespace fk {

namespace {

bool map_ok(const ChainMap& f, const FilteredComplex& src, const FilteredComplex& tgt) {
    if (f.source.size() != src.size() || f.target.size() != tgt.size()) return false;
    if (!same_structure(f.source, src) || !same_structure(f.target, tgt)) return false;
    if (f.degree != 0) return false;
    try {
        check_map(f);
    } catch (const std::exception&) {
        return false;
    }
    return is_closed(f) && shift_of_map(f) <= Ext(0);
}

std::string obstruction(const ChainMap& f, const Q& r) {
    if (shift_of_map(f) > Ext(0)) return "map has positive shift " + shift_of_map(f).str();
    Barcode b = barcode_of(cone(f).complex);
    for (const auto& bar : b)
        if (bar.infinite() || bar.length() > r) return "cone bar '" + format_bar(bar) + "' obstructs";
    return "no obstruction found";
}

}  // namespace

bool r_equivalent(const ChainMap& f, const ChainMap& g, const Q& level, const Q& r) {
    return homotopic_within(f, g, Ext(level + r));
}

bool is_r_isomorphism(const ChainMap& f, const Q& r) {
    if (f.degree != 0 || !is_closed(f) || shift_of_map(f) > Ext(0)) return false;
    return is_r_acyclic(cone(f).complex, r);
}

ChainMap right_r_inverse(const ChainMap& f, const Q& r) {
    const FilteredComplex srb = shift_complex(f.target, r);
    MapSystem sys;
    const int psi = sys.unknown(srb, f.source, 0, Ext(0));
    const int h = sys.unknown(srb, f.target, -1, Ext(0));
    const int eq = sys.equation(eta(f.target, r));
    sys.term(eq, psi, f.matrix());
    sys.boundary_term(eq, h);
    sys.closed(psi);
    auto sol = sys.solve();
    if (!sol) throw PreconditionError("no right r-inverse: " + obstruction(f, r));
    return (*sol)[psi];
}

ChainMap left_r_inverse(const ChainMap& f, const Q& r) {
    const FilteredComplex sa = shift_complex(f.source, -r);
    MapSystem sys;
    const int phi = sys.unknown(f.target, sa, 0, Ext(0));
    const int h = sys.unknown(f.source, sa, -1, Ext(0));
    const int eq = sys.equation(map_from_matrix(f.source, sa, F2SparseMatrix::identity(f.source.size())));
    sys.term(eq, phi, std::nullopt, f.matrix());
    sys.boundary_term(eq, h);
    sys.closed(phi);
    auto sol = sys.solve();
    if (!sol) throw PreconditionError("no left r-inverse: " + obstruction(f, r));
    return (*sol)[phi];
}

RInverses r_inverses(const ChainMap& f, const Q& r) {
    if (!is_r_isomorphism(f, r)) throw PreconditionError("not an r-isomorphism: " + obstruction(f, r));
    return {left_r_inverse(f, r), right_r_inverse(f, r)};
}

namespace {

// Hom columns for f's degree: D-images of all degree-1-lower elementary maps,
// then the elementary maps of f's degree sorted by filtration.
struct SigmaSystem {
    F2SparseMatrix a;
    int nboundary = 0;
    std::vector<std::pair<int, int>> elem;  // (i, j) of elementary columns
    std::vector<Q> elem_ell;
    F2Vector rhs;
};

SigmaSystem sigma_system(const ChainMap& f) {
    const FilteredComplex& x = f.source;
    const FilteredComplex& y = f.target;
    const int nx = x.size(), ny = y.size();
    SigmaSystem s;
    s.a = F2SparseMatrix(nx * ny, 0);
    std::vector<std::vector<int>> co(static_cast<std::size_t>(nx));
    for (int m = 0; m < nx; ++m)
        for (int i : x.d[m]) co[i].push_back(m);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            if (y.gens[j].degree - x.gens[i].degree != f.degree - 1) continue;
            std::vector<int> bd;
            for (int k : y.d[j]) bd.push_back(i * ny + k);
            for (int m : co[i]) bd.push_back(m * ny + j);
            s.a.cols.push_back(normalize(std::move(bd)));
        }
    s.nboundary = s.a.ncols();
    std::vector<std::pair<int, int>> el;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            if (y.gens[j].degree - x.gens[i].degree == f.degree) el.emplace_back(i, j);
    std::stable_sort(el.begin(), el.end(), [&](auto p, auto q) {
        return y.gens[p.second].ell - x.gens[p.first].ell < y.gens[q.second].ell - x.gens[q.first].ell;
    });
    for (auto [i, j] : el) {
        s.a.cols.push_back({i * ny + j});
        s.elem.emplace_back(i, j);
        s.elem_ell.push_back(y.gens[j].ell - x.gens[i].ell);
    }
    std::vector<int> rhs;
    for (int i = 0; i < nx; ++i)
        for (int j : f.cols[i]) rhs.push_back(i * ny + j);
    std::sort(rhs.begin(), rhs.end());
    s.rhs = rhs;
    return s;
}

// Columns allowed at level k: all boundaries plus elementary maps with ℓ ≤ k.
std::optional<ChainMap> solve_at(const SigmaSystem& s, const ChainMap& f, int nelem) {
    std::vector<int> allowed;
    for (int c = 0; c < s.nboundary + nelem; ++c) allowed.push_back(c);
    auto sol = solve_in_span(s.a, s.rhs, allowed);
    if (!sol) return std::nullopt;
    ChainMap rep = zero_map(f.source, f.target, f.degree);
    for (int c : *sol)
        if (c >= s.nboundary) {
            auto [i, j] = s.elem[c - s.nboundary];
            rep.cols[i].push_back(j);
        }
    for (auto& c : rep.cols) std::sort(c.begin(), c.end());
    return rep;
}

int count_at_most(const SigmaSystem& s, const Q& k) {
    return static_cast<int>(std::upper_bound(s.elem_ell.begin(), s.elem_ell.end(), k) - s.elem_ell.begin());
}

}  // namespace

Ext spectral_invariant(const ChainMap& f, ChainMap* representative) {
    if (!is_closed(f)) throw PreconditionError("spectral_invariant needs a closed map");
    SigmaSystem s = sigma_system(f);
    if (auto rep = solve_at(s, f, 0)) {
        if (representative) *representative = *rep;
        return Ext::neg_inf();
    }
    // smallest prefix of the sorted elementary columns that works; prefixes
    // only change at distinct filtration values
    std::vector<int> cuts;
    for (std::size_t k = 0; k < s.elem_ell.size(); ++k)
        if (k + 1 == s.elem_ell.size() || s.elem_ell[k + 1] != s.elem_ell[k]) cuts.push_back(static_cast<int>(k) + 1);
    std::size_t lo = 0, hi = cuts.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (solve_at(s, f, cuts[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    if (lo == cuts.size()) throw std::logic_error("spectral_invariant: map is not in the span of Hom");
    if (representative) *representative = *solve_at(s, f, cuts[lo]);
    return Ext(s.elem_ell[cuts[lo] - 1]);
}

std::optional<ChainMap> representative_at(const ChainMap& f, const Q& k) {
    SigmaSystem s = sigma_system(f);
    return solve_at(s, f, count_at_most(s, k));
}

TriangleCheck verify_triangle(const Triangle& t, const TriangleWitness& wit) {
    TriangleCheck res;
    auto fail = [&](const std::string& clause) {
        res.ok = false;
        res.failed.push_back(clause);
    };
    const Q r = t.weight;
    if (r < 0) fail("weight");
    const FilteredComplex last = shift_complex(translate(t.A), -r);
    if (!map_ok(t.u, t.A, t.B)) fail("u-map");
    if (!map_ok(t.v, t.B, t.C)) fail("v-map");
    if (!map_ok(t.w, t.C, last)) fail("w-map");
    if (!res.ok) return res;

    Cone c = cone(t.u);
    if (!same_structure(wit.Cprime, c.complex) || wit.Cprime.size() != c.complex.size()) {
        fail("cone");
        return res;
    }
    if (!map_ok(wit.phi, wit.Cprime, t.C)) fail("phi-map");
    const FilteredComplex src_psi = shift_complex(t.C, r);
    if (!map_ok(wit.psi, src_psi, wit.Cprime)) fail("psi-map");
    if (!res.ok) return res;

    const ChainMap phi = reinterpret(wit.phi, c.complex, t.C);
    const ChainMap psi = reinterpret(wit.psi, src_psi, c.complex);
    if (!is_r_acyclic(cone(phi).complex, r)) fail("phi-r-iso");
    if (!homotopic_within(compose(phi, psi), eta(t.C, r), Ext(0))) fail("phi-psi");
    if (!homotopic_within(t.v, compose(phi, c.incl), Ext(0))) fail("v-factor");
    const ChainMap wr = reinterpret(t.w, src_psi, c.proj.target);
    if (!homotopic_within(wr, compose(c.proj, psi), Ext(0))) fail("w-factor");
    return res;
}

WitnessedTriangle triangle_from_morphism(const ChainMap& f) {
    if (f.degree != 0 || !is_closed(f)) throw PreconditionError("triangle_from_morphism needs a closed degree-0 map");
    const Ext sh = shift_of_map(f);
    const Q t = sh > Ext(0) ? sh.value() : Q(0);
    WitnessedTriangle out;
    Triangle& tri = out.tri;
    tri.A = f.source;
    tri.B = shift_complex(f.target, -t);
    tri.u = reinterpret(f, tri.A, tri.B);
    Cone c = cone(tri.u);
    tri.C = c.complex;
    tri.v = c.incl;
    tri.w = reinterpret(c.proj, tri.C, shift_complex(c.proj.target, -t));
    tri.weight = t;
    out.wit.Cprime = c.complex;
    out.wit.phi = identity_map(c.complex);
    out.wit.psi = eta(c.complex, t);
    return out;
}

WitnessedTriangle eta_triangle(const FilteredComplex& a, const Q& r) {
    WitnessedTriangle out;
    Triangle& tri = out.tri;
    tri.u = eta(a, r);
    tri.A = tri.u.source;
    tri.B = a;
    Cone c = cone(tri.u);
    tri.C = c.complex;
    tri.v = c.incl;
    tri.w = zero_map(tri.C, shift_complex(translate(tri.A), -r));
    tri.weight = r;
    out.wit.Cprime = c.complex;
    out.wit.phi = identity_map(c.complex);
    out.wit.psi = eta(c.complex, r);
    return out;
}

WitnessedTriangle identity_triangle(const FilteredComplex& x) {
    WitnessedTriangle out;
    Triangle& tri = out.tri;
    tri.A = FilteredComplex{};
    tri.B = x;
    tri.C = x;
    tri.u = zero_map(tri.A, x);
    tri.v = identity_map(x);
    tri.w = zero_map(x, FilteredComplex{});
    tri.weight = 0;
    Cone c = cone(tri.u);
    out.wit.Cprime = c.complex;
    out.wit.phi = reinterpret(identity_map(x), c.complex, x);
    out.wit.psi = reinterpret(identity_map(x), x, c.complex);
    return out;
}

WitnessedTriangle singleton_triangle(const FilteredComplex& x) {
    WitnessedTriangle out;
    Triangle& tri = out.tri;
    tri.A = translate_inverse(x);
    tri.B = FilteredComplex{};
    tri.C = x;
    tri.u = zero_map(tri.A, tri.B);
    tri.v = zero_map(tri.B, x);
    tri.w = identity_map(x);
    tri.weight = 0;
    Cone c = cone(tri.u);
    out.wit.Cprime = c.complex;
    out.wit.phi = reinterpret(identity_map(x), c.complex, x);
    out.wit.psi = reinterpret(identity_map(x), x, c.complex);
    return out;
}

WitnessedTriangle relax_weight(const WitnessedTriangle& t, const Q& s) {
    if (s < 0) throw PreconditionError("relax_weight needs s >= 0");
    WitnessedTriangle out = t;
    const Q r = t.tri.weight + s;
    out.tri.weight = r;
    out.tri.w = reinterpret(t.tri.w, t.tri.C, shift_complex(translate(t.tri.A), -r));
    out.wit.psi = reinterpret(t.wit.psi, shift_complex(t.tri.C, r), t.wit.Cprime);
    return out;
}

WitnessedTriangle translate_triangle(const WitnessedTriangle& t, int k) {
    WitnessedTriangle out;
    Triangle& tri = out.tri;
    tri.A = translate_by(t.tri.A, k);
    tri.B = translate_by(t.tri.B, k);
    tri.C = translate_by(t.tri.C, k);
    tri.u = translate_map(t.tri.u, k);
    tri.v = translate_map(t.tri.v, k);
    tri.w = translate_map(t.tri.w, k);
    tri.weight = t.tri.weight;
    out.wit.Cprime = cone(tri.u).complex;
    out.wit.phi = reinterpret(t.wit.phi, out.wit.Cprime, tri.C);
    out.wit.psi = reinterpret(t.wit.psi, shift_complex(tri.C, tri.weight), out.wit.Cprime);
    return out;
}

WitnessedTriangle sum_triangles(const WitnessedTriangle& a0, const WitnessedTriangle& b0) {
    const Q m = std::max(a0.tri.weight, b0.tri.weight);
    const WitnessedTriangle a = relax_weight(a0, m - a0.tri.weight);
    const WitnessedTriangle b = relax_weight(b0, m - b0.tri.weight);
    WitnessedTriangle out;
    Triangle& tri = out.tri;
    tri.u = map_sum(a.tri.u, b.tri.u);
    tri.v = map_sum(a.tri.v, b.tri.v);
    tri.w = map_sum(a.tri.w, b.tri.w);
    tri.A = tri.u.source;
    tri.B = tri.u.target;
    tri.C = tri.v.target;
    tri.weight = m;

    Cone c = cone(tri.u);
    out.wit.Cprime = c.complex;
    // cone(u ⊕ ū) lists B, B̄, A, Ā; cone(u) ⊕ cone(ū) lists B, A, B̄, Ā
    const int nb = a.tri.B.size(), nbb = b.tri.B.size(), na = a.tri.A.size(), nab = b.tri.A.size();
    const int n = nb + nbb + na + nab;
    F2SparseMatrix p(n, n);
    for (int i = 0; i < nb; ++i) p.cols[i] = {i};
    for (int i = 0; i < nbb; ++i) p.cols[nb + i] = {nb + na + i};
    for (int i = 0; i < na; ++i) p.cols[nb + nbb + i] = {nb + i};
    for (int i = 0; i < nab; ++i) p.cols[nb + nbb + na + i] = {nb + na + nbb + i};
    const ChainMap phis = map_sum(a.wit.phi, b.wit.phi);
    const ChainMap psis = map_sum(a.wit.psi, b.wit.psi);
    out.wit.phi = map_from_matrix(c.complex, tri.C, multiply(phis.matrix(), p));
    out.wit.psi = map_from_matrix(shift_complex(tri.C, m), c.complex, multiply(inverse(p), psis.matrix()));
    return out;
}

Fill fill_morphism(const WitnessedTriangle& d1, const WitnessedTriangle& d2, const ChainMap& f, const ChainMap& g) {
    const Triangle& t1 = d1.tri;
    const Triangle& t2 = d2.tri;
    auto k = find_homotopy(add(compose(g, t1.u), compose(t2.u, f)), Ext(0));
    if (!k) throw PreconditionError("fill_morphism: the left square does not commute up to shift-0 homotopy");
    const int nb2 = t2.B.size();
    // F: cone(u1) → cone(u2), (b, a) ↦ (g b + K a, f a)
    F2SparseMatrix fm(nb2 + t2.A.size(), t1.B.size() + t1.A.size());
    for (int b = 0; b < t1.B.size(); ++b) fm.cols[b] = g.cols[b];
    for (int a = 0; a < t1.A.size(); ++a) {
        std::vector<int> col = k->cols[a];
        for (int x : f.cols[a]) col.push_back(nb2 + x);
        fm.cols[t1.B.size() + a] = normalize(std::move(col));
    }
    const Q r = t1.weight, s = t2.weight;
    const ChainMap lambda = left_r_inverse(d1.wit.phi, r);
    const F2SparseMatrix hm = multiply(d2.wit.phi.matrix(), multiply(fm, lambda.matrix()));
    Fill out;
    const FilteredComplex c2r = shift_complex(t2.C, -r);
    out.h = map_from_matrix(t1.C, c2r, hm);

    const ChainMap lhs_mid = compose(out.h, t1.v);
    const ChainMap rhs_mid = map_from_matrix(t1.B, c2r, multiply(t2.v.matrix(), g.matrix()));
    out.middle_ok = homotopic_within(lhs_mid, rhs_mid, Ext(r));

    const FilteredComplex last = shift_complex(translate(t2.A), -r - s);
    const ChainMap lhs_right = map_from_matrix(t1.C, last, multiply(t2.w.matrix(), hm));
    const ChainMap rhs_right = map_from_matrix(t1.C, last, multiply(f.matrix(), t1.w.matrix()));
    out.right_ok = homotopic_within(lhs_right, rhs_right, Ext(s));
    return out;
}

}  // namespace fk
