#include "fk/solve.hpp"
#include "fk/tpc.hpp"

namespace fk {

namespace {

// Rows [lo, lo+n) of a column, re-based to 0.
F2Vector slice(const F2Vector& v, int lo, int n) {
    F2Vector out;
    for (int i : v)
        if (i >= lo && i < lo + n) out.push_back(i - lo);
    return out;
}

F2Vector offset(const F2Vector& v, int k) {
    F2Vector out = v;
    for (int& i : out) i += k;
    return out;
}

F2Vector image(const ChainMap& f, const F2Vector& v) {
    std::vector<int> acc;
    for (int j : v) acc.insert(acc.end(), f.cols[j].begin(), f.cols[j].end());
    return normalize(std::move(acc));
}

}  // namespace

WitnessedTriangle rotate(const WitnessedTriangle& t) {
    const Triangle& d = t.tri;
    const Q r = d.weight;
    const int na = d.A.size(), nb = d.B.size(), nc = d.C.size();
    Cone cu = cone(d.u);
    const ChainMap phi = reinterpret(t.wit.phi, cu.complex, d.C);

    auto k = find_homotopy(add(compose(phi, cu.incl), d.v), Ext(0));
    if (!k) throw PreconditionError("rotate: v is not homotopic to phi∘i");

    Cone cv = cone(d.v);
    // φ̄(a) = (φ(a) + K ū a, ū a) on the TA generators
    F2SparseMatrix m(nc + nb, na);
    for (int a = 0; a < na; ++a) {
        F2Vector col = add(phi.cols[nb + a], image(*k, d.u.cols[a]));
        add_into(col, offset(d.u.cols[a], nc));
        m.cols[a] = col;
    }
    const FilteredComplex ta = translate(d.A);
    const ChainMap phibar = map_from_matrix(ta, cv.complex, m);
    const ChainMap psibar = left_r_inverse(phibar, r);  // Cone(v) → Σ^{-r}TA

    WitnessedTriangle out;
    Triangle& tri = out.tri;
    tri.A = d.B;
    tri.B = d.C;
    tri.C = psibar.target;
    tri.u = d.v;
    tri.v = compose(psibar, cv.incl);
    tri.w = map_from_matrix(tri.C, shift_complex(translate(d.B), -2 * r), d.u.matrix());
    tri.weight = 2 * r;
    out.wit.Cprime = cv.complex;
    out.wit.phi = psibar;
    out.wit.psi = map_from_matrix(shift_complex(ta, r), cv.complex, m);
    return out;
}

WitnessedTriangle rotate_negative(const WitnessedTriangle& t) {
    const Triangle& d = t.tri;
    const Q r = d.weight;
    const int na = d.A.size(), nb = d.B.size(), nc = d.C.size();
    Cone cu = cone(d.u);
    const FilteredComplex src = shift_complex(d.C, r);  // Σ^r C
    const ChainMap psi = reinterpret(t.wit.psi, src, cu.complex);

    // L with ∂L + L∂ = Σ^r w̄ + ψ_A, maps Σ^r C → TA
    const ChainMap wr = reinterpret(d.w, src, cu.proj.target);
    auto l = find_homotopy(add(wr, compose(cu.proj, psi)), Ext(0));
    if (!l) throw PreconditionError("rotate_negative: w does not factor through psi");

    WitnessedTriangle out;
    Triangle& tri = out.tri;
    tri.A = translate_inverse(src);
    tri.B = d.A;
    tri.C = d.B;
    tri.u = map_from_matrix(tri.A, d.A, d.w.matrix());
    tri.v = d.u;
    tri.weight = 2 * r;
    Cone cn = cone(tri.u);  // A ⊕ Σ^r C

    // φ_N(a, c) = ū a + (ψ_B + ū L) c
    F2SparseMatrix pm(nb, na + nc);
    for (int a = 0; a < na; ++a) pm.cols[a] = d.u.cols[a];
    for (int c = 0; c < nc; ++c) pm.cols[na + c] = add(slice(psi.cols[c], 0, nb), image(d.u, l->cols[c]));
    const ChainMap phin = map_from_matrix(cn.complex, d.B, pm);

    const FilteredComplex s2b = shift_complex(d.B, 2 * r);
    const FilteredComplex last = shift_complex(translate(tri.A), -2 * r);  // Σ^{-r} C
    const ChainMap vbar = map_from_matrix(s2b, cn.proj.target, d.v.matrix());

    auto solve = [&](bool pin_third) -> std::optional<ChainMap> {
        MapSystem sys;
        const int x = sys.unknown(s2b, cn.complex, 0, Ext(0));
        const int h1 = sys.unknown(s2b, d.B, -1, Ext(0));
        sys.closed(x);
        const int e1 = sys.equation(eta(d.B, 2 * r));
        sys.term(e1, x, pm);
        sys.boundary_term(e1, h1);
        if (pin_third) {
            const int h2 = sys.unknown(s2b, cn.proj.target, -1, Ext(0));
            const int e2 = sys.equation(vbar);
            sys.term(e2, x, cn.proj.matrix());
            sys.boundary_term(e2, h2);
        }
        auto sol = sys.solve();
        if (!sol) return std::nullopt;
        return (*sol)[x];
    };
    std::optional<ChainMap> psin = solve(true);
    if (psin) {
        tri.w = map_from_matrix(d.B, last, d.v.matrix());
    } else {
        psin = solve(false);
        if (!psin) throw PreconditionError("rotate_negative: no right inverse for the comparison map");
        tri.w = map_from_matrix(d.B, last, multiply(cn.proj.matrix(), psin->matrix()));
    }
    out.wit.Cprime = cn.complex;
    out.wit.phi = phin;
    out.wit.psi = *psin;
    return out;
}

Octahedron octahedron(const WitnessedTriangle& d1, const WitnessedTriangle& d2) {
    const Triangle& t1 = d1.tri;  // E → F → X
    const Triangle& t2 = d2.tri;  // X → A → B
    if (!same_structure(t1.C, t2.A) || t1.C.size() != t2.A.size())
        throw PreconditionError("octahedron: apex of the first triangle is not the base of the second");
    const Q r = t1.weight, s = t2.weight;
    const int nf = t1.B.size(), ne = t1.A.size(), na = t2.B.size();

    Cone xp = cone(t1.u);  // X′ = F ⊕ TE
    const ChainMap phi1 = reinterpret(d1.wit.phi, xp.complex, t2.A);
    const ChainMap uphi = compose(t2.u, phi1);  // X′ → A
    const ChainMap alpha2 = compose(uphi, xp.incl);

    Octahedron out;
    Cone c = cone(alpha2);  // A ⊕ TF
    {
        Triangle& tri = out.d3.tri;
        tri.A = t1.B;
        tri.B = t2.B;
        tri.C = c.complex;
        tri.u = alpha2;
        tri.v = c.incl;
        tri.w = c.proj;
        tri.weight = 0;
        out.d3.wit = {c.complex, identity_map(c.complex), identity_map(c.complex)};
    }

    // j: TE → C, e ↦ (uφ1(e), β e)
    const FilteredComplex te = translate(t1.A);
    F2SparseMatrix jm(na + nf, ne);
    for (int e = 0; e < ne; ++e) jm.cols[e] = add(uphi.cols[nf + e], offset(t1.u.cols[e], na));
    const ChainMap j = map_from_matrix(te, c.complex, jm);
    Cone b2 = cone(j);  // B″ = A ⊕ TF ⊕ T²E

    Cone bp = cone(t2.u);  // B′ = A ⊕ TX
    // φ′(a, x′) = (a, φ1 x′)
    F2SparseMatrix pm(bp.complex.size(), b2.complex.size());
    for (int a = 0; a < na; ++a) pm.cols[a] = {a};
    for (int x = 0; x < nf + ne; ++x) pm.cols[na + x] = offset(phi1.cols[x], na);
    const ChainMap phip = map_from_matrix(b2.complex, bp.complex, pm);
    const ChainMap psip = right_r_inverse(phip, r);  // Σ^r B′ → B″

    const ChainMap phi2 = reinterpret(d2.wit.phi, bp.complex, t2.C);
    const ChainMap phi2p = compose(phi2, phip);  // B″ → B
    const F2SparseMatrix psi2p = multiply(psip.matrix(), d2.wit.psi.matrix());  // Σ^{r+s}B → B″
    {
        Triangle& tri = out.d4.tri;
        tri.A = te;
        tri.B = c.complex;
        tri.C = t2.C;
        tri.u = j;
        tri.v = compose(phi2p, b2.incl);
        tri.w = map_from_matrix(t2.C, shift_complex(translate(te), -r - s), multiply(b2.proj.matrix(), psi2p));
        tri.weight = r + s;
        out.d4.wit.Cprime = b2.complex;
        out.d4.wit.phi = phi2p;
        out.d4.wit.psi = map_from_matrix(shift_complex(t2.C, r + s), b2.complex, psi2p);
    }

    auto square = [&](std::string name, const ChainMap& f, const ChainMap& g, const Q& level) {
        out.squares.push_back({std::move(name), homotopic_within(f, g, Ext(level)), level});
    };
    square("F-A", alpha2, compose(t2.u, t1.v), 0);
    square("A-B", compose(out.d4.tri.v, c.incl), t2.v, 0);
    {
        const FilteredComplex tgt = t2.w.target;  // Σ^{-s}TX
        const ChainMap lhs = compose(t2.w, out.d4.tri.v);
        const ChainMap rhs = map_from_matrix(c.complex, tgt, multiply(t1.v.matrix(), c.proj.matrix()));
        square("C-TF", lhs, rhs, 0);
    }
    square("TE-TF", compose(c.proj, j), map_from_matrix(te, c.proj.target, t1.u.matrix()), 0);
    {
        const FilteredComplex tgt = out.d4.tri.w.target;  // Σ^{-r-s}T²E
        const ChainMap lhs = map_from_matrix(t2.C, tgt, multiply(t1.w.matrix(), t2.w.matrix()));
        square("bottom-right", lhs, out.d4.tri.w, r);
    }
    return out;
}

TriangularWeight persistence_weight() {
    return {"persistence", [](const WitnessedTriangle& t) { return t.tri.weight; }, Q(0)};
}

TriangularWeight flat_weight() {
    return {"flat", [](const WitnessedTriangle&) { return Q(1); }, Q(1)};
}

TriangularWeight mixed_weight(const Q& a, const Q& b) {
    return {"mixed", [a, b](const WitnessedTriangle& t) { return a * t.tri.weight + b; }, b};
}

WeightReport check_triangular_weight(const TriangularWeight& wf,
                                     const std::vector<std::pair<WitnessedTriangle, WitnessedTriangle>>& pairs) {
    WeightReport rep;
    auto note = [&](int k, const std::string& what) {
        rep.violations.push_back("pair " + std::to_string(k) + ": " + what);
    };
    int k = 0;
    for (const auto& [d1, d2] : pairs) {
        ++rep.pairs;
        Octahedron oct = octahedron(d1, d2);
        const Q lhs = wf.weight(oct.d3) + wf.weight(oct.d4);
        const Q rhs = wf.weight(d1) + wf.weight(d2);
        if (lhs > rhs) note(k, "octahedral inequality " + format_rational(lhs) + " > " + format_rational(rhs));
        for (const WitnessedTriangle* t : std::initializer_list<const WitnessedTriangle*>{&d1, &d2, &oct.d3, &oct.d4})
            if (wf.weight(*t) < wf.w0) note(k, "weight below w0");
        for (const auto* x : {&d1.tri.A, &d1.tri.B, &d2.tri.C}) {
            WitnessedTriangle id = identity_triangle(*x);
            if (wf.weight(id) != wf.w0) note(k, "identity triangle weight differs from w0");
            if (wf.weight(rotate(id)) != wf.w0) note(k, "rotated identity triangle weight differs from w0");
        }
        if (d1.tri.B.empty()) {
            // Δ3 degenerates to 0 → A → A → 0
            if (!same_structure(oct.d3.tri.C, oct.d3.tri.B) || oct.d3.tri.C.size() != oct.d3.tri.B.size())
                note(k, "B = 0 but the third triangle is not 0 → D → D");
            else if (wf.weight(oct.d3) != wf.w0)
                note(k, "B = 0 third triangle weight differs from w0");
        }
        for (const auto* t : {&oct.d3, &oct.d4})
            if (!verify_triangle(*t).ok) note(k, "octahedron triangle fails verification");
        ++k;
    }
    return rep;
}

}  // namespace fk
