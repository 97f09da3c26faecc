#include "fk/solve.hpp"
#include "fk/tpc.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace fk {

namespace {

// Certifies A → B′ → C′ → Σ^{-K}TA (maps of shift ≤ 0) as strict exact of
// weight K with φ = [v̄, H] and ψ = [K′; w̄].
std::optional<WitnessedTriangle> certify(const FilteredComplex& a, const FilteredComplex& bp,
                                         const FilteredComplex& cp, const ChainMap& u, const ChainMap& v,
                                         const ChainMap& w, const Q& k) {
    const FilteredComplex skc = shift_complex(cp, k);
    MapSystem sys;
    const int kp = sys.unknown(skc, bp, 0, Ext(0));
    const int h = sys.unknown(a, cp, -1, Ext(0));
    const int h3 = sys.unknown(skc, cp, -1, Ext(0));
    const int e1 = sys.equation(map_from_matrix(skc, bp, multiply(u.matrix(), w.matrix()), 1));
    sys.boundary_term(e1, kp);
    const int e2 = sys.equation(map_from_matrix(a, cp, multiply(v.matrix(), u.matrix())));
    sys.boundary_term(e2, h);
    const int e3 = sys.equation(eta(cp, k));
    sys.term(e3, kp, v.matrix());
    sys.term(e3, h, std::nullopt, w.matrix());
    sys.boundary_term(e3, h3);
    auto sol = sys.solve();
    if (!sol) return std::nullopt;

    Cone c = cone(u);
    const int nb = bp.size();
    F2SparseMatrix phi(cp.size(), c.complex.size());
    for (int b = 0; b < nb; ++b) phi.cols[b] = v.cols[b];
    for (int i = 0; i < a.size(); ++i) phi.cols[nb + i] = (*sol)[h].cols[i];
    F2SparseMatrix psi(c.complex.size(), cp.size());
    for (int x = 0; x < cp.size(); ++x) {
        F2Vector col = (*sol)[kp].cols[x];
        for (int i : w.cols[x]) col.push_back(nb + i);
        psi.cols[x] = normalize(std::move(col));
    }
    WitnessedTriangle out;
    out.tri = {a, bp, cp, u, v, w, k};
    out.wit.Cprime = c.complex;
    out.wit.phi = map_from_matrix(c.complex, cp, phi);
    out.wit.psi = map_from_matrix(skc, c.complex, psi);
    if (!verify_triangle(out).ok) return std::nullopt;
    return out;
}

struct Level {
    Q k;
    std::vector<ChainMap> reps;  // the map itself when its shift allows, then the σ-representative
};

std::vector<Level> levels_for(const ChainMap& f, const std::vector<Q>& grid) {
    ChainMap rep;
    const Ext sigma = spectral_invariant(f, &rep);
    const Ext own = shift_of_map(f);
    std::vector<Level> out;
    if (sigma.is_neg_inf()) {
        for (const Q& g : grid) {
            Level l{g, {}};
            if (!f.is_zero() && own <= Ext(g)) l.reps.push_back(f);
            l.reps.push_back(zero_map(f.source, f.target));
            out.push_back(std::move(l));
        }
        return out;
    }
    const Q lo = std::max(sigma.value(), Q(0));
    std::set<Q> ks{lo};
    for (const Q& g : grid)
        if (g >= lo) ks.insert(g);
    for (const Q& k : ks) {
        Level l{k, {}};
        if (own <= Ext(k) && !same_matrix(f, rep)) l.reps.push_back(f);
        l.reps.push_back(rep);
        out.push_back(std::move(l));
    }
    return out;
}

}  // namespace

std::vector<Q> weight_grid(const LimitTriangle& t) {
    std::set<Q> ells;
    for (const auto* x : {&t.A, &t.B, &t.C})
        for (const auto& g : x->gens) ells.insert(g.ell);
    std::set<Q> grid{Q(0)};
    for (const Q& p : ells)
        for (const Q& q : ells)
            if (q >= p) grid.insert(q - p);
    return {grid.begin(), grid.end()};
}

LimitWeight unstable_weight_upper(const LimitTriangle& t) {
    for (const auto* f : {&t.u, &t.v, &t.w})
        if (f->degree != 0 || !is_closed(*f)) throw PreconditionError("limit triangle maps must be closed of degree 0");
    const std::vector<Q> grid = weight_grid(t);
    const auto lu = levels_for(t.u, grid);
    const auto lv = levels_for(t.v, grid);
    const auto lw = levels_for(t.w, grid);

    std::vector<std::tuple<Q, int, int, int>> order;
    for (int i = 0; i < static_cast<int>(lu.size()); ++i)
        for (int j = 0; j < static_cast<int>(lv.size()); ++j)
            for (int k = 0; k < static_cast<int>(lw.size()); ++k)
                order.emplace_back(lu[i].k + lv[j].k + lw[k].k, i, j, k);
    std::sort(order.begin(), order.end());

    LimitWeight res;
    for (const auto& [total, i, j, k] : order) {
        const Q ku = lu[i].k, kv = lv[j].k;
        const FilteredComplex bp = shift_complex(t.B, -ku);
        const FilteredComplex cp = shift_complex(t.C, -ku - kv);
        for (const ChainMap& ru : lu[i].reps)
            for (const ChainMap& rv : lv[j].reps)
                for (const ChainMap& rw : lw[k].reps) {
                    const ChainMap u = reinterpret(ru, t.A, bp);
                    const ChainMap v = reinterpret(rv, bp, cp);
                    const ChainMap w = reinterpret(rw, cp, shift_complex(translate(t.A), -total));
                    if (auto cert = certify(t.A, bp, cp, u, v, w, total)) {
                        res.bound = Ext(total);
                        res.ku = ku;
                        res.kv = kv;
                        res.kw = lw[k].k;
                        res.certificate = std::move(cert);
                        res.minimal_on_grid = true;
                        return res;
                    }
                }
    }
    return res;
}

LimitTriangle shift_first_last(const LimitTriangle& t, const Q& s) {
    LimitTriangle out = t;
    out.A = shift_complex(t.A, s);
    out.u = reinterpret(t.u, out.A, t.B);
    out.w = reinterpret(t.w, t.C, translate(out.A));
    return out;
}

LimitWeight stable_weight_upper(const LimitTriangle& t, const std::vector<Q>& extra_s) {
    std::set<Q> ss;
    for (const Q& g : weight_grid(t)) ss.insert(g);
    for (const Q& e : extra_s)
        if (e >= 0) ss.insert(e);
    LimitWeight best;
    for (const Q& s : ss) {
        LimitWeight lw = unstable_weight_upper(shift_first_last(t, s));
        if (lw.bound < best.bound) {
            best = std::move(lw);
            best.s = s;
        }
    }
    best.minimal_on_grid = false;
    return best;
}

}  // namespace fk
