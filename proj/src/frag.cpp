#include "fk/frag.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

namespace fk {

namespace {

bool same(const FilteredComplex& a, const FilteredComplex& b) { return a.size() == b.size() && same_structure(a, b); }

std::string key_of(const FilteredComplex& x) { return format_barcode(barcode_of(x)); }

// Depth of cone(f) when f is an isomorphism at some r.
std::optional<Q> iso_depth(const ChainMap& f) {
    if (shift_of_map(f) > Ext(0) || !is_closed(f)) return std::nullopt;
    const Barcode b = barcode_of(cone(f).complex);
    if (has_infinite_bars(b)) return std::nullopt;
    return boundary_depth(b);
}

// First generator index of each bar in from_barcode(b).
std::vector<int> bar_offsets(const Barcode& b) {
    std::vector<int> off;
    int k = 0;
    for (const auto& bar : b) {
        off.push_back(k);
        k += bar.infinite() ? 1 : 2;
    }
    return off;
}

// Identity matrix from the bars of `src` to the bars of `tgt` along `pairs`.
F2SparseMatrix pairing_matrix(const Barcode& src, const Barcode& tgt, const std::vector<std::pair<int, int>>& pairs) {
    const auto os = bar_offsets(src), ot = bar_offsets(tgt);
    const int ns = from_barcode(src).size(), nt = from_barcode(tgt).size();
    F2SparseMatrix m(nt, ns);
    for (const auto& [i, j] : pairs) {
        m.cols[os[i]] = {ot[j]};
        if (!src[i].infinite()) m.cols[os[i] + 1] = {ot[j] + 1};
    }
    return m;
}

ChainMap through_models(const CanonicalForm& cs, const CanonicalForm& ct, const F2SparseMatrix& m) {
    const ChainMap mid = map_from_matrix(cs.to_x.source, ct.to_x.source, m);
    return compose(ct.to_x, compose(mid, cs.from_x));
}

int min_degree(const Barcode& b) {
    int d = b.front().degree;
    for (const auto& bar : b) d = std::min(d, bar.degree);
    return d;
}

Q min_lo(const Barcode& b) {
    Q q = b.front().lo;
    for (const auto& bar : b) q = std::min(q, bar.lo);
    return q;
}

}  // namespace

std::vector<FilteredComplex> ConeDecomposition::linearization() const {
    std::vector<FilteredComplex> out;
    for (const auto& s : steps) out.push_back(s.tri.A);
    return out;
}

Q ConeDecomposition::weight() const {
    Q w(0);
    for (const auto& s : steps) w += s.tri.weight;
    return w;
}

const FilteredComplex& ConeDecomposition::target() const { return steps.empty() ? start : steps.back().tri.C; }

bool FamilySpec::contains(const FilteredComplex& x) const { return contains(barcode_of(x)); }

bool FamilySpec::contains(const Barcode& b0) const {
    const Barcode b = sorted(b0);
    if (b.empty() && with_zero) return true;
    for (const auto& m : members) {
        Barcode mb = barcode_of(m);
        if (same_barcode(mb, b)) return true;
        if (mb.empty() || b.empty() || mb.size() != b.size()) continue;
        if (closed_T) mb = translate_barcode(mb, min_degree(mb) - min_degree(b));
        if (closed_shift) mb = shift_barcode(mb, min_lo(b) - min_lo(mb));
        if (same_barcode(mb, b)) return true;
    }
    return false;
}

DecompositionCheck check_decomposition(const ConeDecomposition& d, const FilteredComplex& x) {
    DecompositionCheck res;
    auto fail = [&](std::string what) {
        res.ok = false;
        res.failed.push_back(std::move(what));
    };
    const FilteredComplex* prev = &d.start;
    for (std::size_t i = 0; i < d.steps.size(); ++i) {
        const auto& s = d.steps[i];
        if (!same(s.tri.B, *prev)) fail("chain " + std::to_string(i));
        TriangleCheck c = verify_triangle(s);
        for (const auto& clause : c.failed) fail("triangle " + std::to_string(i) + ": " + clause);
        res.weight += s.tri.weight;
        prev = &s.tri.C;
    }
    if (!same(*prev, x)) fail("target");
    return res;
}

DecompositionCheck validate_decomposition(const ConeDecomposition& d, const FilteredComplex& x, const FamilySpec& f,
                                          const std::vector<FilteredComplex>& xprimes) {
    DecompositionCheck res = check_decomposition(d, x);
    if (!d.start.empty()) {
        res.ok = false;
        res.failed.push_back("start");
    }
    const auto lin = d.linearization();
    std::vector<Barcode> lb;
    for (const auto& e : lin) lb.push_back(barcode_of(e));
    std::vector<Barcode> want;
    for (const auto& p : xprimes) want.push_back(barcode_of(translate_inverse(p)));
    std::vector<int> slots;
    // assign the X′ entries in order; every other entry must be in F
    std::function<bool(std::size_t, std::size_t)> assign = [&](std::size_t pos, std::size_t next) -> bool {
        if (pos == lin.size()) return next == want.size();
        if (next < want.size() && same_barcode(lb[pos], want[next])) {
            slots.push_back(static_cast<int>(pos));
            if (assign(pos + 1, next + 1)) return true;
            slots.pop_back();
        }
        return f.contains(lb[pos]) && assign(pos + 1, next);
    };
    if (!assign(0, 0)) {
        res.ok = false;
        res.failed.push_back("linearization");
    }
    res.slots = slots;
    return res;
}

DecompositionCheck validate_decomposition(const ConeDecomposition& d, const FilteredComplex& x, const FamilySpec& f,
                                          const FilteredComplex& xprime) {
    return validate_decomposition(d, x, f, std::vector<FilteredComplex>{xprime});
}

DecompositionCheck validate_underline(const ConeDecomposition& d, const FilteredComplex& x, const FilteredComplex& xprime,
                                      const FamilySpec& f) {
    DecompositionCheck res = check_decomposition(d, x);
    if (!same(d.start, xprime)) {
        res.ok = false;
        res.failed.push_back("start");
    }
    for (const auto& e : d.linearization())
        if (!f.contains(e)) {
            res.ok = false;
            res.failed.push_back("linearization");
            break;
        }
    return res;
}

WitnessedTriangle triangle_with_iso(const ChainMap& u, const ChainMap& phi0, const Q& r) {
    Cone c = cone(u);
    if (!same(phi0.source, c.complex)) throw PreconditionError("triangle_with_iso: phi does not start at the cone");
    const ChainMap phi = reinterpret(phi0, c.complex, phi0.target);
    WitnessedTriangle out;
    Triangle& tri = out.tri;
    tri.A = u.source;
    tri.B = u.target;
    tri.C = phi.target;
    tri.u = u;
    tri.v = compose(phi, c.incl);
    const ChainMap psi = right_r_inverse(phi, r);
    tri.w = reinterpret(compose(c.proj, psi), tri.C, shift_complex(translate(tri.A), -r));
    tri.weight = r;
    out.wit = {c.complex, phi, psi};
    return out;
}

ConeDecomposition singleton_decomposition(const FilteredComplex& x) { return {FilteredComplex{}, {singleton_triangle(x)}}; }

ConeDecomposition triangle_decomposition(const WitnessedTriangle& t) {
    return {FilteredComplex{}, {singleton_triangle(t.tri.B), t}};
}

ConeDecomposition translate_decomposition(const ConeDecomposition& d, int k) {
    ConeDecomposition out;
    out.start = translate_by(d.start, k);
    for (const auto& s : d.steps) out.steps.push_back(translate_triangle(s, k));
    return out;
}

ConeDecomposition refine(const ConeDecomposition& d, int i, const ConeDecomposition& dp) {
    if (i < 0 || i >= static_cast<int>(d.steps.size())) throw PreconditionError("refine: index out of range");
    if (dp.steps.empty() || !dp.start.empty()) throw PreconditionError("refine: D′ must be a nonempty cone decomposition");
    if (!same(dp.target(), d.steps[i].tri.A)) throw PreconditionError("refine: D′ does not decompose X_i");
    const int k = static_cast<int>(dp.steps.size());
    std::vector<WitnessedTriangle> repl(static_cast<std::size_t>(k));
    WitnessedTriangle cur = d.steps[i];
    for (int j = k - 1; j >= 0; --j) {
        Octahedron o = octahedron(dp.steps[j], cur);
        repl[j] = std::move(o.d4);
        cur = std::move(o.d3);
    }
    ConeDecomposition out;
    out.start = d.start;
    out.steps.assign(d.steps.begin(), d.steps.begin() + i);
    out.steps.insert(out.steps.end(), repl.begin(), repl.end());
    out.steps.insert(out.steps.end(), d.steps.begin() + i + 1, d.steps.end());
    return out;
}

ConeDecomposition sum_decompositions(const ConeDecomposition& da, const ConeDecomposition& db) {
    if (!da.start.empty() || !db.start.empty()) throw PreconditionError("sum_decompositions: cone decompositions only");
    ConeDecomposition out = da;
    const FilteredComplex a = da.target();
    for (const auto& s : db.steps) out.steps.push_back(sum_triangles(identity_triangle(a), s));
    return out;
}

ConeDecomposition iso_decomposition(const ChainMap& h, const Q& r) {
    const ChainMap u = zero_map(translate_inverse(h.source), FilteredComplex{});
    return {FilteredComplex{}, {triangle_with_iso(u, reinterpret(h, cone(u).complex, h.target), r)}};
}

ConeDecomposition cone_decomposition(const ChainMap& g) {
    Cone k = cone(g);
    const auto depth = iso_depth(g);
    if (!depth) throw PreconditionError("cone_decomposition: the map is not an isomorphism at any r");
    const FilteredComplex tk = translate_inverse(k.complex);
    ConeDecomposition out;
    const ChainMap u1 = zero_map(FilteredComplex{}, FilteredComplex{});
    out.steps.push_back(triangle_with_iso(u1, zero_map(cone(u1).complex, tk), *depth));

    const ChainMap u2 = translate_map(k.incl, -1);  // T⁻¹Y → T⁻¹K
    Cone c2 = cone(u2);                              // T⁻¹Y, X, Y
    const int ny = g.target.size(), nx = g.source.size();
    F2SparseMatrix p(nx, c2.complex.size());
    for (int i = 0; i < nx; ++i) p.cols[ny + i] = {i};
    out.steps.push_back(triangle_with_iso(u2, map_from_matrix(c2.complex, g.source, p), Q(0)));
    return out;
}

ConeDecomposition case_one_decomposition(const Q& a, const Q& c, int degree) {
    if (a < c) throw PreconditionError("case_one_decomposition needs a >= c");
    const FilteredComplex ea = interval_e1(a, degree), ec = interval_e1(c, degree);
    ConeDecomposition out;
    out.steps.push_back(identity_triangle(FilteredComplex{}));
    ConeDecomposition mid = iso_decomposition(map_from_matrix(ea, ec, F2SparseMatrix::identity(1)), a - c);
    out.steps.push_back(mid.steps.front());
    out.steps.push_back(identity_triangle(ec));
    return out;
}

std::optional<ModelIso> best_model_iso(const FilteredComplex& source, const FilteredComplex& target) {
    const CanonicalForm cs = canonical_form(source), ct = canonical_form(target);
    const Barcode& bs = cs.barcode;
    const Barcode& bt = ct.barcode;
    const int n = static_cast<int>(bs.size()), m = static_cast<int>(bt.size());

    // cost of sending bar i to bar j by the identity matrix
    std::vector<std::vector<std::optional<Q>>> cost(n, std::vector<std::optional<Q>>(m));
    std::set<Q> cand{Q(0)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const Bar& s = bs[i];
            const Bar& t = bt[j];
            if (s.degree != t.degree || s.infinite() != t.infinite() || s.lo < t.lo) continue;
            if (!s.infinite() && *s.hi < *t.hi) continue;
            const FilteredComplex ms = from_barcode({s}), mt = from_barcode({t});
            F2SparseMatrix mm = F2SparseMatrix::identity(ms.size());
            cost[i][j] = iso_depth(map_from_matrix(ms, mt, mm));
            if (cost[i][j]) cand.insert(*cost[i][j]);
        }
    for (const auto* b : {&bs, &bt})
        for (const auto& bar : *b)
            if (!bar.infinite()) cand.insert(bar.length());

    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    auto feasible = [&](const Q& r, std::vector<std::pair<int, int>>* pairs) {
        const int total = 2 * (n + m);
        if (total == 0) return true;
        Graph g(static_cast<std::size_t>(total));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                if (cost[i][j] && *cost[i][j] <= r) boost::add_edge(i, n + j, g);
        for (int i = 0; i < n; ++i)
            if (!bs[i].infinite() && bs[i].length() <= r) boost::add_edge(i, n + m + i, g);
        for (int j = 0; j < m; ++j)
            if (!bt[j].infinite() && bt[j].length() <= r) boost::add_edge(2 * n + m + j, n + j, g);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i) boost::add_edge(2 * n + m + j, n + m + i, g);
        std::vector<boost::graph_traits<Graph>::vertex_descriptor> mate(static_cast<std::size_t>(total));
        boost::edmonds_maximum_cardinality_matching(g, &mate[0]);
        const auto null = boost::graph_traits<Graph>::null_vertex();
        for (int v = 0; v < total; ++v)
            if (mate[v] == null) return false;
        if (pairs)
            for (int i = 0; i < n; ++i) {
                const int w = static_cast<int>(mate[i]);
                if (w >= n && w < n + m) pairs->emplace_back(i, w - n);
            }
        return true;
    };
    const std::vector<Q> cs_sorted(cand.begin(), cand.end());
    auto it = std::find_if(cs_sorted.begin(), cs_sorted.end(), [&](const Q& r) { return feasible(r, nullptr); });
    if (it == cs_sorted.end()) return std::nullopt;
    std::vector<std::pair<int, int>> pairs;
    feasible(*it, &pairs);
    ModelIso out;
    out.map = through_models(cs, ct, pairing_matrix(bs, bt, pairs));
    const auto depth = iso_depth(out.map);
    if (!depth) return std::nullopt;
    out.r = *depth;
    return out;
}

Prop51Result prop51_pipeline(const FilteredComplex& x, const FilteredComplex& y, const FamilySpec& f, ShortRule rule) {
    if (!f.contains(Barcode{})) throw PreconditionError("prop51 needs 0 in the family");
    const CanonicalForm cx = canonical_form(x), cy = canonical_form(y);
    Prop51Result res;
    BottleneckResult bot = bottleneck(cx.barcode, cy.barcode, rule);
    res.tau = bot.value;
    res.matching = bot.matching;
    res.constant = Q(4 * static_cast<std::int64_t>(std::min(cx.barcode.size(), cy.barcode.size())) + 1);
    if (bot.value.is_pos_inf()) {
        res.bound = Ext::pos_inf();
        res.pair_bound = Ext::pos_inf();
        res.within_constant = true;
        return res;
    }
    const Q tau = bot.value.value();

    // Z: endpoint-wise maximum of every matched pair
    Barcode zb;
    std::vector<std::pair<int, int>> to_x, to_y;
    for (const auto& mt : bot.matching) {
        if (mt.left < 0 || mt.right < 0) continue;
        const Bar& a = cx.barcode[mt.left];
        const Bar& b = cy.barcode[mt.right];
        Bar z{a.degree, std::max(a.lo, b.lo), std::nullopt};
        if (!a.infinite()) z.hi = std::max(*a.hi, *b.hi);
        to_x.emplace_back(static_cast<int>(zb.size()), mt.left);
        to_y.emplace_back(static_cast<int>(zb.size()), mt.right);
        zb.push_back(z);
    }
    const FilteredComplex z = from_barcode(zb);
    const ChainMap h = compose(cx.to_x, map_from_matrix(z, cx.to_x.source, pairing_matrix(zb, cx.barcode, to_x)));
    const ChainMap g = compose(cy.to_x, map_from_matrix(z, cy.to_x.source, pairing_matrix(zb, cy.barcode, to_y)));
    const auto rh = iso_depth(h), rg = iso_depth(g);
    if (!rh || !rg) throw std::logic_error("prop51: matched comparison map is not an isomorphism");

    auto through = [&](const ChainMap& to_target, const Q& rt, const ChainMap& to_other) {
        ConeDecomposition d = cone_decomposition(to_other);
        const ChainMap u = zero_map(FilteredComplex{}, z);
        d.steps.push_back(triangle_with_iso(u, reinterpret(to_target, cone(u).complex, to_target.target), rt));
        return d;
    };
    res.forward = through(h, *rh, g);
    res.backward = through(g, *rg, h);
    res.bound = Ext(std::max(res.forward->weight(), res.backward->weight()));
    res.pair_bound = Ext(Q(4 * static_cast<std::int64_t>(to_x.size()) + 1) * tau);
    res.within_constant = res.bound <= Ext(res.constant * tau);
    return res;
}

DeltaBound delta_upper(const FilteredComplex& x, const FilteredComplex& xprime, const FamilySpec& f, ShortRule rule) {
    DeltaBound best;
    best.strategy = "none";
    auto offer = [&](const std::string& name, ConeDecomposition d) {
        DecompositionCheck c = validate_decomposition(d, x, f, xprime);
        if (!c.ok || Ext(c.weight) >= best.value) return;
        best.value = Ext(c.weight);
        best.strategy = name;
        best.witness = std::move(d);
    };
    if (auto m = best_model_iso(xprime, x)) offer("iso", iso_decomposition(m->map, m->r));
    const bool zero = f.contains(Barcode{});
    if (zero) {
        if (auto m = best_model_iso(x, xprime)) offer("cone", cone_decomposition(m->map));
        Prop51Result p = prop51_pipeline(x, xprime, f, rule);
        if (p.forward) offer("prop51", *p.forward);
    }
    if (xprime.empty() && f.contains(translate_inverse(x))) {
        ConeDecomposition d;
        d.steps.push_back(identity_triangle(FilteredComplex{}));
        d.steps.push_back(singleton_triangle(x));
        offer("zero-target", std::move(d));
    }
    return best;
}

Ext d_frag_upper(const FilteredComplex& x, const FilteredComplex& xprime, const FamilySpec& f, ShortRule rule) {
    return max(delta_upper(x, xprime, f, rule).value, delta_upper(xprime, x, f, rule).value);
}

DeltaBound underline_delta_upper(const FilteredComplex& x, const FilteredComplex& xprime, const FamilySpec& f) {
    if (!f.contains(Barcode{})) throw PreconditionError("the underline variant needs 0 in the family");
    DeltaBound out;
    out.strategy = "none";
    ConeDecomposition d;
    d.start = xprime;
    if (same(x, xprime)) {
        out.value = Ext(0);
        out.strategy = "empty";
        out.witness = d;
        return out;
    }
    auto m = best_model_iso(xprime, x);
    if (!m) return out;
    const ChainMap u = zero_map(FilteredComplex{}, xprime);
    d.steps.push_back(triangle_with_iso(u, reinterpret(m->map, cone(u).complex, x), m->r));
    if (!validate_underline(d, x, xprime, f).ok) return out;
    out.value = Ext(m->r);
    out.strategy = "iso";
    out.witness = std::move(d);
    return out;
}

namespace {

// One representative per homotopy class of closed degree-0 maps a → y of
// shift ≤ 0 (homotopies of shift ≤ 0). nullopt when there are more than `cap`.
std::optional<std::vector<ChainMap>> map_classes(const FilteredComplex& a, const FilteredComplex& y, std::size_t cap) {
    const int na = a.size(), ny = y.size();
    std::vector<std::pair<int, int>> p0;
    std::map<std::pair<int, int>, int> idx0;
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < ny; ++j)
            if (y.gens[j].degree == a.gens[i].degree && y.gens[j].ell <= a.gens[i].ell) {
                idx0[{i, j}] = static_cast<int>(p0.size());
                p0.emplace_back(i, j);
            }
    std::vector<std::vector<int>> co(static_cast<std::size_t>(na));
    for (int m = 0; m < na; ++m)
        for (int i : a.d[m]) co[i].push_back(m);

    F2SparseMatrix d(na * ny, 0);
    for (const auto& [i, j] : p0) {
        std::vector<int> bd;
        for (int k : y.d[j]) bd.push_back(i * ny + k);
        for (int m : co[i]) bd.push_back(m * ny + j);
        d.cols.push_back(normalize(std::move(bd)));
    }
    F2SparseMatrix span(static_cast<int>(p0.size()), 0);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < ny; ++j) {
            if (y.gens[j].degree != a.gens[i].degree - 1 || y.gens[j].ell > a.gens[i].ell) continue;
            std::vector<int> bd;
            for (int k : y.d[j]) bd.push_back(idx0.at({i, k}));
            for (int m : co[i]) bd.push_back(idx0.at({m, j}));
            span.cols.push_back(normalize(std::move(bd)));
        }
    int rk = rank(span);
    std::vector<F2Vector> basis;
    for (auto& v : kernel_basis(d)) {
        span.cols.push_back(v);
        const int r2 = rank(span);
        if (r2 > rk) {
            rk = r2;
            basis.push_back(v);
        } else {
            span.cols.pop_back();
        }
    }
    if (basis.size() >= 63 || (std::size_t{1} << basis.size()) > cap) return std::nullopt;
    std::vector<ChainMap> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << basis.size()); ++mask) {
        F2Vector v;
        for (std::size_t b = 0; b < basis.size(); ++b)
            if (mask >> b & 1) add_into(v, basis[b]);
        ChainMap f = zero_map(a, y);
        for (int c : v) f.cols[p0[c].first].push_back(p0[c].second);
        for (auto& col : f.cols) std::sort(col.begin(), col.end());
        out.push_back(std::move(f));
    }
    return out;
}

struct OracleStep {
    int entry;
    ChainMap u;
    std::optional<ChainMap> phi;  // nullopt: the apex is the cone itself
    Q r;
};

}  // namespace

OracleResult delta_exact_small(const FilteredComplex& x, const FilteredComplex& xprime, const FamilySpec& f,
                               int depth_budget, const Q& weight_budget, long node_cap) {
    if (depth_budget < 1 || depth_budget > 4) throw PreconditionError("oracle depth budget must be in 1..4");
    const Barcode bx = barcode_of(x), bxp = barcode_of(xprime);
    if (bx.size() > 3 || bxp.size() > 3) throw PreconditionError("oracle instances have at most 3 bars");
    for (const auto& m : f.members)
        if (barcode_of(m).size() > 3) throw PreconditionError("oracle family members have at most 3 bars");

    std::set<Q> grid;
    std::set<int> degs;
    auto note = [&](const Barcode& b) {
        for (const auto& bar : b) {
            grid.insert(bar.lo);
            if (bar.hi) grid.insert(*bar.hi);
            degs.insert(bar.degree);
        }
    };
    note(bx);
    note(bxp);
    for (const auto& m : f.members) note(barcode_of(m));
    if (degs.empty()) degs.insert(0);
    const int dlo = *degs.begin() - 2, dhi = *degs.rbegin() + 2;

    // linearization candidates: entry 0 is the X′ slot
    std::vector<FilteredComplex> entries{translate_inverse(xprime)};
    std::set<std::string> seen{key_of(entries[0]) + "#slot"};
    auto add_entry = [&](const Barcode& b) {
        if (!f.contains(b)) return;
        const FilteredComplex c = from_barcode(sorted(b));
        if (seen.insert(key_of(c)).second) entries.push_back(c);
    };
    if (f.contains(Barcode{})) add_entry({});
    for (const auto& m : f.members) {
        const Barcode mb = barcode_of(m);
        add_entry(mb);
        if (mb.empty()) continue;
        for (int k = -2; k <= 2; ++k) {
            Barcode t = f.closed_T ? translate_barcode(mb, k) : mb;
            add_entry(t);
            if (f.closed_shift)
                for (const Q& g : grid) add_entry(shift_barcode(t, g - min_lo(t)));
        }
    }

    // acyclic apexes: sums of at most two finite intervals on the grid
    std::vector<Bar> intervals;
    for (int dg = dlo; dg <= dhi; ++dg)
        for (const Q& lo : grid)
            for (const Q& hi : grid)
                if (lo < hi) intervals.push_back({dg, lo, hi});
    std::vector<FilteredComplex> pool;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        pool.push_back(from_barcode({intervals[i]}));
        for (std::size_t j = i; j < intervals.size(); ++j) pool.push_back(from_barcode(sorted({intervals[i], intervals[j]})));
    }
    std::sort(pool.begin(), pool.end(), [](const FilteredComplex& a, const FilteredComplex& b) {
        return boundary_depth(a) < boundary_depth(b);
    });

    OracleResult res;
    res.completed = true;
    std::vector<OracleStep> path, best_path;
    std::map<std::tuple<std::string, bool, int>, Q> memo;
    const std::size_t cap = 1024;

    std::function<void(const FilteredComplex&, bool, int, const Q&)> dfs = [&](const FilteredComplex& y, bool used, int depth,
                                                                               const Q& weight) {
        if (!res.completed) return;
        if (++res.explored > node_cap) {
            res.completed = false;
            return;
        }
        auto key = std::make_tuple(key_of(y), used, depth);
        auto it = memo.find(key);
        if (it != memo.end() && it->second <= weight) return;
        memo[key] = weight;

        for (int e = 0; e < static_cast<int>(entries.size()); ++e) {
            if (e == 0 && used) continue;
            const bool now = used || e == 0;
            auto us = map_classes(entries[e], y, cap);
            if (!us) {
                res.completed = false;
                return;
            }
            for (const ChainMap& u : *us) {
                const FilteredComplex k = cone(u).complex;
                if (now) {
                    auto phis = map_classes(k, x, cap);
                    if (!phis) {
                        res.completed = false;
                        return;
                    }
                    for (const ChainMap& phi : *phis) {
                        auto r = iso_depth(phi);
                        if (!r || weight + *r > weight_budget || Ext(weight + *r) >= res.value) continue;
                        res.value = Ext(weight + *r);
                        best_path = path;
                        best_path.push_back({e, u, phi, *r});
                    }
                }
                if (depth + 1 >= depth_budget) continue;
                path.push_back({e, u, std::nullopt, Q(0)});
                dfs(k, now, depth + 1, weight);
                path.pop_back();
                if (!res.completed) return;
                if (has_infinite_bars(barcode_of(k))) continue;
                for (const auto& p : pool) {
                    if (Ext(weight + boundary_depth(p)) >= res.value || weight + boundary_depth(p) > weight_budget) break;
                    auto phis = map_classes(k, p, cap);
                    if (!phis) continue;
                    for (const ChainMap& phi : *phis) {
                        auto r = iso_depth(phi);
                        if (!r || Ext(weight + *r) >= res.value || weight + *r > weight_budget) continue;
                        path.push_back({e, u, phi, *r});
                        dfs(p, now, depth + 1, weight + *r);
                        path.pop_back();
                        if (!res.completed) return;
                    }
                }
            }
        }
    };
    dfs(FilteredComplex{}, false, 0, Q(0));

    if (!res.value.is_pos_inf()) {
        ConeDecomposition d;
        for (const auto& s : best_path) {
            if (s.phi)
                d.steps.push_back(triangle_with_iso(s.u, *s.phi, s.r));
            else
                d.steps.push_back(triangle_from_morphism(s.u));
        }
        if (!validate_decomposition(d, x, f, xprime).ok)
            throw std::logic_error("oracle: the optimal decomposition does not validate");
        res.witness = std::move(d);
    }
    return res;
}

}  // namespace fk
