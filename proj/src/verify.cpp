#include "fk/verify.hpp"

#include "fk/io.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fk {

const std::vector<Q>& GenConfig::grid() const {
    static const std::vector<Q> def = [] {
        std::vector<Q> g;
        for (int k = 0; k <= 32; ++k) g.emplace_back(k, 8);
        return g;
    }();
    return filtration_grid.empty() ? def : filtration_grid;
}

namespace {

bool bernoulli(std::mt19937_64& rng, const Q& p) {
    std::uniform_int_distribution<std::int64_t> d(0, p.denominator() - 1);
    return d(rng) < p.numerator();
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng)];
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::mt19937_64 trial_rng(const GenConfig& cfg, const std::string& suite, std::uint64_t offset) {
    const std::uint64_t h = fnv1a(suite);
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(offset), static_cast<std::uint32_t>(offset >> 32)};
    return std::mt19937_64(seq);
}

// Random r-acyclic complex: finite bars of length ≤ r, behind a basis change.
FilteredComplex acyclic_sample(const GenConfig& cfg, const Q& r, int max_bars, std::mt19937_64& rng) {
    Barcode b;
    if (r > Q(0))
        for (int k = uniform(rng, 0, max_bars); k > 0; --k) {
            Bar bar{uniform(rng, 0, cfg.max_degree_span - 1), pick(rng, cfg.grid()), std::nullopt};
            bar.hi = bar.lo + r * Q(uniform(rng, 1, 4), 4);
            b.push_back(bar);
        }
    return random_basis_change(from_barcode(b), rng);
}

// X ⊕ K1 → Σ^{-t}X ⊕ K2 before conjugation.
ChainMap twisted_iso(const FilteredComplex& x, const FilteredComplex& k1, const FilteredComplex& k2, const Q& t,
                     std::mt19937_64& rng) {
    const FilteredComplex xt = shift_complex(x, -t);
    const FilteredComplex a = direct_sum(x, k1).sum, b = direct_sum(xt, k2).sum;
    const ChainMap m1 = random_closed_map(k1, x, rng, Q(0));   // Q: (x, y) ↦ (x + m1 y, y)
    const ChainMap m2 = random_closed_map(x, k2, rng, -t);     // P: (x, z) ↦ (x, z + m2 x)
    const int nx = x.size();
    ChainMap f = zero_map(a, b);
    for (int i = 0; i < nx; ++i) {
        f.cols[i].push_back(i);
        for (int j : m2.cols[i]) f.cols[i].push_back(nx + j);
    }
    for (int i = 0; i < k1.size(); ++i)
        for (int j : m1.cols[i]) {
            add_into(f.cols[nx + i], F2Vector{j});
            F2Vector img;
            for (int z : m2.cols[j]) img.push_back(nx + z);
            add_into(f.cols[nx + i], normalize(img));
        }
    for (auto& c : f.cols) c = normalize(c);
    return f;
}

ChainMap conjugate(const ChainMap& f, std::mt19937_64& rng, bool source, bool target) {
    ChainMap out = f;
    if (source) {
        ChainMap to_a;
        random_basis_change(f.source, rng, &to_a);
        out = compose(out, to_a);
    }
    if (target) {
        ChainMap to_b;
        const FilteredComplex b2 = random_basis_change(f.target, rng, &to_b);
        out = compose(map_from_matrix(f.target, b2, inverse(to_b.matrix())), out);
    }
    return out;
}

}  // namespace

FilteredComplex random_basis_change(const FilteredComplex& x, std::mt19937_64& rng, ChainMap* to_x) {
    const int n = x.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x.gens[a].ell < x.gens[b].ell; });
    F2SparseMatrix m = F2SparseMatrix::identity(n);
    for (int p = 0; p < n; ++p) {
        const int i = order[p];
        F2Vector col{i};
        for (int q = 0; q < p; ++q) {
            const int j = order[q];
            if (x.gens[j].degree == x.gens[i].degree && uniform(rng, 0, 2) == 0) col.push_back(j);
        }
        m.cols[i] = normalize(col);
    }
    FilteredComplex y = x;
    y.d = multiply(inverse(m), multiply(x.differential(), m)).cols;
    if (to_x) *to_x = map_from_matrix(y, x, m);
    return y;
}

ChainMap random_closed_map(const FilteredComplex& x, const FilteredComplex& y, std::mt19937_64& rng, const Q& bound) {
    const int nx = x.size(), ny = y.size();
    std::vector<std::pair<int, int>> pairs;
    F2SparseMatrix d(nx * ny, 0);
    std::vector<std::vector<int>> co(static_cast<std::size_t>(nx));
    for (int m = 0; m < nx; ++m)
        for (int i : x.d[m]) co[i].push_back(m);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            if (y.gens[j].degree != x.gens[i].degree || y.gens[j].ell - x.gens[i].ell > bound) continue;
            F2Vector bd;
            for (int k : y.d[j]) bd.push_back(i * ny + k);
            for (int m : co[i]) bd.push_back(m * ny + j);
            d.cols.push_back(normalize(std::move(bd)));
            pairs.emplace_back(i, j);
        }
    F2Vector v;
    for (const auto& k : kernel_basis(d))
        if (uniform(rng, 0, 1)) add_into(v, k);
    ChainMap f = zero_map(x, y);
    for (int c : v) f.cols[pairs[c].first].push_back(pairs[c].second);
    for (auto& c : f.cols) std::sort(c.begin(), c.end());
    return f;
}

FilteredComplex gen_complex(const GenConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    return gen_complex(cfg, rng);
}

FilteredComplex gen_complex(const GenConfig& cfg, std::mt19937_64& rng, GenStats* stats) {
    const int n = uniform(rng, 0, cfg.max_generators);
    struct G {
        int degree;
        Q ell;
    };
    std::vector<G> g;
    for (int i = 0; i < n; ++i) g.push_back({uniform(rng, 0, std::max(cfg.max_degree_span, 1) - 1), pick(rng, cfg.grid())});
    std::stable_sort(g.begin(), g.end(), [](const G& a, const G& b) { return a.ell < b.ell; });
    // columns in ℓ order; entries come from earlier generators
    std::vector<F2Vector> d(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        std::vector<int> legal;
        for (int i = 0; i < j; ++i)
            if (g[i].degree == g[j].degree + 1) legal.push_back(i);
        if (stats) ++stats->columns;
        for (int attempt = 0; attempt < 16; ++attempt) {
            F2Vector col;
            for (int i : legal)
                if (bernoulli(rng, cfg.density)) col.push_back(i);
            F2Vector sq;
            for (int i : col) add_into(sq, d[i]);
            if (sq.empty()) {
                d[j] = col;
                break;
            }
            if (stats) ++stats->rejected;
        }
    }
    // random presentation order
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pos[perm[k]] = k;
    FilteredComplex x;
    for (int k = 0; k < n; ++k) {
        const int i = perm[k];
        F2Vector bd;
        for (int t : d[i]) bd.push_back(pos[t]);
        x.add_generator("g" + std::to_string(k), g[i].degree, g[i].ell, normalize(bd));
    }
    return x;
}

RIsoSample gen_r_iso(const GenConfig& cfg, const Q& r) {
    std::mt19937_64 rng(cfg.seed);
    return gen_r_iso(cfg, r, rng);
}

RIsoSample gen_r_iso(const GenConfig& cfg, const Q& r, std::mt19937_64& rng) {
    if (r < Q(0)) throw PreconditionError("gen_r_iso needs r >= 0");
    const FilteredComplex x = gen_complex(cfg, rng);
    const FilteredComplex k1 = acyclic_sample(cfg, r, 2, rng), k2 = acyclic_sample(cfg, r, 2, rng);
    const Q t = r * Q(uniform(rng, 0, 4), 4);
    ChainMap f = conjugate(twisted_iso(x, k1, k2, t, rng), rng, true, true);
    return {f, f.source, f.target};
}

ChainMap gen_r_iso_from(const FilteredComplex& x, const Q& r, const GenConfig& cfg, std::mt19937_64& rng) {
    if (r < Q(0)) throw PreconditionError("gen_r_iso_from needs r >= 0");
    const FilteredComplex k2 = acyclic_sample(cfg, r, 2, rng);
    const Q t = r * Q(uniform(rng, 0, 4), 4);
    ChainMap f = twisted_iso(x, FilteredComplex{}, k2, t, rng);
    return conjugate(reinterpret(f, x, f.target), rng, false, true);
}

Ext bottleneck_brute(const Barcode& a, const Barcode& b, ShortRule rule) {
    std::set<int> degs;
    for (const auto* s : {&a, &b})
        for (const auto& bar : *s) degs.insert(bar.degree);
    Ext total(0);
    for (int dg : degs) {
        std::vector<Bar> x, y;
        for (const auto& bar : a)
            if (bar.degree == dg) x.push_back(bar);
        for (const auto& bar : b)
            if (bar.degree == dg) y.push_back(bar);
        auto short_cost = [&](const Bar& bar) -> Ext {
            if (bar.infinite()) return Ext::pos_inf();
            return rule == ShortRule::strict ? Ext(Q(2) * bar.length()) : Ext(bar.length() / Q(2));
        };
        auto pair_cost = [&](const Bar& p, const Bar& q) -> Ext {
            if (p.infinite() != q.infinite()) return Ext::pos_inf();
            Q c = p.lo > q.lo ? p.lo - q.lo : q.lo - p.lo;
            if (!p.infinite()) c = std::max(c, *p.hi > *q.hi ? *p.hi - *q.hi : *q.hi - *p.hi);
            return Ext(c);
        };
        Ext best = Ext::pos_inf();
        std::vector<bool> used(y.size(), false);
        std::function<void(std::size_t, Ext)> go = [&](std::size_t i, Ext cost) {
            if (cost >= best) return;
            if (i == x.size()) {
                for (std::size_t j = 0; j < y.size(); ++j)
                    if (!used[j]) cost = max(cost, short_cost(y[j]));
                best = min(best, cost);
                return;
            }
            go(i + 1, max(cost, short_cost(x[i])));
            for (std::size_t j = 0; j < y.size(); ++j) {
                if (used[j]) continue;
                used[j] = true;
                go(i + 1, max(cost, pair_cost(x[i], y[j])));
                used[j] = false;
            }
        };
        go(0, Ext(0));
        total = max(total, best);
    }
    return total;
}

namespace {

struct Trial {
    std::uint64_t offset;
    std::mt19937_64 rng;
    GenConfig cfg;
    std::vector<SuiteFailure> out;

    void fail(const std::string& claim, const std::string& text = {}) { out.push_back({offset, claim, text}); }
    void expect(bool ok, const std::string& claim, const std::function<std::string()>& text = {}) {
        if (!ok) fail(claim, text ? text() : std::string{});
    }
    FilteredComplex complex() { return gen_complex(cfg, rng); }
    Q grid_value(int lo, int hi) { return Q(uniform(rng, lo, hi), 4); }
};

std::string complex_block(const std::string& name, const FilteredComplex& x) {
    return "complex " + name + "\n" + format_complex(x) + "end\n";
}

std::string map_block(const ChainMap& f) {
    return complex_block("source", f.source) + complex_block("target", f.target) + "map f\n" + format_map_body(f) +
           "end\n";
}

// Cone triangle of a random closed map out of x, relaxed now and then.
WitnessedTriangle triangle_from(Trial& t, const FilteredComplex& x) {
    const FilteredComplex y = t.complex();
    const Q bound = uniform(t.rng, 0, 3) == 0 ? t.grid_value(1, 8) : Q(0);
    WitnessedTriangle w = triangle_from_morphism(random_closed_map(x, y, t.rng, bound));
    if (uniform(t.rng, 0, 3) == 0) w = relax_weight(w, t.grid_value(1, 6));
    return w;
}

WitnessedTriangle some_triangle(Trial& t) {
    if (uniform(t.rng, 0, 5) == 0) return eta_triangle(t.complex(), t.grid_value(0, 8));
    return triangle_from(t, t.complex());
}

std::string check_text(const TriangleCheck& c) {
    std::string s;
    for (const auto& f : c.failed) s += "clause " + f + "\n";
    return s;
}

void acyclic_equivalence(Trial& t) {
    const FilteredComplex x = t.complex();
    const Barcode b = barcode_of(x);
    auto text = [&] { return complex_block("X", x); };
    if (has_infinite_bars(b)) {
        const Q big = boundary_depth(b) + Q(100);
        t.expect(!is_r_acyclic(b, big), "infinite-bars-not-acyclic", text);
        t.expect(!acyclicity_witness(x, big), "infinite-bars-no-nullhomotopy", text);
        return;
    }
    const Q r = boundary_depth(b);
    t.expect(is_r_acyclic(b, r), "barcode-at-depth", text);
    t.expect(acyclicity_witness(x, r).has_value(), "nullhomotopy-at-depth", text);
    if (r >= Q(1, 8)) {
        t.expect(!is_r_acyclic(b, r - Q(1, 8)), "barcode-below-depth", text);
        t.expect(!acyclicity_witness(x, r - Q(1, 8)), "nullhomotopy-below-depth", text);
    }
}

void cone_acyclic_sum(Trial& t) {
    const FilteredComplex k = acyclic_sample(t.cfg, t.grid_value(0, 8), 3, t.rng);
    const FilteredComplex kp = acyclic_sample(t.cfg, t.grid_value(0, 8), 3, t.rng);
    const Q r = boundary_depth(k), s = boundary_depth(kp);
    // K → K″ → K′ → TK from f: T⁻¹K′ → K
    const ChainMap f = random_closed_map(translate_inverse(kp), k, t.rng, Q(0));
    const FilteredComplex kpp = cone(f).complex;
    const Barcode b = barcode_of(kpp);
    auto text = [&] { return map_block(f); };
    t.expect(!has_infinite_bars(b) && boundary_depth(b) <= r + s, "cone-depth-le-r-plus-s", text);
    t.expect(acyclicity_witness(kpp, r + s).has_value(), "cone-nullhomotopy-at-r-plus-s", text);
}

void riso_compose(Trial& t) {
    const Q r = t.grid_value(0, 8), s = t.grid_value(0, 8);
    const RIsoSample f = gen_r_iso(t.cfg, r, t.rng);
    const ChainMap g = gen_r_iso_from(f.B, s, t.cfg, t.rng);
    t.expect(is_r_isomorphism(f.f, r), "sample-is-r-iso", [&] { return map_block(f.f); });
    t.expect(is_r_isomorphism(g, s), "sample-is-s-iso", [&] { return map_block(g); });
    const ChainMap gf = compose(g, f.f);
    const Barcode b = barcode_of(cone(gf).complex);
    auto text = [&] { return map_block(f.f) + map_block(g); };
    t.expect(!has_infinite_bars(b) && boundary_depth(b) <= r + s, "composite-cone-depth", text);
    t.expect(is_r_isomorphism(gf, r + s), "composite-is-iso", text);
}

void inverse_2r(Trial& t) {
    const Q r = t.grid_value(0, 8);
    const RIsoSample f = gen_r_iso(t.cfg, r, t.rng);
    auto text = [&] { return "r " + format_rational(r) + "\n" + map_block(f.f); };
    RInverses inv = r_inverses(f.f, r);
    t.expect(is_r_isomorphism(inv.right, Q(2) * r), "right-inverse-2r-iso", text);
    t.expect(is_r_isomorphism(inv.left, Q(2) * r), "left-inverse-2r-iso", text);
    t.expect(r_equivalent(compose(f.f, inv.right), eta(f.B, r), Q(0), Q(0)), "right-inverse-law", text);
}

void octahedron_suite(Trial& t) {
    const WitnessedTriangle d1 = some_triangle(t);
    const WitnessedTriangle d2 = triangle_from(t, d1.tri.C);
    const Octahedron o = octahedron(d1, d2);
    auto text = [&] { return format_bundle(d1) + format_bundle(d2); };
    const Q r = d1.tri.weight, s = d2.tri.weight;
    t.expect(o.d3.tri.weight == Q(0), "d3-weight-zero", text);
    t.expect(o.d4.tri.weight == r + s, "d4-weight-r-plus-s", text);
    const TriangleCheck c3 = verify_triangle(o.d3), c4 = verify_triangle(o.d4);
    t.expect(c3.ok, "d3-verifies", [&] { return check_text(c3) + text(); });
    t.expect(c4.ok, "d4-verifies", [&] { return check_text(c4) + text(); });
    for (const auto& sq : o.squares) t.expect(sq.holds, "square-" + sq.name, text);
    t.expect(o.d3.tri.weight + o.d4.tri.weight == r + s, "octahedral-inequality-tight", text);
}

void rotation_suite(Trial& t) {
    const WitnessedTriangle d = some_triangle(t);
    const Q r = d.tri.weight;
    auto text = [&] { return format_bundle(d); };
    const WitnessedTriangle rt = rotate(d);
    t.expect(rt.tri.weight == Q(2) * r, "rotation-weight-2r", text);
    const TriangleCheck c = verify_triangle(rt);
    t.expect(c.ok, "rotation-verifies", [&] { return check_text(c) + text(); });
    t.expect(r_equivalent(rt.tri.v, d.tri.w, Q(0), r), "rotation-middle-r-equivalent", text);
    const WitnessedTriangle nt = rotate_negative(d);
    t.expect(nt.tri.weight == Q(2) * r, "negative-rotation-weight-2r", text);
    const TriangleCheck nc = verify_triangle(nt);
    t.expect(nc.ok, "negative-rotation-verifies", [&] { return check_text(nc) + text(); });
    t.expect(same_matrix(nt.tri.v, d.tri.u), "negative-rotation-middle", text);
}

// A random decomposition: a triangle decomposition followed by a few cone steps.
ConeDecomposition random_decomposition(Trial& t) {
    ConeDecomposition d = triangle_decomposition(triangle_from(t, t.complex()));
    for (int k = uniform(t.rng, 0, 2); k > 0; --k) {
        const FilteredComplex e = t.complex();
        WitnessedTriangle s = triangle_from_morphism(random_closed_map(e, d.target(), t.rng, Q(0)));
        const Q w = t.grid_value(0, 6);
        d.steps.push_back(w > Q(0) ? relax_weight(s, w) : s);
    }
    return d;
}

std::string decomposition_text(const ConeDecomposition& d) {
    std::string s = complex_block("start", d.start);
    for (const auto& st : d.steps) s += format_bundle(st);
    return s;
}

void refinement_suite(Trial& t) {
    const ConeDecomposition d = random_decomposition(t);
    const int i = uniform(t.rng, 0, static_cast<int>(d.steps.size()) - 1);
    const FilteredComplex& xi = d.steps[i].tri.A;
    // D′ of X_i: through its canonical model, or a relaxed singleton
    ConeDecomposition dp;
    if (uniform(t.rng, 0, 1)) {
        dp = cone_decomposition(canonical_form(xi).from_x);
    } else {
        dp = singleton_decomposition(xi);
        dp.steps[0] = relax_weight(dp.steps[0], t.grid_value(0, 6));
    }
    auto text = [&] { return decomposition_text(d) + decomposition_text(dp); };
    const ConeDecomposition dd = refine(d, i, dp);
    const DecompositionCheck c = check_decomposition(dd, d.target());
    t.expect(c.ok, "refinement-valid", text);
    t.expect(c.weight == d.weight() + dp.weight(), "refinement-weight-additive", text);
    // linearization (X_1, …, X_{i−1}, TA_1, …, TA_k, X_{i+1}, …)
    const auto l0 = d.linearization(), l1 = dp.linearization(), l2 = dd.linearization();
    bool shape = l2.size() == l0.size() - 1 + l1.size();
    for (std::size_t k = 0; shape && k < l2.size(); ++k) {
        const FilteredComplex& want = k < static_cast<std::size_t>(i)       ? l0[k]
                                      : k < static_cast<std::size_t>(i) + l1.size() ? translate(l1[k - i])
                                                                                     : l0[k - l1.size() + 1];
        shape = same_structure(want, l2[k]) && want.size() == l2[k].size();
    }
    t.expect(shape, "refinement-linearization", text);

    // a second, nested refinement inside the refined entries
    if (!l1.empty()) {
        const int j = i + uniform(t.rng, 0, static_cast<int>(l1.size()) - 1);
        ConeDecomposition dpp = singleton_decomposition(dd.steps[j].tri.A);
        dpp.steps[0] = relax_weight(dpp.steps[0], t.grid_value(0, 6));
        const ConeDecomposition d3 = refine(dd, j, dpp);
        const DecompositionCheck c3 = check_decomposition(d3, d.target());
        t.expect(c3.ok && c3.weight == d.weight() + dp.weight() + dpp.weight(), "nested-refinement-additive", text);
    }
}

void sum_triangle_suite(Trial& t) {
    const WitnessedTriangle a = some_triangle(t), b = some_triangle(t);
    const WitnessedTriangle s = sum_triangles(a, b);
    auto text = [&] { return format_bundle(a) + format_bundle(b); };
    t.expect(s.tri.weight == std::max(a.tri.weight, b.tri.weight), "sum-weight-max", text);
    const TriangleCheck c = verify_triangle(s);
    t.expect(c.ok, "sum-verifies", [&] { return check_text(c) + text(); });
}

void frag_sum_suite(Trial& t) {
    FamilySpec f;
    f.with_zero = true;
    const RIsoSample a = gen_r_iso(t.cfg, t.grid_value(0, 6), t.rng);
    const RIsoSample b = gen_r_iso(t.cfg, t.grid_value(0, 6), t.rng);
    // X = A, X′ = B side of each sample
    const DeltaBound da = delta_upper(a.A, a.B, f), db = delta_upper(b.A, b.B, f);
    auto text = [&] { return map_block(a.f) + map_block(b.f); };
    t.expect(da.value.finite() && db.value.finite(), "strategies-finite-on-r-iso-pairs", text);
    if (!da.witness || !db.witness) return;
    const ConeDecomposition s = sum_decompositions(*da.witness, *db.witness);
    const FilteredComplex target = direct_sum(a.A, b.A).sum;
    const DecompositionCheck c = validate_decomposition(s, target, f, std::vector{a.B, b.B});
    t.expect(c.ok, "sum-decomposition-validates", text);
    t.expect(c.weight == da.witness->weight() + db.witness->weight(), "sum-decomposition-weight", text);
    t.expect(Ext(c.weight) <= da.value + db.value, "sum-inequality", text);
}

Barcode perturbed(const Barcode& b, Trial& t) {
    Barcode out;
    for (Bar bar : b) {
        if (!bar.infinite() && uniform(t.rng, 0, 5) == 0) continue;  // drop a bar
        bar.lo += t.grid_value(-4, 4);
        if (bar.hi) bar.hi = std::max(*bar.hi + t.grid_value(-4, 4), bar.lo);
        out.push_back(bar);
    }
    if (uniform(t.rng, 0, 2) == 0) {
        Bar extra{uniform(t.rng, 0, 2), t.grid_value(0, 24), std::nullopt};
        extra.hi = extra.lo + t.grid_value(0, 3);
        out.push_back(extra);
    }
    return out;
}

Barcode random_barcode(Trial& t, int max_bars, bool infinite) {
    Barcode b;
    for (int k = uniform(t.rng, 0, max_bars); k > 0; --k) {
        Bar bar{uniform(t.rng, 0, 2), t.grid_value(0, 24), std::nullopt};
        if (!infinite || uniform(t.rng, 0, 3) != 0) bar.hi = bar.lo + t.grid_value(0, 12);
        b.push_back(bar);
    }
    return b;
}

void prop51_suite(Trial& t) {
    FamilySpec f;
    f.with_zero = true;
    const Barcode bx = random_barcode(t, 10, true);
    const Barcode by = uniform(t.rng, 0, 3) == 0 ? random_barcode(t, 10, true) : perturbed(bx, t);
    const FilteredComplex x = random_basis_change(from_barcode(bx), t.rng);
    const FilteredComplex y = random_basis_change(from_barcode(by), t.rng);
    auto text = [&] { return complex_block("X", x) + complex_block("Y", y); };
    const Prop51Result p = prop51_pipeline(x, y, f);
    const Q c = Q(4 * static_cast<std::int64_t>(std::min(bx.size(), by.size())) + 1);
    t.expect(p.constant == c, "constant", text);
    if (!p.tau.finite()) {
        t.expect(p.bound.is_pos_inf(), "infinite-tau-infinite-bound", text);
        return;
    }
    t.expect(p.bound <= Ext(c * p.tau.value()), "bound-le-constant-times-tau", text);
    t.expect(p.forward && validate_decomposition(*p.forward, x, f, y).ok, "forward-validates", text);
    t.expect(p.backward && validate_decomposition(*p.backward, y, f, x).ok, "backward-validates", text);
    if (p.forward && p.backward)
        t.expect(p.bound == Ext(std::max(p.forward->weight(), p.backward->weight())), "bound-is-witness-weight", text);
}

void bottleneck_oracle(Trial& t) {
    const Barcode a = random_barcode(t, 6, true);
    const Barcode b = uniform(t.rng, 0, 1) ? random_barcode(t, 6, true) : perturbed(a, t);
    auto text = [&] { return "A\n" + format_barcode(a) + "B\n" + format_barcode(b); };
    for (ShortRule rule : {ShortRule::strict, ShortRule::standard}) {
        const std::string name = rule == ShortRule::strict ? "strict" : "standard";
        const BottleneckResult r = bottleneck(a, b, rule);
        t.expect(r.value == bottleneck_brute(a, b, rule), name + "-rule-value", text);
    }
}

void weight_axioms(Trial& t) {
    std::vector<std::pair<WitnessedTriangle, WitnessedTriangle>> pairs;
    const WitnessedTriangle d1 = some_triangle(t);
    pairs.emplace_back(d1, triangle_from(t, d1.tri.C));
    const WitnessedTriangle z = singleton_triangle(t.complex());
    pairs.emplace_back(z, triangle_from(t, z.tri.C));
    auto text = [&] {
        std::string s;
        for (const auto& [p, q] : pairs) s += format_bundle(p) + format_bundle(q);
        return s;
    };
    for (const TriangularWeight& wf : {persistence_weight(), flat_weight(), mixed_weight(t.grid_value(1, 8), t.grid_value(1, 8))}) {
        const WeightReport rep = check_triangular_weight(wf, pairs);
        for (const auto& v : rep.violations) t.fail(wf.name + ": " + v, text());
    }
}

void limit_examples(Trial& t) {
    const Q r = t.grid_value(1, 12), a0 = t.grid_value(-8, 8);
    const FilteredComplex a = interval_e1(a0, uniform(t.rng, 0, 2));
    const FilteredComplex zero;
    auto text = [&] { return "r " + format_rational(r) + "\n" + complex_block("A", a); };
    {
        // A → 0 → Σ^{-r}TA with the identity matrix, read in the limit category
        LimitTriangle lt{a, zero, shift_complex(translate(a), -r), zero_map(a, zero), {}, {}};
        lt.v = zero_map(zero, lt.C);
        lt.w = map_from_matrix(lt.C, translate(a), F2SparseMatrix::identity(a.size()));
        const LimitWeight u = unstable_weight_upper(lt);
        t.expect(u.bound == Ext(r), "rigid-unstable-equals-r", text);
        t.expect(u.minimal_on_grid, "rigid-grid-certified", text);
        t.expect(u.certificate && verify_triangle(*u.certificate).ok, "rigid-certificate-verifies", text);
        t.expect(stable_weight_upper(lt).bound == Ext(r), "rigid-stable-equals-r", text);
    }
    {
        // A → 0 → Σ^{r}TA with η as last map
        LimitTriangle lt{a, zero, shift_complex(translate(a), r), zero_map(a, zero), {}, {}};
        lt.v = zero_map(zero, lt.C);
        lt.w = eta(translate(a), r);
        t.expect(unstable_weight_upper(lt).bound == Ext(r), "other-unstable-equals-r", text);
        t.expect(stable_weight_upper(lt).bound == Ext(0), "other-stable-zero", text);
    }
    FamilySpec f0;
    f0.with_zero = true;
    const FilteredComplex x = t.complex();
    t.expect(d_frag_upper(x, x, f0) == Ext(0), "d-of-x-x-zero", [&] { return complex_block("X", x); });
    t.expect(d_frag_upper(x, shift_complex(x, r), f0) <= Ext(r), "shift-distance-le-r",
             [&] { return complex_block("X", x) + "r " + format_rational(r) + "\n"; });
    // interval modules: every comparison Σ^k Σ^r A → A, k ≥ 0, has cone depth ≥ r
    for (int k4 = 0; k4 <= 8; ++k4) {
        const FilteredComplex src = shift_complex(a, r + Q(k4, 4));
        const ChainMap id = map_from_matrix(src, a, F2SparseMatrix::identity(a.size()));
        const Barcode b = barcode_of(cone(id).complex);
        t.expect(!has_infinite_bars(b) && boundary_depth(b) == r + Q(k4, 4), "interval-comparison-depth", text);
    }
}

using SuiteFn = void (*)(Trial&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r{
        {"acyclic-equivalence", acyclic_equivalence},
        {"cone-acyclic-sum", cone_acyclic_sum},
        {"riso-compose", riso_compose},
        {"inverse-2r", inverse_2r},
        {"octahedron", octahedron_suite},
        {"rotation", rotation_suite},
        {"refinement", refinement_suite},
        {"sum-triangle", sum_triangle_suite},
        {"frag-sum", frag_sum_suite},
        {"prop51", prop51_suite},
        {"bottleneck-oracle", bottleneck_oracle},
        {"weight-axioms", weight_axioms},
        {"limit-examples", limit_examples},
    };
    return r;
}

SuiteFn find_suite(const std::string& name) {
    for (const auto& [n, fn] : registry())
        if (n == name) return fn;
    throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [n, fn] : registry()) v.push_back(n);
        return v;
    }();
    return names;
}

std::vector<SuiteFailure> run_trial(const std::string& name, const GenConfig& cfg, std::uint64_t offset) {
    const SuiteFn fn = find_suite(name);
    Trial t{offset, trial_rng(cfg, name, offset), cfg, {}};
    try {
        fn(t);
    } catch (const std::exception& e) {
        t.fail("exception", std::string(e.what()) + "\n");
    }
    return t.out;
}

SuiteReport run_suite(const std::string& name, const GenConfig& cfg, int trials) {
    find_suite(name);
    SuiteReport rep{name, trials, {}};
    std::vector<std::vector<SuiteFailure>> per(static_cast<std::size_t>(std::max(trials, 0)));
    const unsigned hw = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < hw; ++w)
        pool.emplace_back([&, w] {
            for (int k = static_cast<int>(w); k < trials; k += static_cast<int>(hw))
                per[k] = run_trial(name, cfg, static_cast<std::uint64_t>(k));
        });
    for (auto& th : pool) th.join();
    for (auto& v : per) rep.failures.insert(rep.failures.end(), v.begin(), v.end());
    return rep;
}

std::string format_failures(const SuiteReport& r) {
    std::ostringstream out;
    for (const auto& f : r.failures) {
        out << "FAIL " << r.suite << ' ' << f.offset << ' ' << f.claim << '\n';
        std::istringstream in(f.counterexample);
        for (std::string line; std::getline(in, line);) out << "  " << line << '\n';
    }
    return out.str();
}

}  // namespace fk
