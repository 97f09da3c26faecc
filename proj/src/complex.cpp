#include "fk/complex.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fk {

void FilteredComplex::add_generator(std::string id, int degree, Q ell, F2Vector boundary) {
    gens.push_back({std::move(id), degree, ell});
    d.push_back(std::move(boundary));
}

Ext FilteredComplex::ell_of(const F2Vector& v) const {
    Ext best = Ext::neg_inf();
    for (int i : v) best = max(best, Ext(gens[i].ell));
    return best;
}

F2SparseMatrix FilteredComplex::differential() const {
    F2SparseMatrix m(size(), size());
    m.cols = d;
    return m;
}

int FilteredComplex::index_of(const std::string& id) const {
    for (int i = 0; i < size(); ++i)
        if (gens[i].id == id) return i;
    return -1;
}

bool same_structure(const FilteredComplex& a, const FilteredComplex& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i) {
        if (a.gens[i].degree != b.gens[i].degree || a.gens[i].ell != b.gens[i].ell) return false;
        if (a.d[i] != b.d[i]) return false;
    }
    return true;
}

std::vector<Violation> validate(const FilteredComplex& x) {
    std::vector<Violation> out;
    const int n = x.size();
    if (static_cast<int>(x.d.size()) != n) {
        out.push_back({"index", {}, "differential has the wrong number of columns"});
        return out;
    }
    std::set<std::string> seen;
    for (const auto& g : x.gens)
        if (!seen.insert(g.id).second) out.push_back({"duplicate-id", {g.id}, "generator id used twice"});

    bool indices_ok = true;
    for (int i = 0; i < n; ++i) {
        const auto& col = x.d[i];
        if (!is_sorted_support(col) || (!col.empty() && (col.front() < 0 || col.back() >= n))) {
            out.push_back({"index", {x.gens[i].id}, "boundary refers to a missing generator"});
            indices_ok = false;
        }
    }
    if (!indices_ok) return out;

    for (int i = 0; i < n; ++i) {
        for (int j : x.d[i]) {
            if (x.gens[j].degree != x.gens[i].degree + 1)
                out.push_back({"degree", {x.gens[i].id, x.gens[j].id}, "boundary does not raise degree by one"});
            if (x.gens[j].ell > x.gens[i].ell)
                out.push_back({"filtration", {x.gens[i].id, x.gens[j].id}, "boundary has larger filtration"});
        }
        std::vector<int> acc;
        for (int j : x.d[i]) acc.insert(acc.end(), x.d[j].begin(), x.d[j].end());
        F2Vector dd = normalize(std::move(acc));
        if (!dd.empty()) {
            Violation v{"d-squared", {x.gens[i].id}, "∂∂ is nonzero"};
            for (int j : dd) v.ids.push_back(x.gens[j].id);
            out.push_back(std::move(v));
        }
    }
    return out;
}

bool ChainMap::is_zero() const {
    return std::all_of(cols.begin(), cols.end(), [](const F2Vector& c) { return c.empty(); });
}

F2SparseMatrix ChainMap::matrix() const {
    F2SparseMatrix m(target.size(), source.size());
    m.cols = cols;
    return m;
}

bool same_matrix(const ChainMap& f, const ChainMap& g) { return f.cols == g.cols; }

void check_map(const ChainMap& f) {
    if (static_cast<int>(f.cols.size()) != f.source.size())
        throw PreconditionError("map has " + std::to_string(f.cols.size()) + " columns for " +
                                std::to_string(f.source.size()) + " source generators");
    for (int i = 0; i < f.source.size(); ++i) {
        const auto& c = f.cols[i];
        if (!is_sorted_support(c) || (!c.empty() && (c.front() < 0 || c.back() >= f.target.size())))
            throw PreconditionError("map column for '" + f.source.gens[i].id + "' is out of range");
        for (int j : c)
            if (f.target.gens[j].degree != f.source.gens[i].degree + f.degree)
                throw PreconditionError("map sends '" + f.source.gens[i].id + "' to '" + f.target.gens[j].id +
                                        "' of the wrong degree");
    }
}

bool is_closed(const ChainMap& f) {
    // ∂_Y f(x_i) vs f(∂_X x_i)
    for (int i = 0; i < f.source.size(); ++i) {
        std::vector<int> lhs;
        for (int j : f.cols[i]) lhs.insert(lhs.end(), f.target.d[j].begin(), f.target.d[j].end());
        std::vector<int> rhs;
        for (int k : f.source.d[i]) rhs.insert(rhs.end(), f.cols[k].begin(), f.cols[k].end());
        if (normalize(std::move(lhs)) != normalize(std::move(rhs))) return false;
    }
    return true;
}

Ext shift_of_map(const ChainMap& f) {
    Ext best = Ext::neg_inf();
    for (int i = 0; i < f.source.size(); ++i) {
        if (f.cols[i].empty()) continue;
        best = max(best, f.target.ell_of(f.cols[i]) - Ext(f.source.gens[i].ell));
    }
    return best;
}

ChainMap zero_map(const FilteredComplex& x, const FilteredComplex& y, int degree) {
    return ChainMap{x, y, degree, std::vector<F2Vector>(static_cast<std::size_t>(x.size()))};
}

ChainMap identity_map(const FilteredComplex& x) {
    ChainMap f{x, x, 0, {}};
    for (int i = 0; i < x.size(); ++i) f.cols.push_back({i});
    return f;
}

ChainMap map_from_matrix(const FilteredComplex& x, const FilteredComplex& y, const F2SparseMatrix& m, int degree) {
    if (m.ncols() != x.size() || m.nrows != y.size()) throw PreconditionError("matrix shape does not fit the complexes");
    ChainMap f{x, y, degree, m.cols};
    check_map(f);
    return f;
}

ChainMap compose(const ChainMap& g, const ChainMap& f) {
    if (f.target.size() != g.source.size() || !same_structure(f.target, g.source))
        throw PreconditionError("compose: target of f is not the source of g");
    ChainMap out{f.source, g.target, f.degree + g.degree, {}};
    out.cols.reserve(f.cols.size());
    for (const auto& c : f.cols) {
        std::vector<int> acc;
        for (int j : c) acc.insert(acc.end(), g.cols[j].begin(), g.cols[j].end());
        out.cols.push_back(normalize(std::move(acc)));
    }
    return out;
}

ChainMap add(const ChainMap& f, const ChainMap& g) {
    if (f.cols.size() != g.cols.size() || f.target.size() != g.target.size() || f.degree != g.degree)
        throw PreconditionError("add: maps have different shapes");
    ChainMap out = f;
    for (std::size_t i = 0; i < g.cols.size(); ++i) add_into(out.cols[i], g.cols[i]);
    return out;
}

ChainMap reinterpret(const ChainMap& f, const FilteredComplex& source, const FilteredComplex& target) {
    if (source.size() != f.source.size() || target.size() != f.target.size())
        throw PreconditionError("reinterpret: generator counts differ");
    ChainMap out{source, target, f.degree, f.cols};
    check_map(out);
    return out;
}

FilteredComplex shift_complex(const FilteredComplex& x, const Q& r) {
    FilteredComplex y = x;
    for (auto& g : y.gens) g.ell += r;
    return y;
}

FilteredComplex translate_by(const FilteredComplex& x, int k) {
    FilteredComplex y = x;
    for (auto& g : y.gens) g.degree -= k;
    return y;
}

FilteredComplex translate(const FilteredComplex& x) { return translate_by(x, 1); }
FilteredComplex translate_inverse(const FilteredComplex& x) { return translate_by(x, -1); }

ChainMap shift_map(const ChainMap& f, const Q& r) {
    return ChainMap{shift_complex(f.source, r), shift_complex(f.target, r), f.degree, f.cols};
}

ChainMap translate_map(const ChainMap& f, int k) {
    return ChainMap{translate_by(f.source, k), translate_by(f.target, k), f.degree, f.cols};
}

ChainMap eta(const FilteredComplex& x, const Q& r) {
    if (r < 0) throw PreconditionError("eta needs r >= 0");
    ChainMap f = identity_map(x);
    f.source = shift_complex(x, r);
    return f;
}

namespace {

F2Vector offset(const F2Vector& v, int k) {
    F2Vector out = v;
    for (int& i : out) i += k;
    return out;
}

}  // namespace

DirectSum direct_sum(const FilteredComplex& x, const FilteredComplex& y) {
    DirectSum s;
    const int nx = x.size();
    for (int i = 0; i < nx; ++i) s.sum.add_generator("a." + x.gens[i].id, x.gens[i].degree, x.gens[i].ell, x.d[i]);
    for (int i = 0; i < y.size(); ++i)
        s.sum.add_generator("b." + y.gens[i].id, y.gens[i].degree, y.gens[i].ell, offset(y.d[i], nx));
    s.in1 = zero_map(x, s.sum);
    s.in2 = zero_map(y, s.sum);
    s.pr1 = zero_map(s.sum, x);
    s.pr2 = zero_map(s.sum, y);
    for (int i = 0; i < nx; ++i) {
        s.in1.cols[i] = {i};
        s.pr1.cols[i] = {i};
    }
    for (int i = 0; i < y.size(); ++i) {
        s.in2.cols[i] = {nx + i};
        s.pr2.cols[nx + i] = {i};
    }
    return s;
}

FilteredComplex direct_sum_of(const std::vector<FilteredComplex>& parts) {
    FilteredComplex out;
    int k = 0;
    for (const auto& p : parts) {
        const int base = out.size();
        for (int i = 0; i < p.size(); ++i)
            out.add_generator("s" + std::to_string(k) + "." + p.gens[i].id, p.gens[i].degree, p.gens[i].ell,
                              offset(p.d[i], base));
        ++k;
    }
    return out;
}

ChainMap map_sum(const ChainMap& f, const ChainMap& g) {
    if (f.degree != g.degree) throw PreconditionError("map_sum: degrees differ");
    DirectSum s = direct_sum(f.source, g.source);
    DirectSum t = direct_sum(f.target, g.target);
    ChainMap out{s.sum, t.sum, f.degree, {}};
    for (const auto& c : f.cols) out.cols.push_back(c);
    for (const auto& c : g.cols) out.cols.push_back(offset(c, f.target.size()));
    return out;
}

Cone cone(const ChainMap& f, const Q& lambda) {
    check_map(f);
    if (f.degree != 0) throw PreconditionError("cone needs a degree-0 map");
    if (!is_closed(f)) throw PreconditionError("cone needs a closed map");
    Ext sh = shift_of_map(f);
    if (sh > Ext(lambda))
        throw PreconditionError("cone: lambda " + format_rational(lambda) + " is below the shift " + sh.str() +
                                " (deficit " + (sh - Ext(lambda)).str() + ")");
    const FilteredComplex& x = f.source;
    const FilteredComplex& y = f.target;
    const int ny = y.size();
    Cone c;
    for (int i = 0; i < ny; ++i) c.complex.add_generator("y." + y.gens[i].id, y.gens[i].degree, y.gens[i].ell, y.d[i]);
    for (int i = 0; i < x.size(); ++i) {
        F2Vector bd = f.cols[i];
        F2Vector tail = offset(x.d[i], ny);
        bd.insert(bd.end(), tail.begin(), tail.end());
        c.complex.add_generator("x." + x.gens[i].id, x.gens[i].degree - 1, x.gens[i].ell + lambda, std::move(bd));
    }
    FilteredComplex tx = shift_complex(translate(x), lambda);
    c.incl = zero_map(y, c.complex);
    for (int i = 0; i < ny; ++i) c.incl.cols[i] = {i};
    c.proj = zero_map(c.complex, tx);
    for (int i = 0; i < x.size(); ++i) c.proj.cols[ny + i] = {i};
    return c;
}

HomComplex hom_complex(const FilteredComplex& x, const FilteredComplex& y) {
    HomComplex h;
    h.nx = x.size();
    h.ny = y.size();
    // transpose of ∂_X: which generators have x_i in their boundary
    std::vector<std::vector<int>> co(static_cast<std::size_t>(h.nx));
    for (int m = 0; m < h.nx; ++m)
        for (int i : x.d[m]) co[i].push_back(m);
    for (int i = 0; i < h.nx; ++i) {
        for (int j = 0; j < h.ny; ++j) {
            std::vector<int> bd;
            for (int k : y.d[j]) bd.push_back(h.index(i, k));
            for (int m : co[i]) bd.push_back(h.index(m, j));
            h.complex.add_generator(x.gens[i].id + "*" + y.gens[j].id, y.gens[j].degree - x.gens[i].degree,
                                    y.gens[j].ell - x.gens[i].ell, normalize(std::move(bd)));
        }
    }
    return h;
}

F2Vector encode(const HomComplex& h, const ChainMap& f) {
    std::vector<int> out;
    for (int i = 0; i < h.nx; ++i)
        for (int j : f.cols[i]) out.push_back(h.index(i, j));
    std::sort(out.begin(), out.end());
    return out;
}

ChainMap decode(const HomComplex& h, const F2Vector& v, const FilteredComplex& x, const FilteredComplex& y,
                int degree) {
    ChainMap f = zero_map(x, y, degree);
    for (int k : v) f.cols[k / h.ny].push_back(k % h.ny);
    return f;
}

ChainMap hom_boundary(const ChainMap& h) {
    ChainMap out{h.source, h.target, h.degree + 1, {}};
    for (int i = 0; i < h.source.size(); ++i) {
        std::vector<int> acc;
        for (int j : h.cols[i]) acc.insert(acc.end(), h.target.d[j].begin(), h.target.d[j].end());
        for (int k : h.source.d[i]) acc.insert(acc.end(), h.cols[k].begin(), h.cols[k].end());
        out.cols.push_back(normalize(std::move(acc)));
    }
    return out;
}

std::optional<ChainMap> find_homotopy(const ChainMap& f, const Ext& bound) {
    const FilteredComplex& x = f.source;
    const FilteredComplex& y = f.target;
    const int nx = x.size(), ny = y.size();
    if (f.is_zero()) return zero_map(x, y, f.degree - 1);
    if (bound.is_neg_inf()) return std::nullopt;

    std::vector<std::vector<int>> co(static_cast<std::size_t>(nx));
    for (int m = 0; m < nx; ++m)
        for (int i : x.d[m]) co[i].push_back(m);

    // Columns: elementary maps x_i ↦ y_j of degree deg(f) − 1 below the bound.
    F2SparseMatrix a(nx * ny, 0);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            if (y.gens[j].degree - x.gens[i].degree != f.degree - 1) continue;
            if (Ext(y.gens[j].ell - x.gens[i].ell) > bound) continue;
            std::vector<int> bd;
            for (int k : y.d[j]) bd.push_back(i * ny + k);
            for (int m : co[i]) bd.push_back(m * ny + j);
            a.cols.push_back(normalize(std::move(bd)));
            pairs.emplace_back(i, j);
        }
    }
    std::vector<int> all(pairs.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);

    std::vector<int> rhs;
    for (int i = 0; i < nx; ++i)
        for (int j : f.cols[i]) rhs.push_back(i * ny + j);
    std::sort(rhs.begin(), rhs.end());

    auto sol = solve_in_span(a, rhs, all);
    if (!sol) return std::nullopt;
    ChainMap h = zero_map(x, y, f.degree - 1);
    for (int k : *sol) h.cols[pairs[k].first].push_back(pairs[k].second);
    for (auto& c : h.cols) std::sort(c.begin(), c.end());
    return h;
}

std::optional<ChainMap> is_nullhomotopic_within(const ChainMap& f, const Q& s) {
    if (f.is_zero()) return zero_map(f.source, f.target, f.degree - 1);
    return find_homotopy(f, shift_of_map(f) + Ext(s));
}

bool homotopic_within(const ChainMap& f, const ChainMap& g, const Ext& bound) {
    return find_homotopy(add(f, g), bound).has_value();
}

}  // namespace fk
