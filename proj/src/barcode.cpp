#include "fk/barcode.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace fk {

bool bar_less(const Bar& a, const Bar& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    if (a.lo != b.lo) return a.lo < b.lo;
    if (a.infinite() != b.infinite()) return b.infinite();
    if (a.infinite()) return false;
    return *a.hi < *b.hi;
}

void sort_barcode(Barcode& b) { std::stable_sort(b.begin(), b.end(), bar_less); }

Barcode sorted(Barcode b) {
    sort_barcode(b);
    return b;
}

bool same_barcode(Barcode a, Barcode b) { return sorted(std::move(a)) == sorted(std::move(b)); }

Barcode shift_barcode(const Barcode& b, const Q& r) {
    Barcode out = b;
    for (auto& bar : out) {
        bar.lo += r;
        if (bar.hi) *bar.hi += r;
    }
    return out;
}

Barcode translate_barcode(const Barcode& b, int k) {
    Barcode out = b;
    for (auto& bar : out) bar.degree -= k;
    return out;
}

std::string format_bar(const Bar& bar) {
    return "bar " + std::to_string(bar.degree) + " " + format_rational(bar.lo) + " " +
           (bar.hi ? format_rational(*bar.hi) : std::string("inf"));
}

std::string format_barcode(const Barcode& b) {
    std::string out;
    for (const auto& bar : sorted(b)) out += format_bar(bar) + "\n";
    return out;
}

FilteredComplex from_barcode(const Barcode& b) {
    FilteredComplex x;
    int k = 0;
    for (const auto& bar : b) {
        const std::string tag = std::to_string(k++);
        if (bar.infinite()) {
            x.add_generator("e" + tag, bar.degree, bar.lo);
        } else {
            const int xi = x.size();
            x.add_generator("x" + tag, bar.degree, bar.lo);
            x.add_generator("y" + tag, bar.degree - 1, *bar.hi, {xi});
        }
    }
    return x;
}

FilteredComplex interval_e1(const Q& a, int degree) { return from_barcode({Bar{degree, a, std::nullopt}}); }

FilteredComplex interval_e2(const Q& c, const Q& d, int degree) {
    FilteredComplex x;
    x.add_generator("y", degree - 1, c, {1});
    x.add_generator("x", degree, d);
    return x;
}

CanonicalForm canonical_form(const FilteredComplex& x) {
    auto problems = validate(x);
    if (!problems.empty()) throw PreconditionError("canonical_form: invalid complex (" + problems.front().message + ")");
    const int n = x.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (x.gens[a].ell != x.gens[b].ell) return x.gens[a].ell < x.gens[b].ell;
        return x.gens[a].degree > x.gens[b].degree;
    });
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) pos[order[p]] = p;

    F2SparseMatrix m(n, n);
    for (int p = 0; p < n; ++p) {
        std::vector<int> c;
        for (int k : x.d[order[p]]) c.push_back(pos[k]);
        std::sort(c.begin(), c.end());
        m.cols[p] = std::move(c);
    }
    Reduction red = column_reduce(m);

    std::vector<int> death_of(static_cast<std::size_t>(n), -1);
    for (int p = 0; p < n; ++p)
        if (!red.R.cols[p].empty()) death_of[red.R.cols[p].back()] = p;

    auto to_original = [&](const F2Vector& v) {
        std::vector<int> out;
        for (int q : v) out.push_back(order[q]);
        std::sort(out.begin(), out.end());
        return out;
    };

    CanonicalForm cf;
    cf.basis = F2SparseMatrix(n, n);
    struct Item {
        Bar bar;
        CanonicalForm::Slot slot;
    };
    std::vector<Item> items;
    for (int p = 0; p < n; ++p) {
        const int g = order[p];
        if (death_of[p] >= 0) {
            const int j = death_of[p];
            cf.basis.cols[g] = to_original(red.R.cols[j]);
            items.push_back({Bar{x.gens[g].degree, x.gens[g].ell, x.gens[order[j]].ell}, {g, order[j]}});
        } else {
            cf.basis.cols[g] = to_original(red.V.cols[p]);
            if (red.R.cols[p].empty()) items.push_back({Bar{x.gens[g].degree, x.gens[g].ell, std::nullopt}, {g, -1}});
        }
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return bar_less(a.bar, b.bar); });
    for (const auto& it : items) {
        cf.barcode.push_back(it.bar);
        cf.slots.push_back(it.slot);
    }
    cf.basis_inverse = inverse(cf.basis);

    FilteredComplex model = from_barcode(cf.barcode);
    cf.to_x = zero_map(model, x);
    std::vector<int> model_of(static_cast<std::size_t>(n), -1);  // new-basis index → model generator
    int k = 0;
    for (const auto& s : cf.slots) {
        cf.to_x.cols[k] = cf.basis.cols[s.birth];
        model_of[s.birth] = k++;
        if (s.death >= 0) {
            cf.to_x.cols[k] = cf.basis.cols[s.death];
            model_of[s.death] = k++;
        }
    }
    cf.from_x = zero_map(x, model);
    for (int i = 0; i < n; ++i) {
        std::vector<int> c;
        for (int q : cf.basis_inverse.cols[i]) c.push_back(model_of[q]);
        std::sort(c.begin(), c.end());
        cf.from_x.cols[i] = std::move(c);
    }
    return cf;
}

Barcode barcode_of(const FilteredComplex& x) { return canonical_form(x).barcode; }

bool verify_canonical_form(const FilteredComplex& x, const CanonicalForm& cf, std::string* why) {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    const int n = x.size();
    if (multiply(cf.basis, cf.basis_inverse) != F2SparseMatrix::identity(n)) return fail("basis is not invertible");
    for (std::size_t k = 0; k < cf.slots.size(); ++k) {
        const auto& s = cf.slots[k];
        const F2Vector& b = cf.basis.cols[s.birth];
        if (!mat_vec(x.differential(), b).empty()) return fail("birth vector is not a cocycle");
        if (x.ell_of(b) != Ext(cf.barcode[k].lo)) return fail("birth vector has the wrong filtration");
        if (s.death >= 0) {
            const F2Vector& dv = cf.basis.cols[s.death];
            if (fk::mat_vec(x.differential(), dv) != b) return fail("death vector does not bound its partner");
            if (x.ell_of(dv) != Ext(*cf.barcode[k].hi)) return fail("death vector has the wrong filtration");
        }
    }
    for (const ChainMap* f : {&cf.to_x, &cf.from_x}) {
        if (!is_closed(*f)) return fail("comparison map is not a chain map");
        if (shift_of_map(*f) > Ext(0)) return fail("comparison map raises filtration");
    }
    if (compose(cf.from_x, cf.to_x).cols != identity_map(cf.to_x.source).cols) return fail("maps are not inverse");
    if (compose(cf.to_x, cf.from_x).cols != identity_map(x).cols) return fail("maps are not inverse");
    return true;
}

Q boundary_depth(const Barcode& b) {
    Q depth(0);
    for (const auto& bar : b)
        if (!bar.infinite()) depth = std::max(depth, bar.length());
    return depth;
}

Q boundary_depth(const FilteredComplex& x) { return boundary_depth(barcode_of(x)); }

bool has_infinite_bars(const Barcode& b) {
    return std::any_of(b.begin(), b.end(), [](const Bar& bar) { return bar.infinite(); });
}

bool is_r_acyclic(const Barcode& b, const Q& r) { return !has_infinite_bars(b) && boundary_depth(b) <= r; }

bool is_r_acyclic(const FilteredComplex& x, const Q& r) { return is_r_acyclic(barcode_of(x), r); }

std::optional<ChainMap> acyclicity_witness(const FilteredComplex& x, const Q& r) {
    return is_nullhomotopic_within(identity_map(x), r);
}

int persistence_rank(const Barcode& b, const Q& r, const Q& s, int degree) {
    if (s < r) throw PreconditionError("persistence_rank needs r <= s");
    int count = 0;
    for (const auto& bar : b)
        if (bar.degree == degree && bar.lo <= r && (bar.infinite() || *bar.hi > s)) ++count;
    return count;
}

int persistence_rank(const FilteredComplex& x, const Q& r, const Q& s, int degree) {
    return persistence_rank(barcode_of(x), r, s, degree);
}

int persistence_rank_direct(const FilteredComplex& x, const Q& r, const Q& s, int degree) {
    if (s < r) throw PreconditionError("persistence_rank needs r <= s");
    const int n = x.size();
    std::vector<int> cyc_cols;
    F2SparseMatrix dz(n, 0);
    for (int i = 0; i < n; ++i)
        if (x.gens[i].degree == degree && x.gens[i].ell <= r) {
            cyc_cols.push_back(i);
            dz.cols.push_back(x.d[i]);
        }
    F2SparseMatrix boundaries(n, 0);
    for (int i = 0; i < n; ++i)
        if (x.gens[i].degree == degree - 1 && x.gens[i].ell <= s) boundaries.cols.push_back(x.d[i]);
    F2SparseMatrix both = boundaries;
    for (const auto& k : kernel_basis(dz)) {
        std::vector<int> v;
        for (int q : k) v.push_back(cyc_cols[q]);
        both.cols.push_back(v);
    }
    return rank(both) - rank(boundaries);
}

bool interval_is_r_torsion(const Bar& bar, const Q& r) {
    // ι_{t−r,t} is nonzero exactly when both t−r and t lie in [lo, hi).
    if (bar.infinite()) return false;
    return !(bar.lo + r < *bar.hi);
}

}  // namespace fk
