// Small helpers shared by the unit tests. Deliberately independent of the
// library's own generators so that they can serve as oracles.
#pragma once

#include "fk/barcode.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace fktest {

using fk::Q;

inline Q grid_value(std::mt19937_64& rng, int lo_num = 0, int hi_num = 24, int den = 4) {
    std::uniform_int_distribution<int> d(lo_num, hi_num);
    return Q(d(rng), den);
}

inline fk::Barcode random_barcode(std::mt19937_64& rng, int max_bars, int deg_lo = 0, int deg_hi = 2,
                                  bool allow_infinite = true) {
    std::uniform_int_distribution<int> nb(0, max_bars);
    std::uniform_int_distribution<int> deg(deg_lo, deg_hi);
    std::uniform_int_distribution<int> coin(0, 3);
    fk::Barcode b;
    const int n = nb(rng);
    for (int i = 0; i < n; ++i) {
        fk::Bar bar;
        bar.degree = deg(rng);
        bar.lo = grid_value(rng);
        if (!allow_infinite || coin(rng) != 0) bar.hi = bar.lo + grid_value(rng, 0, 12);
        b.push_back(bar);
    }
    return b;
}

// Dense F2 matrix as rows of bools, for oracle computations.
using Dense = std::vector<std::vector<bool>>;

inline Dense to_dense(const fk::F2SparseMatrix& m) {
    Dense d(static_cast<std::size_t>(m.nrows), std::vector<bool>(static_cast<std::size_t>(m.ncols()), false));
    for (int j = 0; j < m.ncols(); ++j)
        for (int i : m.cols[j]) d[i][j] = true;
    return d;
}

inline int dense_rank(Dense a) {
    int r = 0;
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = r;
        while (p < rows && !a[p][c]) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        for (int i = 0; i < rows; ++i)
            if (i != r && a[i][c])
                for (int k = 0; k < cols; ++k) a[i][k] = a[i][k] != a[r][k];
        ++r;
    }
    return r;
}

// Conjugates X by a random filtered change of basis: generator i is replaced
// by itself plus a random sum of same-degree generators that come earlier in
// (ℓ, index) order, which is a filtration-preserving isomorphism. If `iso` is
// given it receives the chain isomorphism from the new complex back to X.
inline fk::FilteredComplex random_basis_change(const fk::FilteredComplex& x, std::mt19937_64& rng,
                                               fk::ChainMap* iso = nullptr) {
    const int n = x.size();
    fk::F2SparseMatrix m = fk::F2SparseMatrix::identity(n);
    std::uniform_int_distribution<int> coin(0, 2);
    for (int i = 0; i < n; ++i) {
        std::vector<int> col{i};
        for (int j = 0; j < n; ++j) {
            if (j == i || x.gens[j].degree != x.gens[i].degree) continue;
            bool earlier = x.gens[j].ell < x.gens[i].ell || (x.gens[j].ell == x.gens[i].ell && j < i);
            if (earlier && coin(rng) == 0) col.push_back(j);
        }
        std::sort(col.begin(), col.end());
        m.cols[i] = col;
    }
    fk::F2SparseMatrix dnew = fk::multiply(fk::inverse(m), fk::multiply(x.differential(), m));
    fk::FilteredComplex y = x;
    y.d = dnew.cols;
    if (iso) *iso = fk::map_from_matrix(y, x, m);
    return y;
}

// Random complex: a random barcode model hidden behind a basis change.
inline fk::FilteredComplex random_complex(std::mt19937_64& rng, int max_bars, bool allow_infinite = true) {
    return fktest::random_basis_change(fk::from_barcode(random_barcode(rng, max_bars, 0, 2, allow_infinite)), rng);
}

// Random closed degree-0 map X → Y of shift ≤ bound: a random combination of
// a kernel basis of the Hom differential restricted to that filtration level.
inline fk::ChainMap random_closed_map(const fk::FilteredComplex& x, const fk::FilteredComplex& y,
                                      std::mt19937_64& rng, const Q& bound) {
    const int nx = x.size(), ny = y.size();
    std::vector<std::pair<int, int>> pairs;
    fk::F2SparseMatrix d(nx * ny, 0);
    std::vector<std::vector<int>> co(static_cast<std::size_t>(nx));
    for (int m = 0; m < nx; ++m)
        for (int i : x.d[m]) co[i].push_back(m);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            if (y.gens[j].degree != x.gens[i].degree || y.gens[j].ell - x.gens[i].ell > bound) continue;
            std::vector<int> bd;
            for (int k : y.d[j]) bd.push_back(i * ny + k);
            for (int m : co[i]) bd.push_back(m * ny + j);
            d.cols.push_back(fk::normalize(std::move(bd)));
            pairs.emplace_back(i, j);
        }
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<int> pick;
    for (const auto& k : fk::kernel_basis(d))
        if (coin(rng)) pick.insert(pick.end(), k.begin(), k.end());
    fk::ChainMap f = fk::zero_map(x, y);
    for (int c : fk::normalize(pick)) f.cols[pairs[c].first].push_back(pairs[c].second);
    for (auto& c : f.cols) std::sort(c.begin(), c.end());
    return f;
}

// Random r-isomorphism: identity matrices between barcode models whose
// endpoints differ by at most r, plus maps to and from r-acyclic summands,
// conjugated by random filtered isomorphisms on both sides.
inline fk::ChainMap random_r_iso(std::mt19937_64& rng, const Q& r, int max_bars = 4) {
    fk::Barcode base = random_barcode(rng, max_bars);
    fk::Barcode src = base;
    std::uniform_int_distribution<int> pct(0, 4);
    for (auto& bar : src) {
        bar.lo += r * Q(pct(rng), 4);
        if (bar.hi) *bar.hi = std::max(*bar.hi + r * Q(pct(rng), 4), bar.lo);
    }
    fk::Barcode k1 = random_barcode(rng, 2, 0, 2, false), k2 = random_barcode(rng, 2, 0, 2, false);
    for (auto* k : {&k1, &k2})
        for (auto& bar : *k) *bar.hi = bar.lo + r * Q(pct(rng), 4);
    fk::FilteredComplex x0 = fk::from_barcode(src), y0 = fk::from_barcode(base);
    fk::FilteredComplex x1 = fk::direct_sum(x0, fk::from_barcode(k1)).sum;
    fk::FilteredComplex y1 = fk::direct_sum(y0, fk::from_barcode(k2)).sum;
    fk::ChainMap f = fk::zero_map(x1, y1);
    for (int i = 0; i < x0.size(); ++i) f.cols[i] = {i};
    fk::ChainMap mx, my;
    fk::FilteredComplex x = fktest::random_basis_change(x1, rng, &mx);
    fk::FilteredComplex y = fktest::random_basis_change(y1, rng, &my);
    fk::ChainMap my_inv = fk::map_from_matrix(y1, y, fk::inverse(my.matrix()));
    return fk::compose(my_inv, fk::compose(f, mx));
}

}  // namespace fktest
