#include "fk/solve.hpp"

#include <algorithm>

namespace fk {

int MapSystem::unknown(const FilteredComplex& source, const FilteredComplex& target, int degree, const Ext& bound) {
    Unknown u{source, target, degree, {}};
    if (!bound.is_neg_inf())
        for (int i = 0; i < source.size(); ++i)
            for (int j = 0; j < target.size(); ++j) {
                if (target.gens[j].degree - source.gens[i].degree != degree) continue;
                if (Ext(target.gens[j].ell - source.gens[i].ell) > bound) continue;
                u.pairs.emplace_back(i, j);
            }
    unknowns_.push_back(std::move(u));
    return static_cast<int>(unknowns_.size()) - 1;
}

int MapSystem::equation(const ChainMap& rhs) {
    equations_.push_back({rhs, {}});
    return static_cast<int>(equations_.size()) - 1;
}

void MapSystem::term(int eq, int x, const std::optional<F2SparseMatrix>& post,
                     const std::optional<F2SparseMatrix>& pre) {
    const Equation& e = equations_.at(eq);
    const Unknown& u = unknowns_.at(x);
    const int rows_src = pre ? pre->nrows : e.rhs.source.size();
    const int cols_src = pre ? pre->ncols() : u.source.size();
    const int rows_tgt = post ? post->nrows : u.target.size();
    const int cols_tgt = post ? post->ncols() : e.rhs.target.size();
    if (rows_src != u.source.size() || cols_src != e.rhs.source.size())
        throw PreconditionError("MapSystem: pre-composition has the wrong shape");
    if (rows_tgt != e.rhs.target.size() || cols_tgt != u.target.size())
        throw PreconditionError("MapSystem: post-composition has the wrong shape");
    equations_[eq].terms.push_back({x, false, post, pre});
}

void MapSystem::boundary_term(int eq, int x) {
    const Equation& e = equations_.at(eq);
    const Unknown& u = unknowns_.at(x);
    if (!same_structure(u.source, e.rhs.source) || !same_structure(u.target, e.rhs.target) ||
        u.degree + 1 != e.rhs.degree)
        throw PreconditionError("MapSystem: boundary term does not match its equation");
    equations_[eq].terms.push_back({x, true, std::nullopt, std::nullopt});
}

void MapSystem::closed(int x) {
    const Unknown& u = unknowns_.at(x);
    int eq = equation(zero_map(u.source, u.target, u.degree + 1));
    boundary_term(eq, x);
}

std::optional<std::vector<ChainMap>> MapSystem::solve() const {
    std::vector<int> row_offset;
    int nrows = 0;
    for (const auto& e : equations_) {
        row_offset.push_back(nrows);
        nrows += e.rhs.source.size() * e.rhs.target.size();
    }
    std::vector<int> col_offset;
    int ncols = 0;
    for (const auto& u : unknowns_) {
        col_offset.push_back(ncols);
        ncols += static_cast<int>(u.pairs.size());
    }

    std::vector<std::vector<int>> cols(static_cast<std::size_t>(ncols));
    for (std::size_t q = 0; q < equations_.size(); ++q) {
        const Equation& e = equations_[q];
        const int nt = e.rhs.target.size();
        const int base = row_offset[q];
        for (const Term& t : e.terms) {
            const Unknown& u = unknowns_[t.x];
            // pre-image rows: which equation-source generators hit x_i
            std::vector<std::vector<int>> hits(static_cast<std::size_t>(u.source.size()));
            if (t.pre) {
                for (int a = 0; a < t.pre->ncols(); ++a)
                    for (int i : t.pre->cols[a]) hits[i].push_back(a);
            } else {
                for (int i = 0; i < u.source.size(); ++i) hits[i].push_back(i);
            }
            std::vector<std::vector<int>> co;
            if (t.boundary) {
                co.resize(static_cast<std::size_t>(u.source.size()));
                for (int m = 0; m < u.source.size(); ++m)
                    for (int i : u.source.d[m]) co[i].push_back(m);
            }
            for (std::size_t k = 0; k < u.pairs.size(); ++k) {
                const auto [i, j] = u.pairs[k];
                auto& col = cols[col_offset[t.x] + k];
                if (t.boundary) {
                    for (int b : u.target.d[j]) col.push_back(base + i * nt + b);
                    for (int m : co[i]) col.push_back(base + m * nt + j);
                    continue;
                }
                const F2Vector single{j};
                const F2Vector& img = t.post ? t.post->cols[j] : single;
                for (int a : hits[i])
                    for (int b : img) col.push_back(base + a * nt + b);
            }
        }
    }
    F2SparseMatrix a(nrows, ncols);
    for (int c = 0; c < ncols; ++c) a.cols[c] = normalize(std::move(cols[c]));

    std::vector<int> rhs;
    for (std::size_t q = 0; q < equations_.size(); ++q) {
        const ChainMap& r = equations_[q].rhs;
        const int nt = r.target.size();
        for (int i = 0; i < r.source.size(); ++i)
            for (int j : r.cols[i]) rhs.push_back(row_offset[q] + i * nt + j);
    }
    std::sort(rhs.begin(), rhs.end());

    std::vector<int> all(static_cast<std::size_t>(ncols));
    for (int c = 0; c < ncols; ++c) all[c] = c;
    auto sol = solve_in_span(a, rhs, all);
    if (!sol) return std::nullopt;

    std::vector<ChainMap> out;
    for (const auto& u : unknowns_) out.push_back(zero_map(u.source, u.target, u.degree));
    std::size_t x = 0;
    for (int c : *sol) {
        while (x + 1 < unknowns_.size() && c >= col_offset[x + 1]) ++x;
        const auto [i, j] = unknowns_[x].pairs[c - col_offset[x]];
        out[x].cols[i].push_back(j);
    }
    for (auto& m : out)
        for (auto& c : m.cols) std::sort(c.begin(), c.end());
    return out;
}

}  // namespace fk
