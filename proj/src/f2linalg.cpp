#include "fk/f2linalg.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <string>
#include <unordered_map>

namespace fk {

void add_into(F2Vector& v, const F2Vector& w) {
    if (w.empty()) return;
    F2Vector out;
    out.reserve(v.size() + w.size());
    std::set_symmetric_difference(v.begin(), v.end(), w.begin(), w.end(), std::back_inserter(out));
    v.swap(out);
}

F2Vector add(const F2Vector& a, const F2Vector& b) {
    F2Vector out = a;
    add_into(out, b);
    return out;
}

bool is_sorted_support(const F2Vector& v) {
    return std::adjacent_find(v.begin(), v.end(), [](int a, int b) { return a >= b; }) == v.end();
}

F2Vector normalize(std::vector<int> idx) {
    std::sort(idx.begin(), idx.end());
    F2Vector out;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && idx[j] == idx[i]) ++j;
        if ((j - i) % 2 == 1) out.push_back(idx[i]);
        i = j;
    }
    return out;
}

F2SparseMatrix F2SparseMatrix::identity(int n) {
    F2SparseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.cols[i] = {i};
    return m;
}

void check_matrix(const F2SparseMatrix& m) {
    for (int j = 0; j < m.ncols(); ++j) {
        const auto& c = m.cols[j];
        if (!is_sorted_support(c))
            throw MalformedInput("column " + std::to_string(j) + " is not a sorted support");
        if (!c.empty() && (c.front() < 0 || c.back() >= m.nrows))
            throw MalformedInput("column " + std::to_string(j) + " has a row index out of range");
    }
}

F2Vector mat_vec(const F2SparseMatrix& m, const F2Vector& x) {
    std::vector<int> acc;
    for (int j : x) {
        if (j < 0 || j >= m.ncols()) throw MalformedInput("vector index out of range");
        acc.insert(acc.end(), m.cols[j].begin(), m.cols[j].end());
    }
    return normalize(std::move(acc));
}

F2SparseMatrix multiply(const F2SparseMatrix& a, const F2SparseMatrix& b) {
    if (b.nrows != a.ncols()) throw MalformedInput("dimension mismatch in product");
    F2SparseMatrix out(a.nrows, b.ncols());
    for (int j = 0; j < b.ncols(); ++j) out.cols[j] = mat_vec(a, b.cols[j]);
    return out;
}

F2SparseMatrix add(const F2SparseMatrix& a, const F2SparseMatrix& b) {
    if (a.nrows != b.nrows || a.ncols() != b.ncols()) throw MalformedInput("dimension mismatch in sum");
    F2SparseMatrix out = a;
    for (int j = 0; j < b.ncols(); ++j) add_into(out.cols[j], b.cols[j]);
    return out;
}

F2SparseMatrix transpose(const F2SparseMatrix& m) {
    F2SparseMatrix t(m.ncols(), m.nrows);
    for (int j = 0; j < m.ncols(); ++j)
        for (int i : m.cols[j]) t.cols[i].push_back(j);
    return t;
}

bool is_zero(const F2SparseMatrix& m) {
    return std::all_of(m.cols.begin(), m.cols.end(), [](const F2Vector& c) { return c.empty(); });
}

Reduction column_reduce(const F2SparseMatrix& m) {
    check_matrix(m);
    Reduction red{m, F2SparseMatrix::identity(m.ncols())};
    std::unordered_map<int, int> pivot_of_low;
    for (int j = 0; j < m.ncols(); ++j) {
        auto& col = red.R.cols[j];
        while (!col.empty()) {
            auto it = pivot_of_low.find(col.back());
            if (it == pivot_of_low.end()) break;
            add_into(col, red.R.cols[it->second]);
            add_into(red.V.cols[j], red.V.cols[it->second]);
        }
        if (!col.empty()) pivot_of_low.emplace(col.back(), j);
    }
    return red;
}

namespace {

using Bits = boost::dynamic_bitset<>;

Bits to_bits(const F2Vector& v, int n) {
    Bits b(static_cast<std::size_t>(n));
    for (int i : v) b.set(static_cast<std::size_t>(i));
    return b;
}

F2Vector to_vector(const Bits& b) {
    F2Vector v;
    for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i)) v.push_back(static_cast<int>(i));
    return v;
}

// Incremental Gaussian elimination that remembers, for every stored pivot
// row, which input columns were combined to produce it.
class Eliminator {
public:
    Eliminator(int rows, int inputs) : rows_(rows), inputs_(inputs), pivot_(static_cast<std::size_t>(rows), -1) {}

    // Returns true if the column was independent of the previous ones;
    // otherwise `dependency` receives the combination that vanishes.
    bool insert(const F2Vector& column, int tag, Bits* dependency = nullptr) {
        Bits v = to_bits(column, rows_);
        Bits combo(static_cast<std::size_t>(inputs_));
        combo.set(static_cast<std::size_t>(tag));
        reduce(v, combo);
        if (v.none()) {
            if (dependency) *dependency = combo;
            return false;
        }
        auto p = v.find_first();
        pivot_[p] = static_cast<int>(vecs_.size());
        vecs_.push_back(std::move(v));
        combos_.push_back(std::move(combo));
        return true;
    }

    // Reduces v; combo accumulates the stored columns used.
    void reduce(Bits& v, Bits& combo) const {
        for (auto p = v.find_first(); p != Bits::npos; p = v.find_next(p)) {
            int k = pivot_[p];
            if (k < 0) continue;
            v ^= vecs_[k];
            combo ^= combos_[k];
        }
    }

    int rank() const { return static_cast<int>(vecs_.size()); }
    int rows() const { return rows_; }
    int inputs() const { return inputs_; }

private:
    int rows_;
    int inputs_;
    std::vector<int> pivot_;
    std::vector<Bits> vecs_;
    std::vector<Bits> combos_;
};

}  // namespace

std::optional<F2Vector> solve_in_span(const F2SparseMatrix& a, const F2Vector& b,
                                      const std::vector<int>& allowed) {
    check_matrix(a);
    if (!is_sorted_support(b) || (!b.empty() && (b.front() < 0 || b.back() >= a.nrows)))
        throw MalformedInput("right-hand side index out of range");
    for (int j : allowed)
        if (j < 0 || j >= a.ncols()) throw MalformedInput("allowed column " + std::to_string(j) + " out of range");
    if (b.empty()) return F2Vector{};

    Eliminator el(a.nrows, a.ncols());
    for (int j : allowed) el.insert(a.cols[j], j);
    Bits v = to_bits(b, a.nrows);
    Bits combo(static_cast<std::size_t>(a.ncols()));
    el.reduce(v, combo);
    if (v.any()) return std::nullopt;
    return to_vector(combo);
}

int rank(const F2SparseMatrix& m) {
    check_matrix(m);
    Eliminator el(m.nrows, m.ncols());
    for (int j = 0; j < m.ncols(); ++j) el.insert(m.cols[j], j);
    return el.rank();
}

std::vector<F2Vector> kernel_basis(const F2SparseMatrix& m) {
    check_matrix(m);
    Eliminator el(m.nrows, m.ncols());
    std::vector<F2Vector> basis;
    for (int j = 0; j < m.ncols(); ++j) {
        Bits dep;
        if (!el.insert(m.cols[j], j, &dep)) basis.push_back(to_vector(dep));
    }
    return basis;
}

F2SparseMatrix inverse(const F2SparseMatrix& m) {
    if (m.nrows != m.ncols()) throw std::invalid_argument("inverse of a non-square matrix");
    check_matrix(m);
    const int n = m.nrows;
    Eliminator el(n, n);
    for (int j = 0; j < n; ++j)
        if (!el.insert(m.cols[j], j)) throw std::invalid_argument("matrix is singular");
    F2SparseMatrix inv(n, n);
    for (int i = 0; i < n; ++i) {
        Bits v = to_bits({i}, n);
        Bits combo(static_cast<std::size_t>(n));
        el.reduce(v, combo);
        inv.cols[i] = to_vector(combo);
    }
    return inv;
}

}  // namespace fk
