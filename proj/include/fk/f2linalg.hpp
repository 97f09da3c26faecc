#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

namespace fk {

// Sparse F2 vector: strictly increasing list of indices with coefficient 1.
using F2Vector = std::vector<int>;

// v += w over F2 (symmetric difference of sorted supports).
void add_into(F2Vector& v, const F2Vector& w);
F2Vector add(const F2Vector& a, const F2Vector& b);
bool is_sorted_support(const F2Vector& v);
// Builds a valid support from arbitrary indices, cancelling duplicates in pairs.
F2Vector normalize(std::vector<int> idx);

struct F2SparseMatrix {
    int nrows = 0;
    std::vector<F2Vector> cols;

    F2SparseMatrix() = default;
    F2SparseMatrix(int rows, int ncols) : nrows(rows), cols(static_cast<std::size_t>(ncols)) {}

    int ncols() const { return static_cast<int>(cols.size()); }
    static F2SparseMatrix identity(int n);
    bool operator==(const F2SparseMatrix&) const = default;
};

class MalformedInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void check_matrix(const F2SparseMatrix& m);
F2Vector mat_vec(const F2SparseMatrix& m, const F2Vector& x);
F2SparseMatrix multiply(const F2SparseMatrix& a, const F2SparseMatrix& b);
F2SparseMatrix add(const F2SparseMatrix& a, const F2SparseMatrix& b);
F2SparseMatrix transpose(const F2SparseMatrix& m);
bool is_zero(const F2SparseMatrix& m);

struct Reduction {
    F2SparseMatrix R;
    F2SparseMatrix V;  // R = M V, V unit upper triangular
};

// Left-to-right column reduction: every column only absorbs earlier columns,
// so nonzero columns of R end with pairwise distinct lowest indices.
Reduction column_reduce(const F2SparseMatrix& m);

// Some x with support inside `allowed` and A x = b, if one exists.
std::optional<F2Vector> solve_in_span(const F2SparseMatrix& a, const F2Vector& b,
                                      const std::vector<int>& allowed);

int rank(const F2SparseMatrix& m);
// Basis of {x : A x = 0}.
std::vector<F2Vector> kernel_basis(const F2SparseMatrix& m);
// Inverse of a square invertible matrix; throws std::invalid_argument if singular.
F2SparseMatrix inverse(const F2SparseMatrix& m);

}  // namespace fk
