#pragma once

#include "fk/complex.hpp"

#include <optional>
#include <vector>

namespace fk {

// Joint linear solve for several unknown maps subject to linear equations
// of the form  Σ post∘X∘pre + Σ (∂X + X∂) = rhs.  Every unknown ranges over
// the elementary maps of its degree whose filtration gap is ≤ its bound.
class MapSystem {
public:
    int unknown(const FilteredComplex& source, const FilteredComplex& target, int degree, const Ext& bound);
    // rhs is a map source → target of the given degree (use zero_map for 0).
    int equation(const ChainMap& rhs);
    // eq += post ∘ X ∘ pre; either side may be omitted (identity).
    void term(int eq, int x, const std::optional<F2SparseMatrix>& post = std::nullopt,
              const std::optional<F2SparseMatrix>& pre = std::nullopt);
    // eq += ∂X + X∂
    void boundary_term(int eq, int x);
    // ∂X + X∂ = 0
    void closed(int x);

    // Unknown values in declaration order, or nullopt if inconsistent.
    std::optional<std::vector<ChainMap>> solve() const;

private:
    struct Unknown {
        FilteredComplex source, target;
        int degree;
        std::vector<std::pair<int, int>> pairs;  // admissible (i, j): x_i ↦ y_j
    };
    struct Term {
        int x;
        bool boundary;
        std::optional<F2SparseMatrix> post, pre;
    };
    struct Equation {
        ChainMap rhs;
        std::vector<Term> terms;
    };
    std::vector<Unknown> unknowns_;
    std::vector<Equation> equations_;
};

}  // namespace fk
