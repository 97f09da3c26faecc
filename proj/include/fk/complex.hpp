#pragma once

#include "fk/f2linalg.hpp"
#include "fk/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fk {

struct Generator {
    std::string id;
    int degree = 0;
    Q ell;
};

// Finite cochain complex over F2 with a filtered basis. d[i] is the
// boundary of generator i, written in generator indices; ∂ raises degree.
struct FilteredComplex {
    std::vector<Generator> gens;
    std::vector<F2Vector> d;

    int size() const { return static_cast<int>(gens.size()); }
    bool empty() const { return gens.empty(); }
    void add_generator(std::string id, int degree, Q ell, F2Vector boundary = {});
    // ℓ of a combination is the max over its support; -inf for 0.
    Ext ell_of(const F2Vector& v) const;
    F2SparseMatrix differential() const;
    int index_of(const std::string& id) const;  // -1 if absent
};

// Same degrees, filtrations and differential; ids are ignored.
bool same_structure(const FilteredComplex& a, const FilteredComplex& b);

struct Violation {
    std::string kind;  // "d-squared", "degree", "filtration", "index", "duplicate-id"
    std::vector<std::string> ids;
    std::string message;
};
std::vector<Violation> validate(const FilteredComplex& x);

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// F2-linear map of a fixed degree. cols[i] is the image of source generator i.
struct ChainMap {
    FilteredComplex source;
    FilteredComplex target;
    int degree = 0;
    std::vector<F2Vector> cols;

    bool is_zero() const;
    F2SparseMatrix matrix() const;
};

bool same_matrix(const ChainMap& f, const ChainMap& g);
// Degree consistency of every column and index range; throws PreconditionError.
void check_map(const ChainMap& f);
// ∂f = f∂ over F2.
bool is_closed(const ChainMap& f);
Ext shift_of_map(const ChainMap& f);

ChainMap zero_map(const FilteredComplex& x, const FilteredComplex& y, int degree = 0);
ChainMap identity_map(const FilteredComplex& x);
ChainMap map_from_matrix(const FilteredComplex& x, const FilteredComplex& y, const F2SparseMatrix& m,
                         int degree = 0);
ChainMap compose(const ChainMap& g, const ChainMap& f);
ChainMap add(const ChainMap& f, const ChainMap& g);
// Same matrix between other complexes with matching generator counts and degrees.
ChainMap reinterpret(const ChainMap& f, const FilteredComplex& source, const FilteredComplex& target);

FilteredComplex shift_complex(const FilteredComplex& x, const Q& r);  // Σ^r
// T: the degree of every generator drops by one, so (TX)^n = X^{n+1}.
FilteredComplex translate(const FilteredComplex& x);
FilteredComplex translate_inverse(const FilteredComplex& x);
FilteredComplex translate_by(const FilteredComplex& x, int k);  // T^k, k may be negative
ChainMap shift_map(const ChainMap& f, const Q& r);                // Σ^r f
ChainMap translate_map(const ChainMap& f, int k = 1);             // T^k f

// η_r: Σ^r X → X, the identity matrix.
ChainMap eta(const FilteredComplex& x, const Q& r);

struct DirectSum {
    FilteredComplex sum;
    ChainMap in1, in2, pr1, pr2;
};
DirectSum direct_sum(const FilteredComplex& x, const FilteredComplex& y);
FilteredComplex direct_sum_of(const std::vector<FilteredComplex>& parts);
ChainMap map_sum(const ChainMap& f, const ChainMap& g);

// λ-cone of a closed degree-0 map f: X → Y. Generators are Y followed by
// Σ^λ T X, with ∂(x) = f(x) + ∂x.
struct Cone {
    FilteredComplex complex;
    ChainMap incl;  // Y → Cone
    ChainMap proj;  // Cone → Σ^λ T X
};
Cone cone(const ChainMap& f, const Q& lambda = Q(0));

// Hom(X, Y): generators (i, j) meaning x_i ↦ y_j, index i*|Y| + j.
struct HomComplex {
    FilteredComplex complex;
    int nx = 0, ny = 0;
    int index(int i, int j) const { return i * ny + j; }
};
HomComplex hom_complex(const FilteredComplex& x, const FilteredComplex& y);
F2Vector encode(const HomComplex& h, const ChainMap& f);
ChainMap decode(const HomComplex& h, const F2Vector& v, const FilteredComplex& x, const FilteredComplex& y,
                int degree);

// ∂h + h∂, the Hom differential applied to h.
ChainMap hom_boundary(const ChainMap& h);

// h of degree deg(f) − 1 with ∂h + h∂ = f and ℓ(h) ≤ bound.
std::optional<ChainMap> find_homotopy(const ChainMap& f, const Ext& bound);
// Homotopy with ℓ(h) ≤ ℓ(f) + s.
std::optional<ChainMap> is_nullhomotopic_within(const ChainMap& f, const Q& s);
// f − g nullhomotopic through ℓ(h) ≤ bound.
bool homotopic_within(const ChainMap& f, const ChainMap& g, const Ext& bound);

}  // namespace fk
