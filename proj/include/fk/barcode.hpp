#pragma once

#include "fk/complex.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fk {

struct Bar {
    int degree = 0;
    Q lo;
    std::optional<Q> hi;  // nullopt = infinite

    bool infinite() const { return !hi.has_value(); }
    Q length() const { return *hi - lo; }  // finite bars only
    bool operator==(const Bar&) const = default;
};

// Sort order of the text format: (degree, lo, hi) with infinite ends last.
bool bar_less(const Bar& a, const Bar& b);

using Barcode = std::vector<Bar>;

void sort_barcode(Barcode& b);
Barcode sorted(Barcode b);
bool same_barcode(Barcode a, Barcode b);
Barcode shift_barcode(const Barcode& b, const Q& r);
Barcode translate_barcode(const Barcode& b, int k);  // degrees drop by k
std::string format_bar(const Bar& bar);
std::string format_barcode(const Barcode& b);  // one "bar" line per bar

// Canonical basis of X: new basis vector k is column k of `basis` (old
// coordinates). Paired vectors satisfy ∂(death) = birth; the rest are cycles.
struct CanonicalForm {
    Barcode barcode;  // sorted
    F2SparseMatrix basis;
    F2SparseMatrix basis_inverse;
    struct Slot {
        int birth = -1;  // index in X of the canonical cocycle
        int death = -1;  // -1 for infinite bars
    };
    std::vector<Slot> slots;  // parallel to barcode

    // from_barcode(barcode) → X and back; both preserve filtration exactly.
    ChainMap to_x;
    ChainMap from_x;
};

CanonicalForm canonical_form(const FilteredComplex& x);
Barcode barcode_of(const FilteredComplex& x);

// E_1 for infinite bars; x (lo) and y (hi, one degree lower) with ∂y = x
// for finite bars, in barcode order.
FilteredComplex from_barcode(const Barcode& b);
FilteredComplex interval_e1(const Q& a, int degree = 0);
// E_2(c, d): y at c in degree-1, x at d in degree, ∂y = x.
FilteredComplex interval_e2(const Q& c, const Q& d, int degree = 1);

// Checks a canonical form witness against X.
bool verify_canonical_form(const FilteredComplex& x, const CanonicalForm& cf, std::string* why = nullptr);

Q boundary_depth(const Barcode& b);
Q boundary_depth(const FilteredComplex& x);
bool has_infinite_bars(const Barcode& b);
bool is_r_acyclic(const Barcode& b, const Q& r);
bool is_r_acyclic(const FilteredComplex& x, const Q& r);
// The homotopy-level criterion: id ≃ 0 through ℓ(h) ≤ r.
std::optional<ChainMap> acyclicity_witness(const FilteredComplex& x, const Q& r);

// Rank of H^deg(X^{≤r}) → H^deg(X^{≤s}) counted from bars.
int persistence_rank(const Barcode& b, const Q& r, const Q& s, int degree);
int persistence_rank(const FilteredComplex& x, const Q& r, const Q& s, int degree);
// Same rank from cycles and boundaries of the sublevel complexes.
int persistence_rank_direct(const FilteredComplex& x, const Q& r, const Q& s, int degree);

// Interval module k[lo, hi): whether the structure maps ι_{t−r,t} all vanish.
bool interval_is_r_torsion(const Bar& bar, const Q& r);

enum class ShortRule {
    strict,    // short iff 2·length ≤ τ
    standard,  // short iff length ≤ 2τ
};

struct BottleneckMatch {
    int degree = 0;
    int left = -1;   // index into the first barcode, -1 if none
    int right = -1;  // index into the second barcode, -1 if none
};

struct BottleneckResult {
    Ext value;  // +inf when infinite bar counts differ
    // Pairs, and bars declared short on either side (the other index -1).
    std::vector<BottleneckMatch> matching;
};

BottleneckResult bottleneck(const Barcode& a, const Barcode& b, ShortRule rule = ShortRule::strict);
// Whether a valid short-set/bijection exists at τ (degree-wise).
bool bottleneck_feasible(const Barcode& a, const Barcode& b, const Q& tau, ShortRule rule = ShortRule::strict,
                         std::vector<BottleneckMatch>* matching = nullptr);

}  // namespace fk
