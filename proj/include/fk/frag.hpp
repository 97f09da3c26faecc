#pragma once

#include "fk/tpc.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fk {

// Successive strict exact triangles X_i → Y_{i−1} → Y_i → Σ^{-r_i}TX_i.
// `start` is Y_0: empty for cone decompositions, X′ for the underline variant.
struct ConeDecomposition {
    FilteredComplex start;
    std::vector<WitnessedTriangle> steps;

    std::vector<FilteredComplex> linearization() const;
    Q weight() const;
    const FilteredComplex& target() const;
};

// Family membership is decided on barcodes, after the optional closures.
struct FamilySpec {
    std::vector<FilteredComplex> members;
    bool closed_shift = false;
    bool closed_T = false;
    bool with_zero = false;

    bool contains(const FilteredComplex& x) const;
    bool contains(const Barcode& b) const;
};

struct DecompositionCheck {
    bool ok = true;
    std::vector<std::string> failed;
    Q weight;
    std::vector<int> slots;  // linearization indices used for the X′ entries
};

// Chain condition, every triangle verifies, last apex is X.
DecompositionCheck check_decomposition(const ConeDecomposition& d, const FilteredComplex& x);
// Also: every linearization entry is in F except one entry per X′ equal to T⁻¹X′, in order.
DecompositionCheck validate_decomposition(const ConeDecomposition& d, const FilteredComplex& x, const FamilySpec& f,
                                          const FilteredComplex& xprime);
DecompositionCheck validate_decomposition(const ConeDecomposition& d, const FilteredComplex& x, const FamilySpec& f,
                                          const std::vector<FilteredComplex>& xprimes);
// Y_0 = X′, Y_n = X and every X_i in F.
DecompositionCheck validate_underline(const ConeDecomposition& d, const FilteredComplex& x, const FilteredComplex& xprime,
                                      const FamilySpec& f);

// A → B → φ.target where φ: cone(u) → C is an r-isomorphism; weight r.
WitnessedTriangle triangle_with_iso(const ChainMap& u, const ChainMap& phi, const Q& r);

ConeDecomposition singleton_decomposition(const FilteredComplex& x);
// A → B → X read as a decomposition with linearization (T⁻¹B, A).
ConeDecomposition triangle_decomposition(const WitnessedTriangle& t);
ConeDecomposition translate_decomposition(const ConeDecomposition& d, int k);
// Replaces step i by the iterated octahedron against D′ (a decomposition of X_i).
ConeDecomposition refine(const ConeDecomposition& d, int i, const ConeDecomposition& dprime);
// Decomposition of A ⊕ B: D_A, then each step of D_B summed with 0 → A → A.
ConeDecomposition sum_decompositions(const ConeDecomposition& da, const ConeDecomposition& db);

// h: Z → X an r-isomorphism: T⁻¹Z → 0 → X, linearization (T⁻¹Z), weight r.
ConeDecomposition iso_decomposition(const ChainMap& h, const Q& r);
// g: X → Y an r-isomorphism with K = cone(g): 0 → 0 → T⁻¹K, T⁻¹Y → T⁻¹K → X.
// Linearization (0, T⁻¹Y), weight depth(K).
ConeDecomposition cone_decomposition(const ChainMap& g);
// For a ≥ c: 0 → 0 → 0, T⁻¹E_1(a) → 0 → E_1(c), 0 → E_1(c) → E_1(c); weight a − c.
ConeDecomposition case_one_decomposition(const Q& a, const Q& c, int degree = 0);

// Identity-matrix map between barcode models: pairs matched bar to bar,
// unmatched bars become acyclic summands of the cone. Chooses the matching
// minimizing the depth of the cone. Returns nullopt when no such map is an
// isomorphism at any r.
struct ModelIso {
    Q r;
    ChainMap map;  // source → target, through the canonical forms
};
std::optional<ModelIso> best_model_iso(const FilteredComplex& source, const FilteredComplex& target);

struct DeltaBound {
    Ext value = Ext::pos_inf();
    std::string strategy;  // "iso", "cone", "prop51", "zero-target" or "none"
    std::optional<ConeDecomposition> witness;
};
DeltaBound delta_upper(const FilteredComplex& x, const FilteredComplex& xprime, const FamilySpec& f,
                       ShortRule rule = ShortRule::strict);
Ext d_frag_upper(const FilteredComplex& x, const FilteredComplex& xprime, const FamilySpec& f,
                 ShortRule rule = ShortRule::strict);
DeltaBound underline_delta_upper(const FilteredComplex& x, const FilteredComplex& xprime, const FamilySpec& f);

struct Prop51Result {
    Ext tau;            // bottleneck distance
    Q constant;         // 4·min{#B(X), #B(Y)} + 1
    Ext bound;          // max of the two witness weights
    Ext pair_bound;    // (4·#non-short pairs + 1)·τ, the per-pair accounting
    bool within_constant = false;  // bound ≤ constant·τ
    std::vector<BottleneckMatch> matching;
    std::optional<ConeDecomposition> forward;   // of X through T⁻¹Y
    std::optional<ConeDecomposition> backward;  // of Y through T⁻¹X
};
// Requires 0 ∈ F.
Prop51Result prop51_pipeline(const FilteredComplex& x, const FilteredComplex& y, const FamilySpec& f,
                             ShortRule rule = ShortRule::strict);

struct OracleResult {
    bool completed = false;  // the search was exhaustive within its node cap
    Ext value = Ext::pos_inf();  // +inf: nothing within the budgets
    std::optional<ConeDecomposition> witness;
    long explored = 0;
};
// Exhaustive search on tiny instances (≤ 3 bars each, depth ≤ 4). Attaching
// maps range over all homotopy classes of shift-0 maps; intermediate apexes
// are cones (weight 0) or acyclic sums of ≤ 2 intervals with endpoints on the
// instance grid; the last apex is X reached through an r-isomorphism.
OracleResult delta_exact_small(const FilteredComplex& x, const FilteredComplex& xprime, const FamilySpec& f,
                               int depth_budget, const Q& weight_budget, long node_cap = 200000);

}  // namespace fk
