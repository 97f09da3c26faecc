#pragma once

#include "fk/barcode.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fk {

// A → B → C → Σ^{-r}TA with all maps closed, degree 0 and shift ≤ 0.
struct Triangle {
    FilteredComplex A, B, C;
    ChainMap u, v, w;
    Q weight;
};

// C′ = cone(u), φ: C′ → C an r-isomorphism, ψ: Σ^r C → C′ a right r-inverse.
struct TriangleWitness {
    FilteredComplex Cprime;
    ChainMap phi, psi;
};

struct WitnessedTriangle {
    Triangle tri;
    TriangleWitness wit;
};

struct TriangleCheck {
    bool ok = true;
    std::vector<std::string> failed;  // clause names
};

// f ≃_r g for maps in Mor^level: homotopy with ℓ ≤ level + r.
bool r_equivalent(const ChainMap& f, const ChainMap& g, const Q& level, const Q& r);
// shift ≤ 0, closed and cone(f) r-acyclic.
bool is_r_isomorphism(const ChainMap& f, const Q& r);

// ψ: Σ^r B → A with f∘ψ ≃_0 η_r^B; throws PreconditionError if none exists.
ChainMap right_r_inverse(const ChainMap& f, const Q& r);
// φ: B → Σ^{-r} A with φ∘f ≃_0 η_r.
ChainMap left_r_inverse(const ChainMap& f, const Q& r);
struct RInverses {
    ChainMap left;   // B → Σ^{-r} A
    ChainMap right;  // Σ^r B → A
};
// Throws PreconditionError naming the longest cone bar when f is not an r-isomorphism.
RInverses r_inverses(const ChainMap& f, const Q& r);

// Least k with f homotopic to a map of shift ≤ k; -inf when f ≃ 0.
// `representative` receives such a map.
Ext spectral_invariant(const ChainMap& f, ChainMap* representative = nullptr);
// A map of shift ≤ k homotopic to f, if any.
std::optional<ChainMap> representative_at(const ChainMap& f, const Q& k);

TriangleCheck verify_triangle(const Triangle& t, const TriangleWitness& wit);
inline TriangleCheck verify_triangle(const WitnessedTriangle& t) { return verify_triangle(t.tri, t.wit); }

// Cone triangle for shift ≤ 0, the shifted cone triangle of weight ℓ(f) otherwise.
WitnessedTriangle triangle_from_morphism(const ChainMap& f);
// Σ^r A → A → cone(η_r) → TA with zero third map, weight r.
WitnessedTriangle eta_triangle(const FilteredComplex& a, const Q& r);
// 0 → X → X → 0, weight 0.
WitnessedTriangle identity_triangle(const FilteredComplex& x);
// T⁻¹X → 0 → X → X, weight 0.
WitnessedTriangle singleton_triangle(const FilteredComplex& x);

WitnessedTriangle relax_weight(const WitnessedTriangle& t, const Q& s);
WitnessedTriangle translate_triangle(const WitnessedTriangle& t, int k = 1);
// B → C → Σ^{-r}TA → Σ^{-2r}TB of weight 2r.
WitnessedTriangle rotate(const WitnessedTriangle& t);
// T⁻¹Σ^r C → A → B → Σ^{-r}C of weight 2r.
WitnessedTriangle rotate_negative(const WitnessedTriangle& t);

struct SquareCheck {
    std::string name;
    bool holds = false;
    Q level;  // homotopy level that was tested
};

struct Octahedron {
    WitnessedTriangle d3;  // F → A → C → TF, weight 0
    WitnessedTriangle d4;  // TE → C → B → Σ^{-r-s}T²E, weight r+s
    std::vector<SquareCheck> squares;
};
// d1: E → F → X of weight r, d2: X → A → B of weight s.
Octahedron octahedron(const WitnessedTriangle& d1, const WitnessedTriangle& d2);

// Componentwise sum with weight max{r, s}.
WitnessedTriangle sum_triangles(const WitnessedTriangle& a, const WitnessedTriangle& b);

struct Fill {
    ChainMap h;  // C1 → Σ^{-r} C2
    bool middle_ok = false;  // h∘v1 ≃_r η_r∘v2∘g
    bool right_ok = false;   // w2∘h ≃_s (η_s∘Σ^{-r}Tf)∘w1
};
// Requires g∘u1 ≃_0 u2∘f.
Fill fill_morphism(const WitnessedTriangle& d1, const WitnessedTriangle& d2, const ChainMap& f, const ChainMap& g);

// Limit-category triangles: maps of arbitrary shift, u: A → B, v: B → C, w: C → TA.
struct LimitTriangle {
    FilteredComplex A, B, C;
    ChainMap u, v, w;
};

struct LimitWeight {
    Ext bound = Ext::pos_inf();
    Q ku, kv, kw;  // levels of the certified representative
    Q s;           // Σ^{s,0,0,s} shift (stable search only)
    std::optional<WitnessedTriangle> certificate;
    // Every grid point of smaller total weight failed for the tried representatives.
    bool minimal_on_grid = false;
};

std::vector<Q> weight_grid(const LimitTriangle& t);
LimitWeight unstable_weight_upper(const LimitTriangle& t);
// Minimum over s of the unstable bound of Σ^{s,0,0,s}Δ; s ranges over the grid plus extra values.
LimitWeight stable_weight_upper(const LimitTriangle& t, const std::vector<Q>& extra_s = {});
LimitTriangle shift_first_last(const LimitTriangle& t, const Q& s);

struct TriangularWeight {
    std::string name;
    std::function<Q(const WitnessedTriangle&)> weight;
    Q w0;
};
TriangularWeight persistence_weight();
TriangularWeight flat_weight();
// a·persistence + b·flat
TriangularWeight mixed_weight(const Q& a, const Q& b);

struct WeightReport {
    int pairs = 0;
    std::vector<std::string> violations;
};
// Runs the octahedron on each pair and checks the weighted octahedral
// inequality, the normalization and the B = 0 simplification.
WeightReport check_triangular_weight(const TriangularWeight& wf,
                                     const std::vector<std::pair<WitnessedTriangle, WitnessedTriangle>>& pairs);

}  // namespace fk
