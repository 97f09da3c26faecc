#pragma once

#include "fk/frag.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fk {

struct GenConfig {
    std::uint64_t seed = 1;
    int max_generators = 6;
    int max_degree_span = 3;
    std::vector<Q> filtration_grid;  // empty: multiples of 1/8 in [0, 4]
    Q density = Q(1, 2);

    const std::vector<Q>& grid() const;
};

struct GenStats {
    long columns = 0;
    long rejected = 0;  // ∂² ≠ 0 draws thrown away
};

// Random degrees and filtrations from the grid; each column of ∂ is a random
// subset of the legal entries (degree + 1, not higher ℓ, earlier in ℓ order),
// redrawn until ∂² = 0 (zero after 16 tries).
FilteredComplex gen_complex(const GenConfig& cfg);
FilteredComplex gen_complex(const GenConfig& cfg, std::mt19937_64& rng, GenStats* stats = nullptr);

struct RIsoSample {
    ChainMap f;
    FilteredComplex A, B;
};
// X ⊕ K1 → Σ^{-t}X ⊕ K2 with t ≤ r and K1, K2 r-acyclic, twisted by maps out of
// K1 and into K2, then conjugated by filtered isomorphisms. is_r_isomorphism(f, r).
RIsoSample gen_r_iso(const GenConfig& cfg, const Q& r);
RIsoSample gen_r_iso(const GenConfig& cfg, const Q& r, std::mt19937_64& rng);
// Same construction with source exactly `x` (no K1).
ChainMap gen_r_iso_from(const FilteredComplex& x, const Q& r, const GenConfig& cfg, std::mt19937_64& rng);

FilteredComplex random_basis_change(const FilteredComplex& x, std::mt19937_64& rng, ChainMap* to_x = nullptr);
// Uniform-ish closed degree-0 map of shift ≤ bound.
ChainMap random_closed_map(const FilteredComplex& x, const FilteredComplex& y, std::mt19937_64& rng, const Q& bound);

// Exhaustive bottleneck value: every partial matching per degree.
Ext bottleneck_brute(const Barcode& a, const Barcode& b, ShortRule rule);

struct SuiteFailure {
    std::uint64_t offset = 0;
    std::string claim;
    std::string counterexample;  // complex / map / bundle text blocks
};

struct SuiteReport {
    std::string suite;
    int trials = 0;
    std::vector<SuiteFailure> failures;
};

const std::vector<std::string>& suite_names();
// Trials run in parallel; failures are reported in offset order. Throws
// std::invalid_argument for an unknown suite.
SuiteReport run_suite(const std::string& name, const GenConfig& cfg, int trials);
// One trial, for replay.
std::vector<SuiteFailure> run_trial(const std::string& name, const GenConfig& cfg, std::uint64_t offset);

// `FAIL <suite> <offset> <claim>` lines, each followed by its indented text block.
std::string format_failures(const SuiteReport& r);

}  // namespace fk
