#pragma once

#include "fk/frag.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace fk {

// Malformed text input; the message names file, line and offending token.
class ParseError : public MalformedInput {
public:
    ParseError(const std::string& file, int line, const std::string& token, const std::string& why);
    std::string file;
    int line;
    std::string token;
};

// Complex text format:
//   gen <id> <degree> <filtration>
//   d <src> <tgt> [<tgt>...]
// `#` starts a comment. Generators keep file order.
FilteredComplex parse_complex(std::string_view text, const std::string& file = "<input>");
FilteredComplex read_complex(const std::filesystem::path& path);
std::string format_complex(const FilteredComplex& x);

// Generator ids as written by format_complex (index-based if ids clash or are empty).
std::vector<std::string> writable_ids(const FilteredComplex& x);

// Map text format: header `map <source-file> <target-file> [degree]`, then
// `f <src> <tgt> [<tgt>...]`. Files are resolved relative to the map file.
ChainMap read_map(const std::filesystem::path& path);
// Only the `f` lines, against given complexes (header optional).
ChainMap parse_map_body(std::string_view text, const FilteredComplex& source, const FilteredComplex& target,
                        const std::string& file = "<input>", int first_line = 1, int degree = 0);
std::string format_map_body(const ChainMap& f);

// Family text format: `family`, then `member <complex-file>` lines and the
// flags `closed-shift`, `closed-T`, `with-zero`.
FamilySpec read_family(const std::filesystem::path& path);

// Triangle bundle:
//   bundle
//   A <complex-file>            or   complex A ... end   (inline)
//   B ..., C ...
//   weight <q>
//   map u ... end   (likewise v, w, phi, psi)
// u: A → B, v: B → C, w: C → Σ^{-r}TA, phi: cone(u) → C, psi: Σ^r C → cone(u).
// Cone generator ids are "y.<id>" for B and "x.<id>" for TA.
WitnessedTriangle read_bundle(const std::filesystem::path& path);
WitnessedTriangle parse_bundle(std::string_view text, const std::string& file = "<input>",
                               const std::filesystem::path& base = ".");
std::string format_bundle(const WitnessedTriangle& t);

std::string read_text(const std::filesystem::path& path);

}  // namespace fk
