#include "fk/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fk {

ParseError::ParseError(const std::string& file_, int line_, const std::string& token_, const std::string& why)
    : MalformedInput(file_ + ":" + std::to_string(line_) + ": " + why + (token_.empty() ? "" : " at '" + token_ + "'")),
      file(file_),
      line(line_),
      token(token_) {}

namespace {

struct Line {
    int number;
    std::vector<std::string> tok;
};

std::vector<Line> tokenize(std::string_view text, int first_line = 1) {
    std::vector<Line> out;
    std::istringstream in{std::string(text)};
    std::string raw;
    int n = first_line - 1;
    while (std::getline(in, raw)) {
        ++n;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        std::istringstream ls(raw);
        Line l{n, {}};
        for (std::string t; ls >> t;) l.tok.push_back(t);
        if (!l.tok.empty()) out.push_back(std::move(l));
    }
    return out;
}

Q rational_token(const std::string& file, const Line& l, std::size_t i) {
    try {
        return parse_rational(l.tok[i]);
    } catch (const std::exception& e) {
        throw ParseError(file, l.number, l.tok[i], "expected a rational");
    }
}

int int_token(const std::string& file, const Line& l, std::size_t i) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(l.tok[i], &used);
        if (used != l.tok[i].size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(file, l.number, l.tok[i], "expected an integer");
    }
}

FilteredComplex complex_from_lines(const std::vector<Line>& lines, const std::string& file) {
    FilteredComplex x;
    std::map<std::string, int> index;
    for (const auto& l : lines) {
        if (l.tok[0] != "gen") continue;
        if (l.tok.size() != 4) throw ParseError(file, l.number, l.tok.back(), "gen needs <id> <degree> <filtration>");
        if (index.count(l.tok[1])) throw ParseError(file, l.number, l.tok[1], "duplicate generator id");
        index[l.tok[1]] = x.size();
        x.add_generator(l.tok[1], int_token(file, l, 2), rational_token(file, l, 3));
    }
    std::set<int> seen;
    for (const auto& l : lines) {
        if (l.tok[0] == "gen") continue;
        if (l.tok[0] != "d") throw ParseError(file, l.number, l.tok[0], "unknown keyword");
        if (l.tok.size() < 2) throw ParseError(file, l.number, l.tok[0], "d needs a source");
        auto src = index.find(l.tok[1]);
        if (src == index.end()) throw ParseError(file, l.number, l.tok[1], "unknown generator");
        if (!seen.insert(src->second).second) throw ParseError(file, l.number, l.tok[1], "second d line for generator");
        std::vector<int> bd;
        for (std::size_t i = 2; i < l.tok.size(); ++i) {
            auto t = index.find(l.tok[i]);
            if (t == index.end()) throw ParseError(file, l.number, l.tok[i], "unknown generator");
            bd.push_back(t->second);
        }
        x.d[src->second] = normalize(std::move(bd));
    }
    for (const auto& v : validate(x)) {
        // point at the first generator line involved
        int line = lines.empty() ? 0 : lines.front().number;
        std::string tok = v.ids.empty() ? "" : v.ids.front();
        for (const auto& l : lines)
            if (l.tok.size() > 1 && l.tok[1] == tok) {
                line = l.number;
                break;
            }
        throw ParseError(file, line, tok, v.kind + ": " + v.message);
    }
    return x;
}

ChainMap map_from_lines(const std::vector<Line>& lines, const FilteredComplex& s, const FilteredComplex& t,
                        const std::string& file, int degree) {
    ChainMap f = zero_map(s, t, degree);
    std::map<std::string, int> si, ti;
    const auto sid = writable_ids(s), tid = writable_ids(t);
    for (int i = 0; i < s.size(); ++i) si[sid[i]] = i;
    for (int i = 0; i < t.size(); ++i) ti[tid[i]] = i;
    std::set<int> seen;
    for (const auto& l : lines) {
        if (l.tok[0] != "f") throw ParseError(file, l.number, l.tok[0], "unknown keyword");
        if (l.tok.size() < 2) throw ParseError(file, l.number, l.tok[0], "f needs a source");
        auto src = si.find(l.tok[1]);
        if (src == si.end()) throw ParseError(file, l.number, l.tok[1], "unknown source generator");
        if (!seen.insert(src->second).second) throw ParseError(file, l.number, l.tok[1], "second f line for generator");
        std::vector<int> img;
        for (std::size_t i = 2; i < l.tok.size(); ++i) {
            auto it = ti.find(l.tok[i]);
            if (it == ti.end()) throw ParseError(file, l.number, l.tok[i], "unknown target generator");
            if (t.gens[it->second].degree != s.gens[src->second].degree + degree)
                throw ParseError(file, l.number, l.tok[i], "degree mismatch");
            img.push_back(it->second);
        }
        f.cols[src->second] = normalize(std::move(img));
    }
    return f;
}

FilteredComplex renamed(const FilteredComplex& x) {
    FilteredComplex y = x;
    const auto ids = writable_ids(x);
    for (int i = 0; i < y.size(); ++i) y.gens[i].id = ids[i];
    return y;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "", "cannot open file");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

FilteredComplex parse_complex(std::string_view text, const std::string& file) {
    return complex_from_lines(tokenize(text), file);
}

FilteredComplex read_complex(const std::filesystem::path& path) { return parse_complex(read_text(path), path.string()); }

std::vector<std::string> writable_ids(const FilteredComplex& x) {
    std::vector<std::string> ids;
    std::set<std::string> seen;
    bool ok = true;
    for (const auto& g : x.gens) {
        ok = ok && !g.id.empty() && g.id.find_first_of(" \t\n#") == std::string::npos && seen.insert(g.id).second;
        ids.push_back(g.id);
    }
    if (!ok)
        for (int i = 0; i < x.size(); ++i) ids[i] = "g" + std::to_string(i);
    return ids;
}

std::string format_complex(const FilteredComplex& x) {
    const auto ids = writable_ids(x);
    std::ostringstream out;
    for (int i = 0; i < x.size(); ++i)
        out << "gen " << ids[i] << ' ' << x.gens[i].degree << ' ' << format_rational(x.gens[i].ell) << '\n';
    for (int i = 0; i < x.size(); ++i) {
        if (x.d[i].empty()) continue;
        out << "d " << ids[i];
        for (int j : x.d[i]) out << ' ' << ids[j];
        out << '\n';
    }
    return out.str();
}

ChainMap parse_map_body(std::string_view text, const FilteredComplex& source, const FilteredComplex& target,
                        const std::string& file, int first_line, int degree) {
    auto lines = tokenize(text, first_line);
    if (!lines.empty() && lines.front().tok[0] == "map") lines.erase(lines.begin());
    return map_from_lines(lines, source, target, file, degree);
}

std::string format_map_body(const ChainMap& f) {
    const auto sid = writable_ids(f.source), tid = writable_ids(f.target);
    std::ostringstream out;
    for (int i = 0; i < f.source.size(); ++i) {
        if (f.cols[i].empty()) continue;
        out << "f " << sid[i];
        for (int j : f.cols[i]) out << ' ' << tid[j];
        out << '\n';
    }
    return out.str();
}

ChainMap read_map(const std::filesystem::path& path) {
    const std::string file = path.string();
    auto lines = tokenize(read_text(path));
    if (lines.empty() || lines.front().tok[0] != "map")
        throw ParseError(file, lines.empty() ? 1 : lines.front().number, lines.empty() ? "" : lines.front().tok[0],
                         "expected header 'map <source-file> <target-file> [degree]'");
    const Line head = lines.front();
    if (head.tok.size() < 3 || head.tok.size() > 4)
        throw ParseError(file, head.number, head.tok.back(), "expected header 'map <source-file> <target-file> [degree]'");
    const int degree = head.tok.size() == 4 ? int_token(file, head, 3) : 0;
    const auto dir = path.parent_path();
    const FilteredComplex s = read_complex(dir / head.tok[1]);
    const FilteredComplex t = read_complex(dir / head.tok[2]);
    lines.erase(lines.begin());
    return map_from_lines(lines, s, t, file, degree);
}

FamilySpec read_family(const std::filesystem::path& path) {
    const std::string file = path.string();
    auto lines = tokenize(read_text(path));
    if (lines.empty() || lines.front().tok[0] != "family")
        throw ParseError(file, lines.empty() ? 1 : lines.front().number, lines.empty() ? "" : lines.front().tok[0],
                         "expected header 'family'");
    FamilySpec f;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const Line& l = lines[k];
        const std::string& w = l.tok[0];
        if (w == "member") {
            if (l.tok.size() != 2) throw ParseError(file, l.number, w, "member needs one complex file");
            f.members.push_back(read_complex(path.parent_path() / l.tok[1]));
            continue;
        }
        if (l.tok.size() != 1) throw ParseError(file, l.number, l.tok[1], "flags take no arguments");
        if (w == "closed-shift")
            f.closed_shift = true;
        else if (w == "closed-T")
            f.closed_T = true;
        else if (w == "with-zero")
            f.with_zero = true;
        else
            throw ParseError(file, l.number, w, "unknown keyword");
    }
    return f;
}

WitnessedTriangle parse_bundle(std::string_view text, const std::string& file, const std::filesystem::path& base) {
    auto lines = tokenize(text);
    if (lines.empty() || lines.front().tok[0] != "bundle")
        throw ParseError(file, lines.empty() ? 1 : lines.front().number, lines.empty() ? "" : lines.front().tok[0],
                         "expected header 'bundle'");
    std::map<std::string, FilteredComplex> cx;
    std::map<std::string, std::vector<Line>> maps;
    std::map<std::string, int> map_line;
    std::optional<Q> weight;
    const std::set<std::string> objects{"A", "B", "C"}, arrows{"u", "v", "w", "phi", "psi"};
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const Line& l = lines[k];
        const std::string& w = l.tok[0];
        auto block = [&](const std::string& name) {
            std::vector<Line> body;
            for (++k; k < lines.size() && lines[k].tok[0] != "end"; ++k) body.push_back(lines[k]);
            if (k == lines.size()) throw ParseError(file, l.number, name, "block is not closed by 'end'");
            return body;
        };
        if (objects.count(w)) {
            if (l.tok.size() != 2) throw ParseError(file, l.number, w, "expected '<object> <complex-file>'");
            if (cx.count(w)) throw ParseError(file, l.number, w, "object given twice");
            cx[w] = read_complex(base / l.tok[1]);
        } else if (w == "complex") {
            if (l.tok.size() != 2 || !objects.count(l.tok[1]))
                throw ParseError(file, l.number, l.tok.back(), "expected 'complex A|B|C'");
            const std::string name = l.tok[1];
            if (cx.count(name)) throw ParseError(file, l.number, name, "object given twice");
            cx[name] = complex_from_lines(block(name), file);
        } else if (w == "weight") {
            if (l.tok.size() != 2) throw ParseError(file, l.number, w, "weight needs one rational");
            weight = rational_token(file, l, 1);
            if (*weight < Q(0)) throw ParseError(file, l.number, l.tok[1], "weight must be nonnegative");
        } else if (w == "map") {
            if (l.tok.size() != 2 || !arrows.count(l.tok[1]))
                throw ParseError(file, l.number, l.tok.back(), "expected 'map u|v|w|phi|psi'");
            const std::string name = l.tok[1];
            if (maps.count(name)) throw ParseError(file, l.number, name, "map given twice");
            map_line[name] = l.number;
            maps[name] = block(name);
        } else {
            throw ParseError(file, l.number, w, "unknown keyword");
        }
    }
    for (const auto& o : objects)
        if (!cx.count(o)) throw ParseError(file, lines.back().number, o, "missing object");
    if (!weight) throw ParseError(file, lines.back().number, "weight", "missing weight");
    for (const auto& a : arrows)
        if (!maps.count(a)) maps[a] = {};

    WitnessedTriangle t;
    Triangle& tri = t.tri;
    tri.A = cx["A"];
    tri.B = cx["B"];
    tri.C = cx["C"];
    tri.weight = *weight;
    tri.u = map_from_lines(maps["u"], tri.A, tri.B, file, 0);
    tri.v = map_from_lines(maps["v"], tri.B, tri.C, file, 0);
    tri.w = map_from_lines(maps["w"], tri.C, shift_complex(translate(tri.A), -tri.weight), file, 0);
    const FilteredComplex kc = cone(tri.u).complex;
    t.wit.Cprime = kc;
    t.wit.phi = map_from_lines(maps["phi"], kc, tri.C, file, 0);
    t.wit.psi = map_from_lines(maps["psi"], shift_complex(tri.C, tri.weight), kc, file, 0);
    return t;
}

WitnessedTriangle read_bundle(const std::filesystem::path& path) {
    return parse_bundle(read_text(path), path.string(), path.parent_path());
}

std::string format_bundle(const WitnessedTriangle& t0) {
    // write with clash-free ids so the cone ids re-derive on parse
    const FilteredComplex a = renamed(t0.tri.A), b = renamed(t0.tri.B), c = renamed(t0.tri.C);
    const Q& r = t0.tri.weight;
    const FilteredComplex kc = cone(reinterpret(t0.tri.u, a, b)).complex;
    std::ostringstream out;
    out << "bundle\n";
    for (const auto& [name, x] : {std::pair{"A", &a}, std::pair{"B", &b}, std::pair{"C", &c}})
        out << "complex " << name << '\n' << format_complex(*x) << "end\n";
    out << "weight " << format_rational(r) << '\n';
    auto block = [&](const char* name, const ChainMap& f) { out << "map " << name << '\n' << format_map_body(f) << "end\n"; };
    block("u", reinterpret(t0.tri.u, a, b));
    block("v", reinterpret(t0.tri.v, b, c));
    block("w", reinterpret(t0.tri.w, c, shift_complex(translate(a), -r)));
    block("phi", reinterpret(t0.wit.phi, kc, c));
    block("psi", reinterpret(t0.wit.psi, shift_complex(c, r), kc));
    return out.str();
}

}  // namespace fk
