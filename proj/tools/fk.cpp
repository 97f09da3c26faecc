// fk: command-line front end for the filtered-complex library.
#include "fk/io.hpp"
#include "fk/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

using namespace fk;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Globals {
    bool json = false;
    std::uint64_t seed = 1;
    int trials = 100;
    bool standard = false;
    ShortRule rule() const { return standard ? ShortRule::standard : ShortRule::strict; }
};

// Exit codes
constexpr int ok = 0, verify_failed = 1, malformed = 2;

Q rational_arg(const std::string& s, const std::string& flag) {
    try {
        return parse_rational(s);
    } catch (const std::exception&) {
        throw ParseError("<argv>", 0, s, "bad rational for " + flag);
    }
}

json bar_json(const Bar& b) {
    return {{"degree", b.degree}, {"lo", format_rational(b.lo)}, {"hi", b.hi ? json(format_rational(*b.hi)) : json(nullptr)}};
}

json barcode_json(const Barcode& b) {
    json out = json::array();
    for (const auto& bar : sorted(b)) out.push_back(bar_json(bar));
    return out;
}

json matching_json(const std::vector<BottleneckMatch>& m, const Barcode& a, const Barcode& b) {
    json out = json::array();
    for (const auto& p : m)
        out.push_back({{"degree", p.degree},
                       {"left", p.left < 0 ? json(nullptr) : bar_json(a[p.left])},
                       {"right", p.right < 0 ? json(nullptr) : bar_json(b[p.right])}});
    return out;
}

std::string matching_text(const std::vector<BottleneckMatch>& m, const Barcode& a, const Barcode& b) {
    std::ostringstream out;
    auto side = [](int i, const Barcode& bc) { return i < 0 ? std::string("short") : format_bar(bc[i]).substr(4); };
    for (const auto& p : m) out << "match " << side(p.left, a) << " | " << side(p.right, b) << '\n';
    return out.str();
}

json check_json(const TriangleCheck& c) { return {{"ok", c.ok}, {"failed", c.failed}}; }

void emit(const Globals& g, const json& j, const std::string& text) {
    if (g.json)
        std::cout << j.dump(2) << '\n';
    else
        std::cout << text;
}

std::string decomposition_text(const ConeDecomposition& d) {
    std::ostringstream out;
    for (std::size_t i = 0; i < d.steps.size(); ++i) {
        const auto& s = d.steps[i].tri;
        out << "step " << i + 1 << " weight " << format_rational(s.weight) << '\n' << format_barcode(barcode_of(s.A));
    }
    return out.str();
}

json decomposition_json(const ConeDecomposition& d) {
    json steps = json::array();
    for (const auto& s : d.steps)
        steps.push_back({{"weight", format_rational(s.tri.weight)}, {"entry", barcode_json(barcode_of(s.tri.A))},
                         {"apex", barcode_json(barcode_of(s.tri.C))}});
    return {{"weight", format_rational(d.weight())}, {"steps", steps}};
}

int cmd_barcode(const Globals& g, const std::string& file) {
    const Barcode b = barcode_of(read_complex(file));
    emit(g, {{"bars", barcode_json(b)}}, format_barcode(b));
    return ok;
}

int cmd_depth(const Globals& g, const std::string& file) {
    const Barcode b = barcode_of(read_complex(file));
    const std::string d = format_rational(boundary_depth(b));
    emit(g, {{"depth", d}, {"infinite_bars", has_infinite_bars(b)}}, d + "\n");
    return ok;
}

int cmd_acyclic(const Globals& g, const std::string& file, const std::string& r_text) {
    const Q r = rational_arg(r_text, "--r");
    const FilteredComplex x = read_complex(file);
    const bool a = is_r_acyclic(x, r);
    emit(g, {{"r", format_rational(r)}, {"acyclic", a}}, std::string(a ? "true" : "false") + "\n");
    return a ? ok : verify_failed;
}

int cmd_bottleneck(const Globals& g, const std::string& fa, const std::string& fb) {
    const Barcode a = sorted(barcode_of(read_complex(fa))), b = sorted(barcode_of(read_complex(fb)));
    const BottleneckResult r = bottleneck(a, b, g.rule());
    const std::string rule = g.standard ? "standard" : "strict";
    emit(g, {{"value", r.value.str()}, {"rule", rule}, {"matching", matching_json(r.matching, a, b)}},
         r.value.str() + "\n");
    return ok;
}

int cmd_cone(const Globals& g, const std::string& file, const std::string& lambda) {
    const ChainMap f = read_map(file);
    const Q l = lambda.empty() ? Q(0) : rational_arg(lambda, "--lambda");
    if (!is_closed(f)) throw MalformedInput(file + ": map is not a chain map");
    const Cone c = cone(f, l);
    const Barcode b = barcode_of(c.complex);
    emit(g, {{"lambda", format_rational(l)}, {"complex", format_complex(c.complex)}, {"bars", barcode_json(b)}},
         format_complex(c.complex));
    return ok;
}

int cmd_riso(const Globals& g, const std::string& file, const std::string& r_text) {
    const Q r = rational_arg(r_text, "--r");
    const ChainMap f = read_map(file);
    const bool yes = is_r_isomorphism(f, r);
    json j{{"r", format_rational(r)}, {"r_isomorphism", yes}};
    std::string text = std::string(yes ? "true" : "false") + "\n";
    if (yes) {
        const RInverses inv = r_inverses(f, r);
        j["left_inverse"] = format_map_body(inv.left);
        j["right_inverse"] = format_map_body(inv.right);
        text += "left inverse\n" + format_map_body(inv.left) + "right inverse\n" + format_map_body(inv.right);
    }
    emit(g, j, text);
    return yes ? ok : verify_failed;
}

int cmd_sigma(const Globals& g, const std::string& file) {
    const ChainMap f = read_map(file);
    if (!is_closed(f)) throw MalformedInput(file + ": map is not a chain map");
    ChainMap rep;
    const Ext s = spectral_invariant(f, &rep);
    emit(g, {{"sigma", s.str()}, {"representative", format_map_body(rep)}}, s.str() + "\n");
    return ok;
}

int cmd_verify_triangle(const Globals& g, const std::string& file) {
    const WitnessedTriangle t = read_bundle(file);
    const TriangleCheck c = verify_triangle(t);
    std::string text = c.ok ? "ok\n" : "";
    for (const auto& f : c.failed) text += "failed " + f + "\n";
    json j = check_json(c);
    j["weight"] = format_rational(t.tri.weight);
    emit(g, j, text);
    return c.ok ? ok : verify_failed;
}

int cmd_rotate(const Globals& g, const std::string& file) {
    const WitnessedTriangle t = read_bundle(file);
    const TriangleCheck in = verify_triangle(t);
    if (!in.ok) {
        emit(g, {{"input", check_json(in)}}, "input does not verify: " + in.failed.front() + "\n");
        return verify_failed;
    }
    const WitnessedTriangle r = rotate(t);
    const TriangleCheck c = verify_triangle(r);
    emit(g, {{"weight", format_rational(r.tri.weight)}, {"check", check_json(c)}, {"bundle", format_bundle(r)}},
         format_bundle(r));
    return c.ok ? ok : verify_failed;
}

int cmd_octahedron(const Globals& g, const std::string& f1, const std::string& f2) {
    const WitnessedTriangle d1 = read_bundle(f1), d2 = read_bundle(f2);
    if (!same_structure(d1.tri.C, d2.tri.A) || d1.tri.C.size() != d2.tri.A.size())
        throw MalformedInput(f2 + ": first object does not match the third object of " + f1);
    const Octahedron o = octahedron(d1, d2);
    const TriangleCheck c3 = verify_triangle(o.d3), c4 = verify_triangle(o.d4);
    bool all = c3.ok && c4.ok;
    json squares = json::array();
    std::string text = "# d3 weight " + format_rational(o.d3.tri.weight) + "\n" + format_bundle(o.d3) + "# d4 weight " +
                       format_rational(o.d4.tri.weight) + "\n" + format_bundle(o.d4);
    for (const auto& sq : o.squares) {
        all = all && sq.holds;
        squares.push_back({{"name", sq.name}, {"holds", sq.holds}});
        text += "# square " + sq.name + (sq.holds ? " holds\n" : " fails\n");
    }
    emit(g,
         {{"d3", {{"weight", format_rational(o.d3.tri.weight)}, {"check", check_json(c3)}, {"bundle", format_bundle(o.d3)}}},
          {"d4", {{"weight", format_rational(o.d4.tri.weight)}, {"check", check_json(c4)}, {"bundle", format_bundle(o.d4)}}},
          {"squares", squares}},
         text);
    return all ? ok : verify_failed;
}

int cmd_frag(const Globals& g, const std::string& fa, const std::string& fb, const std::string& spec, bool exact,
             int depth, const std::string& budget) {
    const FilteredComplex a = read_complex(fa), b = read_complex(fb);
    const FamilySpec f = read_family(spec);
    const DeltaBound ab = delta_upper(a, b, f, g.rule()), ba = delta_upper(b, a, f, g.rule());
    const Ext d = max(ab.value, ba.value);
    json j{{"delta_ab", {{"value", ab.value.str()}, {"strategy", ab.strategy}}},
           {"delta_ba", {{"value", ba.value.str()}, {"strategy", ba.strategy}}},
           {"d", d.str()}};
    if (ab.witness) j["delta_ab"]["witness"] = decomposition_json(*ab.witness);
    if (ba.witness) j["delta_ba"]["witness"] = decomposition_json(*ba.witness);
    std::ostringstream text;
    text << "delta(A,B) <= " << ab.value.str() << " via " << ab.strategy << '\n';
    text << "delta(B,A) <= " << ba.value.str() << " via " << ba.strategy << '\n';
    text << "d <= " << d.str() << '\n';
    if (ab.witness) text << "# witness for delta(A,B)\n" << decomposition_text(*ab.witness);
    if (ba.witness) text << "# witness for delta(B,A)\n" << decomposition_text(*ba.witness);
    if (exact) {
        const Q w = budget.empty() ? Q(16) : rational_arg(budget, "--budget");
        const OracleResult oab = delta_exact_small(a, b, f, depth, w), oba = delta_exact_small(b, a, f, depth, w);
        auto one = [](const OracleResult& o) {
            return json{{"completed", o.completed}, {"value", o.value.str()}, {"explored", o.explored}};
        };
        j["exact"] = {{"depth", depth}, {"budget", format_rational(w)}, {"delta_ab", one(oab)}, {"delta_ba", one(oba)}};
        auto line = [](const OracleResult& o) {
            return o.completed ? (o.value.is_pos_inf() ? std::string("none within budget") : o.value.str())
                               : std::string("budget exceeded");
        };
        text << "exact delta(A,B) = " << line(oab) << '\n' << "exact delta(B,A) = " << line(oba) << '\n';
    }
    emit(g, j, text.str());
    return ok;
}

int cmd_prop51(const Globals& g, const std::string& fa, const std::string& fb) {
    const FilteredComplex x = read_complex(fa), y = read_complex(fb);
    FamilySpec f;
    f.with_zero = true;
    const Prop51Result p = prop51_pipeline(x, y, f, g.rule());
    bool valid = true;
    if (p.forward) valid = valid && validate_decomposition(*p.forward, x, f, y).ok;
    if (p.backward) valid = valid && validate_decomposition(*p.backward, y, f, x).ok;
    const Barcode bx = canonical_form(x).barcode, by = canonical_form(y).barcode;
    json j{{"tau", p.tau.str()},
           {"constant", format_rational(p.constant)},
           {"bound", p.bound.str()},
           {"pair_bound", p.pair_bound.str()},
           {"within_constant", p.within_constant},
           {"witnesses_valid", valid},
           {"matching", matching_json(p.matching, bx, by)}};
    if (p.forward) j["forward"] = decomposition_json(*p.forward);
    if (p.backward) j["backward"] = decomposition_json(*p.backward);
    std::ostringstream text;
    text << "tau " << p.tau.str() << "\nconstant " << format_rational(p.constant) << "\nbound " << p.bound.str()
         << "\npair_bound " << p.pair_bound.str() << "\nwithin_constant " << (p.within_constant ? "true" : "false")
         << "\nwitnesses_valid " << (valid ? "true" : "false") << '\n'
         << matching_text(p.matching, bx, by);
    emit(g, j, text.str());
    return p.within_constant && valid ? ok : verify_failed;
}

// FK_CACHE_DIR: reports of finished suite runs are stored and replayed from here.
std::optional<fs::path> cache_file(const std::string& suite, const Globals& g) {
    const char* dir = std::getenv("FK_CACHE_DIR");
    if (!dir || !*dir) return std::nullopt;
    return fs::path(dir) / (suite + "-" + std::to_string(g.seed) + "-" + std::to_string(g.trials) + ".report");
}

int cmd_check(const Globals& g, const std::string& which) {
    std::vector<std::string> suites;
    if (which == "all")
        suites = suite_names();
    else
        suites = {which};
    for (const auto& s : suites)
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
            throw ParseError("<argv>", 0, s, "unknown suite");
    GenConfig cfg;
    cfg.seed = g.seed;
    json reports = json::array();
    std::string text;
    bool all = true;
    for (const auto& s : suites) {
        std::string body;
        int failures = 0;
        const auto cache = cache_file(s, g);
        if (cache && fs::exists(*cache)) {
            body = read_text(*cache);
            std::istringstream lines(body);
            for (std::string l; std::getline(lines, l);)
                if (l.rfind("FAIL ", 0) == 0) ++failures;
        } else {
            const SuiteReport r = run_suite(s, cfg, g.trials);
            body = format_failures(r);
            failures = static_cast<int>(r.failures.size());
            if (cache) {
                fs::create_directories(cache->parent_path());
                std::ofstream(*cache) << body;
            }
        }
        all = all && failures == 0;
        reports.push_back({{"suite", s}, {"trials", g.trials}, {"failures", failures}, {"report", body}});
        text += body;
        text += (failures ? "fail " : "ok ") + s + " " + std::to_string(g.trials) + " trials, " +
                std::to_string(failures) + " failures\n";
    }
    emit(g, {{"seed", g.seed}, {"suites", reports}}, text);
    return all ? ok : verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Filtered complexes, weighted triangles and fragmentation bounds"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_flag("--json", g.json, "Structured output");
    app.add_option("--seed", g.seed, "Seed for check");
    app.add_option("--trials", g.trials, "Trials per suite for check")->check(CLI::NonNegativeNumber);
    app.add_flag("--standard-bottleneck", g.standard, "Short bars by len <= 2 tau instead of 2 len <= tau");

    std::string f1, f2, f3, r_text, lambda, budget, suite = "all";
    bool exact = false;
    int depth = 3;
    std::function<int()> run;

    auto* c = app.add_subcommand("barcode", "Barcode of a complex");
    c->add_option("FILE", f1)->required();
    c->callback([&] { run = [&] { return cmd_barcode(g, f1); }; });

    c = app.add_subcommand("depth", "Boundary depth");
    c->add_option("FILE", f1)->required();
    c->callback([&] { run = [&] { return cmd_depth(g, f1); }; });

    c = app.add_subcommand("acyclic", "Is the complex r-acyclic (exit 1 if not)");
    c->add_option("FILE", f1)->required();
    c->add_option("--r", r_text)->required();
    c->callback([&] { run = [&] { return cmd_acyclic(g, f1, r_text); }; });

    c = app.add_subcommand("bottleneck", "Bottleneck distance of two barcodes");
    c->add_option("A", f1)->required();
    c->add_option("B", f2)->required();
    c->callback([&] { run = [&] { return cmd_bottleneck(g, f1, f2); }; });

    c = app.add_subcommand("cone", "Filtered mapping cone");
    c->add_option("MAPFILE", f1)->required();
    c->add_option("--lambda", lambda);
    c->callback([&] { run = [&] { return cmd_cone(g, f1, lambda); }; });

    c = app.add_subcommand("riso", "Is the map an r-isomorphism (exit 1 if not)");
    c->add_option("MAPFILE", f1)->required();
    c->add_option("--r", r_text)->required();
    c->callback([&] { run = [&] { return cmd_riso(g, f1, r_text); }; });

    c = app.add_subcommand("sigma", "Spectral invariant of a map");
    c->add_option("MAPFILE", f1)->required();
    c->callback([&] { run = [&] { return cmd_sigma(g, f1); }; });

    c = app.add_subcommand("verify-triangle", "Verify a witnessed triangle bundle");
    c->add_option("BUNDLE", f1)->required();
    c->callback([&] { run = [&] { return cmd_verify_triangle(g, f1); }; });

    c = app.add_subcommand("rotate", "Rotate a witnessed triangle");
    c->add_option("BUNDLE", f1)->required();
    c->callback([&] { run = [&] { return cmd_rotate(g, f1); }; });

    c = app.add_subcommand("octahedron", "Weighted octahedron of two composable triangles");
    c->add_option("B1", f1)->required();
    c->add_option("B2", f2)->required();
    c->callback([&] { run = [&] { return cmd_octahedron(g, f1, f2); }; });

    c = app.add_subcommand("frag", "Fragmentation bounds between two complexes");
    c->add_option("A", f1)->required();
    c->add_option("B", f2)->required();
    c->add_option("--family", f3)->required();
    c->add_flag("--exact", exact, "Also run the exhaustive search (tiny inputs)");
    c->add_option("--depth", depth)->check(CLI::Range(1, 4));
    c->add_option("--budget", budget);
    c->callback([&] { run = [&] { return cmd_frag(g, f1, f2, f3, exact, depth, budget); }; });

    c = app.add_subcommand("prop51", "Bottleneck comparison with validated witnesses");
    c->add_option("A", f1)->required();
    c->add_option("B", f2)->required();
    c->callback([&] { run = [&] { return cmd_prop51(g, f1, f2); }; });

    c = app.add_subcommand("check", "Run verification suites");
    c->add_option("--suite", suite, "Suite name or all");
    c->callback([&] { run = [&] { return cmd_check(g, suite); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return malformed;
    }
    try {
        return run();
    } catch (const MalformedInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return malformed;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return malformed;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return malformed;
    }
}
