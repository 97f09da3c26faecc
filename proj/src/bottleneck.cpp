#include "fk/barcode.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace fk {

namespace {

Q abs_diff(const Q& a, const Q& b) { return a < b ? b - a : a - b; }

bool is_short(const Bar& bar, const Q& tau, ShortRule rule) {
    if (bar.infinite()) return false;
    if (rule == ShortRule::strict) return 2 * bar.length() <= tau;
    return bar.length() <= 2 * tau;
}

bool compatible(const Bar& a, const Bar& b, const Q& tau) {
    if (a.infinite() != b.infinite()) return false;
    if (abs_diff(a.lo, b.lo) > tau) return false;
    return a.infinite() || abs_diff(*a.hi, *b.hi) <= tau;
}

// Bars of one degree, with their indices in the full barcode.
struct Side {
    std::vector<Bar> bars;
    std::vector<int> index;
};

std::map<int, std::pair<Side, Side>> split_by_degree(const Barcode& a, const Barcode& b) {
    std::map<int, std::pair<Side, Side>> out;
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
        out[a[i].degree].first.bars.push_back(a[i]);
        out[a[i].degree].first.index.push_back(i);
    }
    for (int i = 0; i < static_cast<int>(b.size()); ++i) {
        out[b[i].degree].second.bars.push_back(b[i]);
        out[b[i].degree].second.index.push_back(i);
    }
    return out;
}

// Vertices: left bars 0..n-1, right bars n..n+m-1, diagonal copies of the
// left bars n+m..2n+m-1, diagonal copies of the right bars 2n+m..2n+2m-1.
bool feasible_one_degree(const Side& l, const Side& r, const Q& tau, ShortRule rule, int degree,
                         std::vector<BottleneckMatch>* matching) {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    const int n = static_cast<int>(l.bars.size());
    const int m = static_cast<int>(r.bars.size());
    const int total = 2 * (n + m);
    if (total == 0) return true;
    Graph g(static_cast<std::size_t>(total));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (compatible(l.bars[i], r.bars[j], tau)) boost::add_edge(i, n + j, g);
    for (int i = 0; i < n; ++i)
        if (is_short(l.bars[i], tau, rule)) boost::add_edge(i, n + m + i, g);
    for (int j = 0; j < m; ++j)
        if (is_short(r.bars[j], tau, rule)) boost::add_edge(2 * n + m + j, n + j, g);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) boost::add_edge(2 * n + m + j, n + m + i, g);

    std::vector<boost::graph_traits<Graph>::vertex_descriptor> mate(static_cast<std::size_t>(total));
    boost::edmonds_maximum_cardinality_matching(g, &mate[0]);
    const auto null = boost::graph_traits<Graph>::null_vertex();
    for (int v = 0; v < total; ++v)
        if (mate[v] == null) return false;
    if (matching) {
        for (int i = 0; i < n; ++i) {
            const int w = static_cast<int>(mate[i]);
            matching->push_back({degree, l.index[i], w < n + m ? r.index[w - n] : -1});
        }
        for (int j = 0; j < m; ++j)
            if (static_cast<int>(mate[n + j]) >= n + m) matching->push_back({degree, -1, r.index[j]});
    }
    return true;
}

std::vector<Q> candidates(const Side& l, const Side& r, ShortRule rule) {
    std::set<Q> c{Q(0)};
    for (const auto& a : l.bars)
        for (const auto& b : r.bars) {
            if (a.infinite() != b.infinite()) continue;
            c.insert(abs_diff(a.lo, b.lo));
            if (!a.infinite()) c.insert(abs_diff(*a.hi, *b.hi));
        }
    for (const auto* side : {&l, &r})
        for (const auto& a : side->bars)
            if (!a.infinite()) c.insert(rule == ShortRule::strict ? 2 * a.length() : a.length() / 2);
    return {c.begin(), c.end()};
}

}  // namespace

bool bottleneck_feasible(const Barcode& a, const Barcode& b, const Q& tau, ShortRule rule,
                         std::vector<BottleneckMatch>* matching) {
    for (const auto& [deg, sides] : split_by_degree(a, b))
        if (!feasible_one_degree(sides.first, sides.second, tau, rule, deg, matching)) return false;
    return true;
}

BottleneckResult bottleneck(const Barcode& a, const Barcode& b, ShortRule rule) {
    BottleneckResult res;
    Q worst(0);
    for (const auto& [deg, sides] : split_by_degree(a, b)) {
        auto count_inf = [](const Side& s) {
            return std::count_if(s.bars.begin(), s.bars.end(), [](const Bar& x) { return x.infinite(); });
        };
        if (count_inf(sides.first) != count_inf(sides.second)) {
            res.value = Ext::pos_inf();
            res.matching.clear();
            return res;
        }
        std::vector<Q> cand = candidates(sides.first, sides.second, rule);
        // feasibility is monotone in τ; the largest candidate always works
        std::size_t lo = 0, hi = cand.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (feasible_one_degree(sides.first, sides.second, cand[mid], rule, deg, nullptr))
                hi = mid;
            else
                lo = mid + 1;
        }
        worst = std::max(worst, cand[lo]);
    }
    res.value = Ext(worst);
    bottleneck_feasible(a, b, worst, rule, &res.matching);
    return res;
}

}  // namespace fk
