#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "treepde/errors.hpp"
#include "treepde/sde.hpp"
#include "treepde/trees.hpp"

using namespace treepde;

namespace {

// All ordered m-ary trees with n internal nodes, written as preorder strings
// ('i' internal, 'l' leaf). Independent of the closed forms under test.
std::vector<std::string> enumerate_trees(int n, int m) {
    if (n == 0) return {"l"};
    std::vector<std::string> out;
    // Distribute n-1 internal nodes over m ordered subtrees.
    std::function<void(int, int, std::string)> rec = [&](int child, int left, std::string acc) {
        if (child == m) {
            if (left == 0) out.push_back("i" + acc);
            return;
        }
        for (int c = 0; c <= left; ++c)
            for (const auto& s : enumerate_trees(c, m)) rec(child + 1, left - c, acc + s);
    };
    rec(0, n - 1, "");
    return out;
}

std::uint64_t catalan_recurrence(int n) {
    std::vector<std::uint64_t> c(static_cast<std::size_t>(n) + 1, 0);
    c[0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j < i; ++j) c[i] += c[j] * c[i - 1 - j];
    return c[n];
}

Problem single(int power) {
    Problem p = builtin_problem("ex1");
    p.terms = {{power, Coefficient::constant(-1.0)}};
    return p;
}

std::string shape(const RandomTree& t, int node = 0) {
    const auto& nd = t.nodes[node];
    if (nd.is_leaf()) return "l";
    std::string s = "i";
    for (int c = 0; c < nd.alpha; ++c) s += shape(t, nd.first_child + c);
    return s;
}

SampleOptions topo_only() {
    SampleOptions o;
    o.simulate_paths = false;
    return o;
}

}  // namespace

TEST_CASE("diagram counts match enumeration") {
    const std::uint64_t expect[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786};
    for (int k = 1; k <= 12; ++k) {
        CHECK(count_diagrams_binary(k) == expect[k - 1]);
        CHECK(count_diagrams_binary(k) == catalan_recurrence(k - 1));
    }
    for (int m = 2; m <= 4; ++m)
        for (int ne = 0; ne <= 6; ++ne) {
            auto trees = enumerate_trees(ne, m);
            std::set<std::string> uniq(trees.begin(), trees.end());
            CHECK(uniq.size() == trees.size());
            CHECK(count_diagrams(ne, m) == trees.size());
        }
    CHECK(count_diagrams(0, 3) == 1);
    CHECK(count_diagrams(2, 3) == 3);
    for (int k = 1; k <= 10; ++k) CHECK(count_diagrams(k - 1, 2) == count_diagrams_binary(k));
    CHECK(std::exp(log_count_diagrams(6, 4)) == doctest::Approx(double(count_diagrams(6, 4))));
}

TEST_CASE("tree probability law") {
    CHECK(tree_probability(0, 2, 0.7) == doctest::Approx(0.7));
    CHECK(tree_probability(2, 2, 2.0 / 3.0) == doctest::Approx(16.0 / 243.0).epsilon(1e-13));
    double s = 0.0;
    for (int ne = 0; ne <= 200; ++ne) s += tree_probability(ne, 2, 2.0 / 3.0);
    CHECK(std::fabs(s - 1.0) < 1e-6);
    CHECK_THROWS(tree_probability(1, 2, 0.4));
}

TEST_CASE("mean branches and cost bound") {
    CHECK(mean_branches(2, 1.0) == doctest::Approx(1.0));
    CHECK(mean_branches(2, 2.0 / 3.0) == doctest::Approx(2.0));
    CHECK(mean_branches(2, 0.75) == doctest::Approx(1.5));
    CHECK_THROWS_AS(mean_branches(2, 0.5), SingularityError);

    const double N = 1000, t = 1.0, dt = 1e-3, tc = 1e-6;
    CHECK(estimate_tb(N, t, dt, tc, 2, 1.0) == doctest::Approx(N * tc * t / expected_step(dt, t)));
    // Linear in t at fixed dt/t.
    double b1 = estimate_tb(N, 1.0, 1e-3, tc, 2, 0.75);
    double b2 = estimate_tb(N, 2.0, 2e-3, tc, 2, 0.75);
    double b4 = estimate_tb(N, 4.0, 4e-3, tc, 2, 0.75);
    CHECK(b4 - b2 == doctest::Approx(2 * (b2 - b1)));
    CHECK(estimate_tb(N, t, dt, tc, 2, 0.5 + 1e-9) > 1e6 * estimate_tb(N, t, dt, tc, 2, 0.75));
}

TEST_CASE("labels and ancestry") {
    CHECK(ancestor_match("010", "01") == 1);
    CHECK(ancestor_match("010", "00") == 0);
    CHECK(ancestor_match("01", "01") == 1);
    CHECK(ancestor_match("0", "01") == 0);
}

TEST_CASE("node horizon of hand-built chains") {
    RandomTree t;
    t.t = 1.0;
    t.nodes.resize(5);
    t.nodes[0] = {-1, 0, 1, 2, 0, 1.0, 0.5};
    t.nodes[1] = {0, 0, 3, 2, 0, 0.5, 0.25};
    t.nodes[2] = {0, 1, -1, 0, -1, 0.5, 0.0};
    t.nodes[3] = {1, 0, -1, 0, -1, 0.25, 0.0};
    t.nodes[4] = {1, 1, -1, 0, -1, 0.25, 0.0};
    t.nodes[1].first_child = 3;
    CHECK(node_horizon(t, 0) == doctest::Approx(1.0));
    CHECK(node_horizon(t, 2) == doctest::Approx(0.5));
    CHECK(node_horizon(t, 4) == doctest::Approx(0.25));
    CHECK(node_label(t, 0) == "0");
    CHECK(node_label(t, 4) == "001");
}

TEST_CASE("sampled trees satisfy the structural invariants") {
    Problem ladder = builtin_problem("ex3");
    Problem quad = single(2);
    RngStream base(3, 0);
    for (int i = 0; i < 3000; ++i) {
        RngStream r = base.substream(static_cast<std::uint64_t>(i));
        bool useA = i % 2 == 0;
        const Problem& p = (i % 3 == 0) ? quad : ladder;
        RandomTree t = useA ? sample_tree_A(p, {0.0, 0.0}, 0.8, r, {})
                            : sample_tree_B(p, {0.0, 0.0}, 0.8, 0.75, r, {});
        int ne = 0, k = 0, extra = 0;
        for (std::size_t n = 0; n < t.nodes.size(); ++n) {
            const auto& nd = t.nodes[n];
            if (nd.is_leaf()) {
                ++k;
                continue;
            }
            ++ne;
            extra += nd.alpha - 1;
            CHECK(nd.split_elapsed < nd.horizon);
            for (int c = 0; c < nd.alpha; ++c) {
                int ch = nd.first_child + c;
                CHECK(t.nodes[ch].parent == static_cast<int>(n));
                CHECK(node_label(t, ch) == node_label(t, static_cast<int>(n)) + std::to_string(c));
                CHECK(t.nodes[ch].horizon < nd.horizon);
                CHECK(node_horizon(t, ch) == doctest::Approx(t.nodes[ch].horizon).epsilon(1e-12));
                CHECK(t.nodes[ch].start == nd.position_at_event);
            }
        }
        CHECK(ne == t.Ne);
        CHECK(k == t.k);
        CHECK(k == 1 + extra);
        if (&p == &quad) CHECK(k == t.Ne + 1);
    }
}

TEST_CASE("strategy A survival probability") {
    Problem p = single(2);
    RngStream base(21, 0);
    const int n = 1000000;
    long zero = 0;
    RandomTree t;
    auto opt = topo_only();
    opt.ne_max = 0;
    for (int i = 0; i < n; ++i) {
        RngStream r = base.substream(static_cast<std::uint64_t>(i));
        sample_tree_into(t, Strategy::A, p, {0.0, 0.0}, 1.0, 0.0, r, opt);
        if (t.Ne == 0) ++zero;
    }
    const double pe = std::exp(-1.0);
    CHECK(std::fabs(double(zero) / n - pe) < 3 * std::sqrt(pe * (1 - pe) / n));
}

TEST_CASE("strategy B mean leaf count at q = 2/3") {
    Problem p = single(2);
    RngStream base(22, 0);
    const int n = 1000000;
    double s = 0, s2 = 0;
    RandomTree t;
    auto opt = topo_only();
    for (int i = 0; i < n; ++i) {
        RngStream r = base.substream(static_cast<std::uint64_t>(i));
        sample_tree_into(t, Strategy::B, p, {0.0, 0.0}, 1.0, 2.0 / 3.0, r, opt);
        s += t.k;
        s2 += double(t.k) * t.k;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::fabs(mean - 2.0) < 3 * se);
}

TEST_CASE("four-leaf binary trees come in five shapes") {
    Problem p = single(2);
    std::set<std::string> shapes;
    RngStream base(23, 0);
    RandomTree t;
    for (int i = 0; i < 20000; ++i) {
        RngStream r = base.substream(static_cast<std::uint64_t>(i));
        sample_tree_into(t, Strategy::B, p, {0.0, 0.0}, 1.0, 0.55, r, topo_only());
        if (t.k == 4) shapes.insert(shape(t));
    }
    CHECK(shapes.size() == 5);
}

TEST_CASE("leaf-only and capped trees") {
    Problem p = single(2);
    RngStream r(1, 1);
    const int n = 100000;
    long leaves = 0;
    RandomTree t;
    for (int i = 0; i < n; ++i) {
        RngStream s = r.substream(static_cast<std::uint64_t>(i));
        sample_tree_into(t, Strategy::B, p, {0.5, 0.0}, 1.0, 0.9, s, topo_only());
        if (t.Ne == 0) {
            ++leaves;
            CHECK(t.k == 1);
        }
    }
    CHECK(std::fabs(double(leaves) / n - 0.9) < 4 * std::sqrt(0.09 / n));
    SampleOptions tiny;
    tiny.node_cap = 3;
    bool thrown = false;
    for (int i = 0; i < 200 && !thrown; ++i) {
        RngStream s = RngStream(2, 0).substream(static_cast<std::uint64_t>(i));
        try {
            sample_tree_B(p, {0.0, 0.0}, 1.0, 0.5, s, tiny);
        } catch (const TreeCapExceeded&) {
            thrown = true;
        }
    }
    CHECK(thrown);
    CHECK_THROWS_AS(sample_tree_B(p, {0.0, 0.0}, 1.0, 0.3, r), ConfigError);
}

TEST_CASE("balance histogram of trees without vertices") {
    Problem ladder = builtin_problem("ex3");
    auto h = children_balance_histogram(ladder, 1.0, 0.9, 2000, 5, 1);
    CHECK(h.matched > 0);
    CHECK(h.counts.size() == 1);
    CHECK(h.counts.begin()->first == 0);
    CHECK(h.mode() == 0);
}
