#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "treepde/problem.hpp"
#include "treepde/rng.hpp"

namespace treepde {

enum class Strategy { A, B };

struct TreeNode {
    int parent = -1;
    int ordinal = 0;       // position among siblings
    int first_child = -1;  // children are stored contiguously
    int alpha = 0;         // child count, 0 for leaves
    int term = -1;         // index into Problem::terms for vertices
    double horizon = 0.0;        // remaining PDE time at creation
    double split_elapsed = 0.0;  // vertices only
    Point start{0.0, 0.0};
    Point position_at_event{0.0, 0.0};  // split point, or leaf end point

    bool is_leaf() const { return alpha == 0; }
};

struct RandomTree {
    Strategy strategy = Strategy::A;
    double t = 0.0;
    std::vector<TreeNode> nodes;  // parents precede children
    int k = 0;                    // leaves
    int Ne = 0;                   // vertices
    bool pruned = false;          // generation stopped after exceeding Ne_max
    bool has_paths = false;

    void clear();
};

struct SampleOptions {
    double dt = 0.01;
    int ne_max = std::numeric_limits<int>::max();  // stop once Ne exceeds this
    std::size_t node_cap = 10000;
    bool simulate_paths = true;
};

/// Exponential split clocks of rate 1.
RandomTree sample_tree_A(const Problem& p, const Point& x, double t, RngStream& rng,
                         const SampleOptions& opt = {});
/// Bernoulli leaf decision with P(leaf) = q, uniform split fractions.
RandomTree sample_tree_B(const Problem& p, const Point& x, double t, double q, RngStream& rng,
                         const SampleOptions& opt = {});

/// Allocation-free variant used in hot loops; `tree` is overwritten.
void sample_tree_into(RandomTree& tree, Strategy s, const Problem& p, const Point& x, double t,
                      double q, RngStream& rng, const SampleOptions& opt);

/// Root label is "0"; each child appends its ordinal digit.
std::string node_label(const RandomTree& tree, int node);
/// 1 iff truncating j to the length of l yields l.
int ancestor_match(const std::string& j, const std::string& l);
/// Remaining horizon of a node recomputed from its ancestors' split fractions.
double node_horizon(const RandomTree& tree, int node);

// Combinatorics and cost model of the branching law.

/// Catalan count of binary trees with k leaves; exact for k <= 30.
std::uint64_t count_diagrams_binary(int k);
/// Fuss-Catalan count of ordered m-ary trees with Ne internal nodes.
std::uint64_t count_diagrams(int Ne, int m);
double log_count_diagrams(int Ne, int m);
/// Law of Ne for a single-term problem of power m at leaf probability q.
double tree_probability(int Ne, int m, double q);
double mean_branches(int m, double q);
double estimate_tb(double N, double t, double dt, double t_c, int m, double q);

struct BalanceHistogram {
    std::map<int, long> counts;  // n_2 - n_3 -> trees
    long sampled = 0;
    long matched = 0;
    long aborted = 0;  // hit the node cap
    int mode() const;
};

/// Histogram of n_2 - n_3 over N strategy-B topologies; k_filter <= 0 keeps all.
BalanceHistogram children_balance_histogram(const Problem& p, double t, double q, long N,
                                            std::uint64_t seed, int k_filter = 0,
                                            std::size_t node_cap = 10000);

}  // namespace treepde
