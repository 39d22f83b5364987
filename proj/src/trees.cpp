#include "treepde/trees.hpp"

#include <cmath>

#include "treepde/errors.hpp"
#include "treepde/sde.hpp"

namespace treepde {

void RandomTree::clear() {
    nodes.clear();
    k = Ne = 0;
    pruned = false;
    has_paths = false;
}

void sample_tree_into(RandomTree& tree, Strategy s, const Problem& p, const Point& x, double t,
                      double q, RngStream& rng, const SampleOptions& opt) {
    if (!(t > 0.0)) throw ConfigError("tree horizon must be positive");
    tree.clear();
    tree.strategy = s;
    tree.t = t;
    const int nterms = static_cast<int>(p.terms.size());
    // Topology and paths use separate streams so pruned trees cost no path draws.
    RngStream paths(rng.master_seed(), mix64(rng.task_id(), rng.next_u64()));

    TreeNode root;
    root.horizon = t;
    root.start = x;
    tree.nodes.push_back(root);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        double tau = tree.nodes[i].horizon;
        bool split;
        double elapsed = 0.0;
        if (s == Strategy::A) {
            double e = rng.exponential();
            split = e <= tau;
            elapsed = e;
        } else {
            split = rng.uniform() >= q;
            if (split) elapsed = tau * rng.uniform();
        }
        if (!split) {
            ++tree.k;
            continue;
        }
        int term = nterms == 1 ? 0 : std::min(nterms - 1, static_cast<int>(rng.uniform() * nterms));
        int alpha = p.terms[term].power;
        ++tree.Ne;
        if (tree.Ne > opt.ne_max) {
            tree.pruned = true;
            return;
        }
        if (tree.nodes.size() + alpha > opt.node_cap)
            throw TreeCapExceeded("random tree exceeded node cap of " + std::to_string(opt.node_cap));
        TreeNode& v = tree.nodes[i];
        v.alpha = alpha;
        v.term = term;
        v.split_elapsed = elapsed;
        v.first_child = static_cast<int>(tree.nodes.size());
        double child_h = tau - elapsed;
        for (int c = 0; c < alpha; ++c) {
            TreeNode ch;
            ch.parent = static_cast<int>(i);
            ch.ordinal = c;
            ch.horizon = child_h;
            tree.nodes.push_back(ch);
        }
    }
    if (!opt.simulate_paths) return;

    PathStepper stepper(p, opt.dt);
    for (auto& n : tree.nodes) {
        if (n.parent >= 0) n.start = tree.nodes[n.parent].position_at_event;
        PathState st{n.start, 0.0};
        stepper.advance(st, n.is_leaf() ? n.horizon : n.split_elapsed, paths, n.horizon);
        n.position_at_event = st.position;
    }
    tree.has_paths = true;
}

RandomTree sample_tree_A(const Problem& p, const Point& x, double t, RngStream& rng,
                         const SampleOptions& opt) {
    RandomTree tree;
    sample_tree_into(tree, Strategy::A, p, x, t, 0.0, rng, opt);
    return tree;
}

RandomTree sample_tree_B(const Problem& p, const Point& x, double t, double q, RngStream& rng,
                         const SampleOptions& opt) {
    if (!admissible_q_range(p).contains(q))
        throw ConfigError("q = " + std::to_string(q) + " outside the admissible range");
    RandomTree tree;
    sample_tree_into(tree, Strategy::B, p, x, t, q, rng, opt);
    return tree;
}

std::string node_label(const RandomTree& tree, int node) {
    std::string rev;
    for (int i = node; tree.nodes[i].parent >= 0; i = tree.nodes[i].parent)
        rev.push_back(static_cast<char>('0' + tree.nodes[i].ordinal));
    rev.push_back('0');
    return {rev.rbegin(), rev.rend()};
}

int ancestor_match(const std::string& j, const std::string& l) {
    if (l.size() > j.size()) return 0;
    return j.compare(0, l.size(), l) == 0 ? 1 : 0;
}

double node_horizon(const RandomTree& tree, int node) {
    double h = tree.t;
    std::vector<int> chain;
    for (int i = tree.nodes[node].parent; i >= 0; i = tree.nodes[i].parent) chain.push_back(i);
    // Walk root to node, scaling by (1 - S) of each ancestor.
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const auto& a = tree.nodes[*it];
        double S = a.split_elapsed / a.horizon;
        h *= 1.0 - S;
    }
    return h;
}

}  // namespace treepde
