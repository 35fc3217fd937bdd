#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lopt/errors.hpp"
#include "lopt/measures.hpp"

namespace lopt {

/// Weights are carried through the simplex as integers in units of 1/scale.
inline constexpr double kQuantizationScale = 1e9;

/// Round w * kQuantizationScale to int64 per atom.
template <typename Scalar>
std::vector<std::int64_t> quantize_weights(const WeightVector<Scalar>& w)
{
    constexpr double limit = 4e18;
    std::vector<std::int64_t> q(static_cast<std::size_t>(w.size()));
    double total = 0.0;
    for (Index n = 0; n < w.size(); ++n) {
        const double scaled = static_cast<double>(w(n)) * kQuantizationScale;
        total += scaled;
        if (!(scaled < limit) || !(total < limit)) {
            throw NumericalError("weights too large to quantize");
        }
        q[static_cast<std::size_t>(n)] = std::llround(scaled);
    }
    return q;
}

/// Shift the residual target - sum(q) onto the largest atom (lowest index on ties).
inline void rebalance_quantized(std::vector<std::int64_t>& q, std::int64_t target)
{
    std::int64_t sum = 0;
    for (auto v : q) {
        sum += v;
    }
    if (sum == target || q.empty()) {
        return;
    }
    const auto largest = std::max_element(q.begin(), q.end());
    *largest += target - sum;
    if (*largest < 0) {
        throw NumericalError("quantization residual exceeds the largest atom");
    }
}

/// Primal network simplex for the uncapacitated transportation problem on the
/// complete bipartite graph sources x sinks.
///
/// Flows are int64 (quantized weights) so degenerate pivots are exact; costs
/// stay in Scalar. The basis is kept strongly feasible (Cunningham's leaving
/// arc rule) which rules out cycling. Arc pricing is a deterministic block
/// search starting from arc 0, first minimum wins.
template <typename Scalar>
class TransportationSimplex
{
public:
    using CostMatrix = PointMatrix<Scalar>;
    using Entry = Eigen::Triplet<Scalar, Index>;

    TransportationSimplex(CostMatrix cost, std::vector<std::int64_t> supply, std::vector<std::int64_t> demand)
        : cost_(std::move(cost)), supply_(std::move(supply)), demand_(std::move(demand))
    {
        n0_ = cost_.rows();
        n1_ = cost_.cols();
        detail::require(static_cast<Index>(supply_.size()) == n0_, "supply size mismatch");
        detail::require(static_cast<Index>(demand_.size()) == n1_, "demand size mismatch");
        detail::require(n0_ >= 1 && n1_ >= 1, "empty transportation instance");
        detail::require(cost_.allFinite(), "costs must be finite");
        std::int64_t s = 0, d = 0;
        for (auto v : supply_) {
            detail::require(v >= 0, "negative supply");
            s += v;
        }
        for (auto v : demand_) {
            detail::require(v >= 0, "negative demand");
            d += v;
        }
        detail::require(s == d, "quantized instance is not balanced");
        init();
    }

    void run()
    {
        Index guard = 0;
        // Strongly feasible pivoting cannot cycle; the cap only guards against bugs.
        const Index max_pivots = 500 * (arc_count_ + 10);
        for (Index e = find_entering(); e >= 0; e = find_entering()) {
            pivot(e);
            if (++guard > max_pivots) {
                throw NumericalError("network simplex exceeded its pivot budget");
            }
        }
        pivots_ = guard;
        for (Index v = 0; v < node_count_; ++v) {
            if (flow_[artificial_arc(v)] != 0) {
                throw NumericalError("residual flow on an artificial arc");
            }
        }
    }

    Index pivots() const { return pivots_; }

    std::int64_t quantized_flow(Index i, Index j) const { return flow_[i * n1_ + j]; }

    /// Flows on the final basis recomputed from real-valued supplies.
    /// Basic flows are a fixed linear function of the supplies, so this removes
    /// quantization error while keeping the optimal basis. Entries at or below
    /// kEntryDropTolerance (and negative residue) are dropped.
    std::vector<Entry> refined_flows(const WeightVector<Scalar>& supply, const WeightVector<Scalar>& demand) const
    {
        detail::require(supply.size() == n0_ && demand.size() == n1_, "real supply size mismatch");
        std::vector<Scalar> subtree(static_cast<std::size_t>(node_count_ + 1), Scalar(0));
        for (Index i = 0; i < n0_; ++i) {
            subtree[i] = supply(i);
        }
        for (Index j = 0; j < n1_; ++j) {
            subtree[n0_ + j] = -demand(j);
        }
        std::vector<Entry> out;
        for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
            const Index v = *it;
            if (v == root_) {
                continue;
            }
            const Scalar f = up_[v] ? subtree[v] : -subtree[v];
            subtree[parent_[v]] += subtree[v];
            const Index a = pred_[v];
            if (a < real_arc_count_ && f > Scalar(kEntryDropTolerance)) {
                out.emplace_back(a / n1_, a % n1_, f);
            }
        }
        std::sort(out.begin(), out.end(), [](const Entry& x, const Entry& y) {
            return x.row() != y.row() ? x.row() < y.row() : x.col() < y.col();
        });
        return out;
    }

private:
    Index artificial_arc(Index v) const { return real_arc_count_ + v; }

    Index arc_source(Index a) const
    {
        if (a < real_arc_count_) {
            return a / n1_;
        }
        const Index v = a - real_arc_count_;
        return artificial_up_[v] ? v : root_;
    }

    Index arc_target(Index a) const
    {
        if (a < real_arc_count_) {
            return n0_ + a % n1_;
        }
        const Index v = a - real_arc_count_;
        return artificial_up_[v] ? root_ : v;
    }

    Scalar arc_cost(Index a) const
    {
        return a < real_arc_count_ ? cost_(a / n1_, a % n1_) : artificial_cost_;
    }

    Scalar reduced_cost(Index a) const
    {
        return arc_cost(a) + potential_[arc_source(a)] - potential_[arc_target(a)];
    }

    void init()
    {
        node_count_ = n0_ + n1_;
        root_ = node_count_;
        real_arc_count_ = n0_ * n1_;
        arc_count_ = real_arc_count_ + node_count_;

        Scalar max_cost = Scalar(0);
        if (cost_.size() > 0) {
            max_cost = cost_.cwiseAbs().maxCoeff();
        }
        artificial_cost_ = (max_cost + Scalar(1)) * Scalar(node_count_ + 1);
        epsilon_ = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * artificial_cost_;

        flow_.assign(static_cast<std::size_t>(arc_count_), 0);
        in_tree_.assign(static_cast<std::size_t>(arc_count_), 0);
        artificial_up_.assign(static_cast<std::size_t>(node_count_), 0);

        const Index n = node_count_ + 1;
        parent_.assign(n, -1);
        pred_.assign(n, -1);
        up_.assign(n, 0);
        depth_.assign(n, 0);
        potential_.assign(n, Scalar(0));

        // Strongly feasible start: positive-supply nodes point to the root,
        // everything else hangs from the root with nonnegative flow.
        for (Index v = 0; v < node_count_; ++v) {
            const std::int64_t b = v < n0_ ? supply_[v] : -demand_[v - n0_];
            const Index a = artificial_arc(v);
            artificial_up_[v] = b > 0;
            flow_[a] = b > 0 ? b : -b;
            in_tree_[a] = 1;
            parent_[v] = root_;
            pred_[v] = a;
            up_[v] = b > 0;
        }
        block_size_ = std::max<Index>(10, static_cast<Index>(std::sqrt(static_cast<double>(arc_count_))));
        next_arc_ = 0;
        rebuild_tree();
    }

    /// Recompute traversal order, depths and potentials from parent pointers.
    void rebuild_tree()
    {
        const Index n = node_count_ + 1;
        child_start_.assign(n + 1, 0);
        for (Index v = 0; v < n; ++v) {
            if (v != root_) {
                ++child_start_[parent_[v] + 1];
            }
        }
        for (Index v = 0; v < n; ++v) {
            child_start_[v + 1] += child_start_[v];
        }
        children_.assign(n, 0);
        std::vector<Index> fill(child_start_.begin(), child_start_.end() - 1);
        for (Index v = 0; v < n; ++v) {
            if (v != root_) {
                children_[fill[parent_[v]]++] = v;
            }
        }
        order_.clear();
        order_.reserve(n);
        order_.push_back(root_);
        depth_[root_] = 0;
        potential_[root_] = Scalar(0);
        for (std::size_t head = 0; head < order_.size(); ++head) {
            const Index p = order_[head];
            for (Index k = child_start_[p]; k < child_start_[p + 1]; ++k) {
                const Index v = children_[k];
                depth_[v] = depth_[p] + 1;
                const Scalar c = arc_cost(pred_[v]);
                potential_[v] = up_[v] ? potential_[p] - c : potential_[p] + c;
                order_.push_back(v);
            }
        }
        if (static_cast<Index>(order_.size()) != n) {
            throw NumericalError("basis is not a spanning tree");
        }
    }

    Index find_entering()
    {
        Index best = -1;
        Scalar best_rc = -epsilon_;
        Index scanned_in_block = 0;
        for (Index count = 0; count < arc_count_; ++count) {
            const Index a = next_arc_;
            next_arc_ = next_arc_ + 1 == arc_count_ ? 0 : next_arc_ + 1;
            if (!in_tree_[a]) {
                const Scalar rc = reduced_cost(a);
                if (rc < best_rc) {
                    best_rc = rc;
                    best = a;
                }
            }
            if (++scanned_in_block == block_size_) {
                if (best >= 0) {
                    return best;
                }
                scanned_in_block = 0;
            }
        }
        return best;
    }

    void pivot(Index entering)
    {
        const Index first = arc_source(entering);
        const Index second = arc_target(entering);

        Index a = first, b = second;
        while (a != b) {
            if (depth_[a] > depth_[b]) {
                a = parent_[a];
            } else if (depth_[b] > depth_[a]) {
                b = parent_[b];
            } else {
                a = parent_[a];
                b = parent_[b];
            }
        }
        const Index join = a;

        constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max();
        std::int64_t delta = inf;
        Index leaving_node = -1;
        int side = 0;
        // Flow runs join -> first along the first path, second -> join along the second.
        for (Index x = first; x != join; x = parent_[x]) {
            const std::int64_t d = up_[x] ? flow_[pred_[x]] : inf;
            if (d < delta) {
                delta = d;
                leaving_node = x;
                side = 1;
            }
        }
        for (Index x = second; x != join; x = parent_[x]) {
            const std::int64_t d = up_[x] ? inf : flow_[pred_[x]];
            if (d <= delta && d != inf) {
                delta = d;
                leaving_node = x;
                side = 2;
            }
        }
        if (side == 0) {
            throw NumericalError("unbounded transportation instance");
        }

        if (delta > 0) {
            flow_[entering] += delta;
            for (Index x = first; x != join; x = parent_[x]) {
                flow_[pred_[x]] += up_[x] ? -delta : delta;
            }
            for (Index x = second; x != join; x = parent_[x]) {
                flow_[pred_[x]] += up_[x] ? delta : -delta;
            }
        }

        in_tree_[pred_[leaving_node]] = 0;
        in_tree_[entering] = 1;

        // Re-hang the detached subtree from the entering arc, reversing the
        // path between the entering endpoint and the old subtree root.
        Index x = side == 1 ? first : second;
        Index new_parent = side == 1 ? second : first;
        Index new_pred = entering;
        char new_up = side == 1 ? 1 : 0;
        while (true) {
            const Index old_parent = parent_[x];
            const Index old_pred = pred_[x];
            const char old_up = up_[x];
            parent_[x] = new_parent;
            pred_[x] = new_pred;
            up_[x] = new_up;
            if (x == leaving_node) {
                break;
            }
            new_parent = x;
            new_pred = old_pred;
            new_up = old_up ? 0 : 1;
            x = old_parent;
        }
        rebuild_tree();
    }

    CostMatrix cost_;
    std::vector<std::int64_t> supply_;
    std::vector<std::int64_t> demand_;

    Index n0_ = 0, n1_ = 0;
    Index node_count_ = 0, root_ = 0;
    Index real_arc_count_ = 0, arc_count_ = 0;
    Scalar artificial_cost_ = Scalar(0);
    Scalar epsilon_ = Scalar(0);

    std::vector<std::int64_t> flow_;
    std::vector<char> in_tree_;
    std::vector<char> artificial_up_;

    std::vector<Index> parent_;
    std::vector<Index> pred_;
    std::vector<char> up_;
    std::vector<Index> depth_;
    std::vector<Scalar> potential_;
    std::vector<Index> child_start_;
    std::vector<Index> children_;
    std::vector<Index> order_;

    Index block_size_ = 10;
    Index next_arc_ = 0;
    Index pivots_ = 0;
};

} // namespace lopt
