#pragma once

// Exhaustive-enumeration solvers used to validate the network simplex on tiny
// instances. Deliberately share nothing with it beyond the measure types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "lopt/measures.hpp"
#include "lopt/solver_opt.hpp"
#include "lopt/solver_ot.hpp"

namespace lopt {

namespace detail {

template <typename Scalar>
bool is_uniform(const WeightVector<Scalar>& w)
{
    return (w.array() - w(0)).abs().maxCoeff() <= Scalar(kMassTolerance);
}

/// Finds u with every weight an integer multiple of u and sum(w)/u <= max_units.
template <typename Scalar>
std::optional<Scalar> integer_unit(const WeightVector<Scalar>& a, const WeightVector<Scalar>& b, int max_units)
{
    Scalar smallest = std::numeric_limits<Scalar>::infinity();
    for (Index n = 0; n < a.size(); ++n) {
        if (a(n) > Scalar(0)) {
            smallest = std::min(smallest, a(n));
        }
    }
    for (Index n = 0; n < b.size(); ++n) {
        if (b(n) > Scalar(0)) {
            smallest = std::min(smallest, b(n));
        }
    }
    if (!std::isfinite(smallest)) {
        return std::nullopt;
    }
    const auto integral = [](const WeightVector<Scalar>& w, Scalar u) {
        for (Index n = 0; n < w.size(); ++n) {
            const Scalar k = w(n) / u;
            if (std::abs(k - std::round(k)) > Scalar(1e-7)) {
                return false;
            }
        }
        return true;
    };
    for (int k = 1; k <= max_units; ++k) {
        const Scalar u = smallest / Scalar(k);
        if (integral(a, u) && integral(b, u)) {
            return u;
        }
    }
    return std::nullopt;
}

template <typename Scalar>
std::vector<int> to_units(const WeightVector<Scalar>& w, Scalar unit)
{
    std::vector<int> out(static_cast<std::size_t>(w.size()));
    for (Index n = 0; n < w.size(); ++n) {
        out[static_cast<std::size_t>(n)] = static_cast<int>(std::lround(w(n) / unit));
    }
    return out;
}

/// Depth-first enumeration of integer matrices with row sums <= rows (== rows
/// when exact) and column sums <= cols (== cols when exact).
template <typename Scalar>
class IntegerPlanEnumerator
{
public:
    IntegerPlanEnumerator(const PointMatrix<Scalar>& cost, std::vector<int> rows, std::vector<int> cols,
                          bool exact, Scalar unit, Scalar per_unit_bonus)
        : cost_(cost), rows_(std::move(rows)), cols_(std::move(cols)), exact_(exact), unit_(unit),
          bonus_(per_unit_bonus), current_(cost.rows() * cost.cols(), 0)
    {
    }

    /// Minimizes sum_k cells[k] * unit * (cost[k] - bonus).
    void run() { visit(0, Scalar(0)); }

    Scalar best_value() const { return best_value_; }
    const std::vector<int>& best_cells() const { return best_; }

private:
    void visit(Index cell, Scalar value)
    {
        const Index n1 = cost_.cols();
        if (cell == cost_.size()) {
            if (exact_ && std::any_of(cols_.begin(), cols_.end(), [](int c) { return c != 0; })) {
                return;
            }
            if (value < best_value_) {
                best_value_ = value;
                best_ = current_;
            }
            return;
        }
        const Index i = cell / n1;
        const Index j = cell % n1;
        int lo = 0;
        int hi = std::min(rows_[i], cols_[j]);
        if (exact_ && j == n1 - 1) {
            lo = rows_[i];
            if (lo > hi) {
                return;
            }
            hi = lo;
        }
        const Scalar per_unit = unit_ * (cost_(i, j) - bonus_);
        for (int k = lo; k <= hi; ++k) {
            rows_[i] -= k;
            cols_[j] -= k;
            current_[cell] = k;
            visit(cell + 1, value + Scalar(k) * per_unit);
            rows_[i] += k;
            cols_[j] += k;
        }
        current_[cell] = 0;
    }

    const PointMatrix<Scalar>& cost_;
    std::vector<int> rows_;
    std::vector<int> cols_;
    bool exact_;
    Scalar unit_;
    Scalar bonus_;
    std::vector<int> current_;
    std::vector<int> best_;
    Scalar best_value_ = std::numeric_limits<Scalar>::infinity();
};

template <typename Scalar>
TransportPlan<Scalar> plan_from_cells(Index n0, Index n1, const std::vector<int>& cells, Scalar unit)
{
    TransportPlan<Scalar> plan;
    plan.source_size = n0;
    plan.target_size = n1;
    for (Index k = 0; k < n0 * n1; ++k) {
        if (cells[static_cast<std::size_t>(k)] > 0) {
            plan.entries.emplace_back(k / n1, k % n1, Scalar(cells[static_cast<std::size_t>(k)]) * unit);
        }
    }
    return plan;
}

} // namespace detail

/// Exhaustive balanced OT. Uniform weights with N0 = Nj <= 8 enumerate
/// permutations; otherwise all weights must be integer multiples of a unit
/// with at most 12 units per side and integer flows are enumerated.
template <typename Scalar>
OtSolution<Scalar> brute_force_ot(const DiscreteMeasure<Scalar>& mu0, const DiscreteMeasure<Scalar>& muj)
{
    detail::require(mu0.dim() == muj.dim(), "measures live in different dimensions");
    const Scalar m0 = total_mass(mu0);
    const Scalar m1 = total_mass(muj);
    detail::require(m0 > Scalar(0) && std::abs(m0 - m1) <= Scalar(kMassTolerance) * std::max({m0, m1, Scalar(1)}),
                    "balanced transport needs equal positive masses");
    const PointMatrix<Scalar> cost = squared_distance_matrix(mu0, muj);

    if (mu0.size() == muj.size() && mu0.size() <= 8 && detail::is_uniform(mu0.weights())
        && detail::is_uniform(muj.weights())) {
        const Index n = mu0.size();
        std::vector<Index> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), Index(0));
        std::vector<Index> best = perm;
        Scalar best_sum = std::numeric_limits<Scalar>::infinity();
        do {
            Scalar s = Scalar(0);
            for (Index i = 0; i < n; ++i) {
                s += cost(i, perm[static_cast<std::size_t>(i)]);
            }
            if (s < best_sum) {
                best_sum = s;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        OtSolution<Scalar> out;
        out.plan.source_size = n;
        out.plan.target_size = n;
        for (Index i = 0; i < n; ++i) {
            out.plan.entries.emplace_back(i, best[static_cast<std::size_t>(i)], mu0.weight(i));
        }
        out.cost = plan_cost_ot(out.plan, mu0, muj);
        return out;
    }

    const auto unit = detail::integer_unit(mu0.weights(), muj.weights(), 12);
    detail::require(unit.has_value(), "instance too large for enumeration");
    auto rows = detail::to_units(mu0.weights(), *unit);
    auto cols = detail::to_units(muj.weights(), *unit);
    detail::require(std::accumulate(rows.begin(), rows.end(), 0) <= 12, "instance too large for enumeration");
    detail::require(std::accumulate(rows.begin(), rows.end(), 0) == std::accumulate(cols.begin(), cols.end(), 0),
                    "unit counts are not balanced");

    detail::IntegerPlanEnumerator<Scalar> search(cost, std::move(rows), std::move(cols), true, *unit, Scalar(0));
    search.run();
    OtSolution<Scalar> out;
    out.plan = detail::plan_from_cells(mu0.size(), muj.size(), search.best_cells(), *unit);
    out.cost = plan_cost_ot(out.plan, mu0, muj);
    return out;
}

/// Exhaustive optimal partial transport over integer-unit plans; requires
/// (|mu0| + |muj|) / unit <= 10.
template <typename Scalar>
OptSolution<Scalar> brute_force_opt(const DiscreteMeasure<Scalar>& mu0, const DiscreteMeasure<Scalar>& muj, Scalar lambda)
{
    detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
    detail::require(mu0.dim() == muj.dim(), "measures live in different dimensions");
    const Scalar m0 = total_mass(mu0);
    const Scalar m1 = total_mass(muj);

    OptSolution<Scalar> out;
    out.plan.source_size = mu0.size();
    out.plan.target_size = muj.size();
    if (m0 == Scalar(0) || m1 == Scalar(0)) {
        out.destroyed_mass = m0;
        out.created_mass = m1;
        out.cost = lambda * (m0 + m1);
        return out;
    }

    const auto unit = detail::integer_unit(mu0.weights(), muj.weights(), 10);
    detail::require(unit.has_value(), "instance too large for enumeration");
    auto rows = detail::to_units(mu0.weights(), *unit);
    auto cols = detail::to_units(muj.weights(), *unit);
    detail::require(std::accumulate(rows.begin(), rows.end(), 0) + std::accumulate(cols.begin(), cols.end(), 0) <= 10,
                    "instance too large for enumeration");

    // C(gamma) = sum gamma (c - 2 lambda) + lambda (|mu0| + |muj|)
    const PointMatrix<Scalar> cost = squared_distance_matrix(mu0, muj);
    detail::IntegerPlanEnumerator<Scalar> search(cost, std::move(rows), std::move(cols), false, *unit,
                                                 Scalar(2) * lambda);
    search.run();
    out.plan = detail::plan_from_cells(mu0.size(), muj.size(), search.best_cells(), *unit);
    out.transported_mass = out.plan.total_mass();
    out.destroyed_mass = m0 - out.transported_mass;
    out.created_mass = m1 - out.transported_mass;
    out.cost = plan_cost_opt(out.plan, mu0, muj, lambda);
    return out;
}

} // namespace lopt
