#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lopt/errors.hpp"

namespace lopt {

using Index = Eigen::Index;

template <typename Scalar>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using WeightVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Absolute tolerance on masses for every marginal equality/domination check.
inline constexpr double kMassTolerance = 1e-9;

/// Plan entries below this mass are treated as quantization residue.
inline constexpr double kEntryDropTolerance = 1e-12;

/// Neumaier compensated accumulator.
template <typename Scalar>
class CompensatedSum
{
public:
    void add(Scalar value)
    {
        const Scalar t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
    }

    Scalar value() const { return sum_ + compensation_; }

private:
    Scalar sum_ = Scalar(0);
    Scalar compensation_ = Scalar(0);
};

/// Weighted point set sum_n w_n delta_{x_n} in R^d. Points are stored one
/// atom per row. Zero-weight atoms are kept so that index alignment with a
/// reference survives projections.
template <typename Scalar>
class DiscreteMeasure
{
public:
    using Points = PointMatrix<Scalar>;
    using Weights = WeightVector<Scalar>;

    DiscreteMeasure(Points points, Weights weights)
        : points_(std::move(points)), weights_(std::move(weights))
    {
        detail::require(points_.rows() >= 1, "measure needs at least one atom");
        detail::require(points_.cols() >= 1, "measure needs dimension >= 1");
        detail::require(weights_.size() == points_.rows(),
                        "weight count must match atom count");
        detail::require(points_.allFinite(), "coordinates must be finite");
        detail::require(weights_.allFinite(), "weights must be finite");
        detail::require((weights_.array() >= Scalar(0)).all(), "weights must be nonnegative");
    }

    /// Uniform weights summing to `mass`.
    static DiscreteMeasure uniform(Points points, Scalar mass = Scalar(1))
    {
        const Index n = points.rows();
        detail::require(n >= 1, "measure needs at least one atom");
        return DiscreteMeasure(std::move(points), Weights::Constant(n, mass / Scalar(n)));
    }

    const Points& points() const { return points_; }
    const Weights& weights() const { return weights_; }

    Index size() const { return points_.rows(); }
    Index dim() const { return points_.cols(); }

    auto point(Index n) const { return points_.row(n); }
    Scalar weight(Index n) const { return weights_(n); }

    /// Same support, weights multiplied by `factor`.
    DiscreteMeasure scaled(Scalar factor) const
    {
        return DiscreteMeasure(points_, weights_ * factor);
    }

private:
    Points points_;
    Weights weights_;
};

/// Sparse coupling between a source measure of `source_size` atoms and a
/// target measure of `target_size` atoms. Only strictly positive masses are
/// stored.
template <typename Scalar>
struct TransportPlan
{
    using Entry = Eigen::Triplet<Scalar, Index>;

    Index source_size = 0;
    Index target_size = 0;
    std::vector<Entry> entries;

    TransportPlan() = default;
    TransportPlan(Index n0, Index n1, std::vector<Entry> e = {})
        : source_size(n0), target_size(n1), entries(std::move(e))
    {
        validate();
    }

    void validate() const
    {
        detail::require(source_size >= 0 && target_size >= 0, "plan sizes must be nonnegative");
        for (const auto& e : entries) {
            detail::require(e.row() >= 0 && e.row() < source_size, "plan source index out of range");
            detail::require(e.col() >= 0 && e.col() < target_size, "plan target index out of range");
            detail::require(std::isfinite(e.value()) && e.value() > Scalar(0),
                            "plan masses must be positive and finite");
        }
    }

    Scalar total_mass() const
    {
        CompensatedSum<Scalar> s;
        for (const auto& e : entries) {
            s.add(e.value());
        }
        return s.value();
    }

    /// Row sums (gamma_0).
    WeightVector<Scalar> source_marginal() const
    {
        WeightVector<Scalar> m = WeightVector<Scalar>::Zero(source_size);
        for (const auto& e : entries) {
            m(e.row()) += e.value();
        }
        return m;
    }

    /// Column sums (gamma_1).
    WeightVector<Scalar> target_marginal() const
    {
        WeightVector<Scalar> m = WeightVector<Scalar>::Zero(target_size);
        for (const auto& e : entries) {
            m(e.col()) += e.value();
        }
        return m;
    }

    /// True iff every source row carries at most one entry.
    bool is_map_induced() const
    {
        std::vector<int> count(static_cast<std::size_t>(source_size), 0);
        for (const auto& e : entries) {
            if (++count[static_cast<std::size_t>(e.row())] > 1) {
                return false;
            }
        }
        return true;
    }

    /// Diagonal coupling diag(w) between two measures with the same indexing.
    static TransportPlan diagonal(const WeightVector<Scalar>& w)
    {
        TransportPlan plan;
        plan.source_size = w.size();
        plan.target_size = w.size();
        for (Index n = 0; n < w.size(); ++n) {
            if (w(n) > Scalar(0)) {
                plan.entries.emplace_back(n, n, w(n));
            }
        }
        return plan;
    }
};

enum class TransportKind { balanced, partial };

struct CostParams
{
    double lambda = 0.0;
    TransportKind kind = TransportKind::balanced;

    void validate() const
    {
        detail::require(kind == TransportKind::balanced || lambda >= 0.0,
                        "lambda must be nonnegative");
    }
};

template <typename Scalar>
Scalar total_mass(const DiscreteMeasure<Scalar>& mu)
{
    CompensatedSum<Scalar> s;
    for (Index n = 0; n < mu.size(); ++n) {
        s.add(mu.weight(n));
    }
    return s.value();
}

template <typename Scalar>
Scalar squared_distance(const DiscreteMeasure<Scalar>& a, Index n, const DiscreteMeasure<Scalar>& b, Index m)
{
    return (a.point(n) - b.point(m)).squaredNorm();
}

/// sum_{(n,m)} |x0_n - xj_m|^2 gamma_{n,m}
template <typename Scalar>
Scalar plan_cost_ot(const TransportPlan<Scalar>& gamma,
                    const DiscreteMeasure<Scalar>& mu0,
                    const DiscreteMeasure<Scalar>& muj)
{
    detail::require(gamma.source_size == mu0.size() && gamma.target_size == muj.size(),
                    "plan shape does not match the measures");
    detail::require(mu0.dim() == muj.dim(), "measures live in different dimensions");
    CompensatedSum<Scalar> s;
    for (const auto& e : gamma.entries) {
        detail::require(e.row() >= 0 && e.row() < mu0.size() && e.col() >= 0 && e.col() < muj.size(),
                        "plan index out of range");
        s.add(squared_distance(mu0, e.row(), muj, e.col()) * e.value());
    }
    return s.value();
}

/// Checks gamma_0 <= p0 and gamma_1 <= pj within kMassTolerance.
template <typename Scalar>
bool is_dominated(const TransportPlan<Scalar>& gamma,
                  const DiscreteMeasure<Scalar>& mu0,
                  const DiscreteMeasure<Scalar>& muj)
{
    const Scalar tol = Scalar(kMassTolerance);
    return ((gamma.source_marginal() - mu0.weights()).array() <= tol).all()
        && ((gamma.target_marginal() - muj.weights()).array() <= tol).all();
}

/// Checks gamma_0 = p0 and gamma_1 = pj within kMassTolerance.
template <typename Scalar>
bool is_balanced_coupling(const TransportPlan<Scalar>& gamma,
                          const DiscreteMeasure<Scalar>& mu0,
                          const DiscreteMeasure<Scalar>& muj)
{
    const Scalar tol = Scalar(kMassTolerance);
    return ((gamma.source_marginal() - mu0.weights()).array().abs() <= tol).all()
        && ((gamma.target_marginal() - muj.weights()).array().abs() <= tol).all();
}

/// Partial transport cost: transport term + lambda (|mu0| + |muj| - 2|gamma|).
template <typename Scalar>
Scalar plan_cost_opt(const TransportPlan<Scalar>& gamma,
                     const DiscreteMeasure<Scalar>& mu0,
                     const DiscreteMeasure<Scalar>& muj,
                     Scalar lambda)
{
    detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
    const Scalar transport = plan_cost_ot(gamma, mu0, muj);
    detail::require(is_dominated(gamma, mu0, muj), "plan marginals exceed the measures");
    return transport + lambda * (total_mass(mu0) + total_mass(muj) - Scalar(2) * gamma.total_mass());
}

template <typename Scalar>
Scalar plan_cost(const TransportPlan<Scalar>& gamma,
                 const DiscreteMeasure<Scalar>& mu0,
                 const DiscreteMeasure<Scalar>& muj,
                 const CostParams& params)
{
    params.validate();
    if (params.kind == TransportKind::balanced) {
        return plan_cost_ot(gamma, mu0, muj);
    }
    return plan_cost_opt(gamma, mu0, muj, static_cast<Scalar>(params.lambda));
}

/// sum_n min(|v_n|^2, two_lambda) w_n
template <typename DerivedV, typename DerivedW>
typename DerivedV::Scalar truncated_norm_sq(const Eigen::MatrixBase<DerivedV>& v,
                                            const Eigen::MatrixBase<DerivedW>& weights,
                                            typename DerivedV::Scalar two_lambda)
{
    using Scalar = typename DerivedV::Scalar;
    detail::require(two_lambda >= Scalar(0), "truncation threshold must be nonnegative");
    detail::require(v.rows() == weights.size(), "displacement rows must match weight count");
    CompensatedSum<Scalar> s;
    for (Index n = 0; n < v.rows(); ++n) {
        s.add(std::min(v.row(n).squaredNorm(), two_lambda) * weights(n));
    }
    return s.value();
}

/// sum_n |v_n|^2 w_n
template <typename DerivedV, typename DerivedW>
typename DerivedV::Scalar weighted_norm_sq(const Eigen::MatrixBase<DerivedV>& v,
                                           const Eigen::MatrixBase<DerivedW>& weights)
{
    return truncated_norm_sq(v, weights, std::numeric_limits<typename DerivedV::Scalar>::infinity());
}

/// Canonical form: atoms sorted lexicographically, coincident atoms merged,
/// optionally dropping atoms whose weight is <= drop_below.
template <typename Scalar>
DiscreteMeasure<Scalar> merge_coincident(const DiscreteMeasure<Scalar>& mu, Scalar drop_below = Scalar(-1))
{
    std::vector<Index> order;
    for (Index n = 0; n < mu.size(); ++n) {
        if (mu.weight(n) > drop_below) {
            order.push_back(n);
        }
    }
    const auto less = [&](Index a, Index b) {
        for (Index k = 0; k < mu.dim(); ++k) {
            if (mu.points()(a, k) != mu.points()(b, k)) {
                return mu.points()(a, k) < mu.points()(b, k);
            }
        }
        return false;
    };
    std::stable_sort(order.begin(), order.end(), less);

    std::vector<Index> heads;
    std::vector<Scalar> mass;
    for (Index n : order) {
        if (!heads.empty() && !less(heads.back(), n) && !less(n, heads.back())) {
            mass.back() += mu.weight(n);
        } else {
            heads.push_back(n);
            mass.push_back(mu.weight(n));
        }
    }
    detail::require(!heads.empty(), "merge_coincident dropped every atom");

    typename DiscreteMeasure<Scalar>::Points pts(static_cast<Index>(heads.size()), mu.dim());
    typename DiscreteMeasure<Scalar>::Weights w(static_cast<Index>(heads.size()));
    for (std::size_t i = 0; i < heads.size(); ++i) {
        pts.row(static_cast<Index>(i)) = mu.point(heads[i]);
        w(static_cast<Index>(i)) = mass[i];
    }
    return DiscreteMeasure<Scalar>(std::move(pts), std::move(w));
}

/// Largest atom-wise discrepancy between two measures with identical atom
/// counts: max over coordinates and weights of the absolute difference.
/// Returns +inf when the shapes differ.
template <typename Scalar>
Scalar max_atom_difference(const DiscreteMeasure<Scalar>& a, const DiscreteMeasure<Scalar>& b)
{
    if (a.size() != b.size() || a.dim() != b.dim()) {
        return std::numeric_limits<Scalar>::infinity();
    }
    const Scalar dp = (a.points() - b.points()).cwiseAbs().maxCoeff();
    const Scalar dw = (a.weights() - b.weights()).cwiseAbs().maxCoeff();
    return std::max(dp, dw);
}

using Measure = DiscreteMeasure<double>;
using Plan = TransportPlan<double>;

} // namespace lopt
