#pragma once

#include <vector>

#include "lopt/measures.hpp"

namespace lopt {

/// A target measure re-expressed on the reference indexing: atom n of
/// `measure` corresponds to reference atom n.
template <typename Scalar>
struct ProjectedMeasure
{
    DiscreteMeasure<Scalar> measure;
    Scalar deficit = Scalar(0); ///< |muj| - |projected|; zero for balanced projections
};

namespace detail {

/// Row-wise compensated accumulation of sum_m gamma_{n,m} x_m and sum_m gamma_{n,m}.
template <typename Scalar>
struct RowBarycenters
{
    PointMatrix<Scalar> weighted_sum;
    WeightVector<Scalar> row_mass;
    std::vector<Index> only_target; ///< target index when the row has exactly one entry, else -1

    /// Weighted mean target of row n; exact copy of the target atom for single-entry rows.
    template <typename Points>
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> mean(Index n, const Points& targets) const
    {
        const Index m = only_target[static_cast<std::size_t>(n)];
        if (m >= 0) {
            return targets.row(m);
        }
        return weighted_sum.row(n) / row_mass(n);
    }
};

template <typename Scalar>
RowBarycenters<Scalar> accumulate_rows(const DiscreteMeasure<Scalar>& mu0,
                                       const DiscreteMeasure<Scalar>& muj,
                                       const TransportPlan<Scalar>& gamma)
{
    require(gamma.source_size == mu0.size() && gamma.target_size == muj.size(),
            "plan shape does not match the measures");
    require(mu0.dim() == muj.dim(), "measures live in different dimensions");
    const Index n0 = mu0.size();
    const Index d = mu0.dim();
    std::vector<CompensatedSum<Scalar>> coords(static_cast<std::size_t>(n0 * d));
    std::vector<CompensatedSum<Scalar>> mass(static_cast<std::size_t>(n0));
    std::vector<Index> only(static_cast<std::size_t>(n0), -1);
    std::vector<int> count(static_cast<std::size_t>(n0), 0);
    for (const auto& e : gamma.entries) {
        const Index n = e.row();
        if (e.value() > Scalar(0) && ++count[static_cast<std::size_t>(n)] == 1) {
            only[static_cast<std::size_t>(n)] = e.col();
        }
        mass[static_cast<std::size_t>(n)].add(e.value());
        for (Index k = 0; k < d; ++k) {
            coords[static_cast<std::size_t>(n * d + k)].add(e.value() * muj.points()(e.col(), k));
        }
    }
    RowBarycenters<Scalar> out{PointMatrix<Scalar>(n0, d), WeightVector<Scalar>(n0), std::move(only)};
    for (Index n = 0; n < n0; ++n) {
        if (count[static_cast<std::size_t>(n)] != 1) {
            out.only_target[static_cast<std::size_t>(n)] = -1;
        }
        out.row_mass(n) = mass[static_cast<std::size_t>(n)].value();
        for (Index k = 0; k < d; ++k) {
            out.weighted_sum(n, k) = coords[static_cast<std::size_t>(n * d + k)].value();
        }
    }
    return out;
}

} // namespace detail

/// x_hat_n = (1 / p0_n) sum_m gamma_{n,m} xj_m, weights p0. The row sum of a
/// coupling equals p0_n, so the accumulated row mass is used as the divisor.
template <typename Scalar>
ProjectedMeasure<Scalar> ot_barycentric_projection(const DiscreteMeasure<Scalar>& mu0,
                                                   const DiscreteMeasure<Scalar>& muj,
                                                   const TransportPlan<Scalar>& gamma)
{
    detail::require((mu0.weights().array() > Scalar(0)).all(),
                    "OT barycentric projection needs strictly positive reference weights");
    detail::require(is_balanced_coupling(gamma, mu0, muj), "plan is not a coupling of the two measures");
    const auto rows = detail::accumulate_rows(mu0, muj, gamma);
    PointMatrix<Scalar> points(mu0.size(), mu0.dim());
    for (Index n = 0; n < mu0.size(); ++n) {
        points.row(n) = rows.mean(n, muj.points());
    }
    return {DiscreteMeasure<Scalar>(std::move(points), mu0.weights()), Scalar(0)};
}

/// p_hat_n = sum_m gamma_{n,m}; x_hat_n is the gamma-weighted mean target when
/// p_hat_n > 0 and the reference atom otherwise.
template <typename Scalar>
ProjectedMeasure<Scalar> opt_barycentric_projection(const DiscreteMeasure<Scalar>& mu0,
                                                    const DiscreteMeasure<Scalar>& muj,
                                                    const TransportPlan<Scalar>& gamma)
{
    detail::require(is_dominated(gamma, mu0, muj), "plan marginals exceed the measures");
    const auto rows = detail::accumulate_rows(mu0, muj, gamma);
    PointMatrix<Scalar> points(mu0.size(), mu0.dim());
    for (Index n = 0; n < mu0.size(); ++n) {
        if (rows.row_mass(n) > Scalar(0)) {
            points.row(n) = rows.mean(n, muj.points());
        } else {
            points.row(n) = mu0.point(n);
        }
    }
    const Scalar deficit = total_mass(muj) - gamma.total_mass();
    return {DiscreteMeasure<Scalar>(std::move(points), rows.row_mass), deficit};
}

} // namespace lopt
