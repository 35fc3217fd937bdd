#pragma once

#include <algorithm>
#include <cmath>

#include "lopt/measures.hpp"
#include "lopt/network_simplex.hpp"

namespace lopt {

template <typename Scalar>
struct OtSolution
{
    TransportPlan<Scalar> plan;
    Scalar cost = Scalar(0);
};

/// Dense squared-Euclidean cost matrix between the supports.
template <typename Scalar>
PointMatrix<Scalar> squared_distance_matrix(const DiscreteMeasure<Scalar>& mu0, const DiscreteMeasure<Scalar>& muj)
{
    detail::require(mu0.dim() == muj.dim(), "measures live in different dimensions");
    PointMatrix<Scalar> c(mu0.size(), muj.size());
    for (Index n = 0; n < mu0.size(); ++n) {
        for (Index m = 0; m < muj.size(); ++m) {
            c(n, m) = squared_distance(mu0, n, muj, m);
        }
    }
    return c;
}

/// Exact balanced optimal transport for the squared Euclidean cost.
template <typename Scalar>
OtSolution<Scalar> solve_ot(const DiscreteMeasure<Scalar>& mu0, const DiscreteMeasure<Scalar>& muj)
{
    detail::require(mu0.dim() == muj.dim(), "measures live in different dimensions");
    const Scalar m0 = total_mass(mu0);
    const Scalar m1 = total_mass(muj);
    detail::require(m0 > Scalar(0) && m1 > Scalar(0), "balanced transport needs positive total mass");
    const Scalar scale = std::max({m0, m1, Scalar(1)});
    detail::require(std::abs(m0 - m1) <= Scalar(kMassTolerance) * scale,
                    "balanced transport needs equal total masses");

    auto supply = quantize_weights(mu0.weights());
    auto demand = quantize_weights(muj.weights());
    const auto target = std::llround(static_cast<double>(m0) * kQuantizationScale);
    rebalance_quantized(supply, target);
    rebalance_quantized(demand, target);

    TransportationSimplex<Scalar> simplex(squared_distance_matrix(mu0, muj), std::move(supply), std::move(demand));
    simplex.run();

    OtSolution<Scalar> out;
    out.plan = TransportPlan<Scalar>(mu0.size(), muj.size(), simplex.refined_flows(mu0.weights(), muj.weights()));
    out.cost = plan_cost_ot(out.plan, mu0, muj);
    return out;
}

} // namespace lopt
