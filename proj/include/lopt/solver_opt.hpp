#pragma once

#include <cmath>

#include "lopt/measures.hpp"
#include "lopt/network_simplex.hpp"
#include "lopt/solver_ot.hpp"

namespace lopt {

template <typename Scalar>
struct OptSolution
{
    TransportPlan<Scalar> plan; ///< real-to-real entries only
    Scalar cost = Scalar(0);
    Scalar transported_mass = Scalar(0);
    Scalar destroyed_mass = Scalar(0); ///< |mu0| - |gamma_0|
    Scalar created_mass = Scalar(0);   ///< |muj| - |gamma_1|
};

/// Exact optimal partial transport with creation/destruction penalty lambda.
///
/// Reduced to balanced transport: sources gain a dummy of mass |muj|, targets
/// a dummy of mass |mu0|; real-dummy and dummy-real arcs cost lambda and the
/// dummy-dummy arc is free. Dummy rows/columns are discarded afterwards.
template <typename Scalar>
OptSolution<Scalar> solve_opt(const DiscreteMeasure<Scalar>& mu0, const DiscreteMeasure<Scalar>& muj, Scalar lambda)
{
    detail::require(std::isfinite(lambda) && lambda >= Scalar(0), "lambda must be nonnegative");
    detail::require(mu0.dim() == muj.dim(), "measures live in different dimensions");

    const Index n0 = mu0.size();
    const Index n1 = muj.size();
    const Scalar m0 = total_mass(mu0);
    const Scalar m1 = total_mass(muj);

    PointMatrix<Scalar> cost(n0 + 1, n1 + 1);
    cost.topLeftCorner(n0, n1) = squared_distance_matrix(mu0, muj);
    cost.col(n1).setConstant(lambda);
    cost.row(n0).setConstant(lambda);
    cost(n0, n1) = Scalar(0);

    auto supply = quantize_weights(mu0.weights());
    auto demand = quantize_weights(muj.weights());
    std::int64_t q0 = 0, q1 = 0;
    for (auto v : supply) {
        q0 += v;
    }
    for (auto v : demand) {
        q1 += v;
    }
    supply.push_back(q1);
    demand.push_back(q0);

    TransportationSimplex<Scalar> simplex(std::move(cost), std::move(supply), std::move(demand));
    simplex.run();

    WeightVector<Scalar> real_supply(n0 + 1), real_demand(n1 + 1);
    real_supply << mu0.weights(), m1;
    real_demand << muj.weights(), m0;

    std::vector<typename TransportPlan<Scalar>::Entry> entries;
    for (const auto& e : simplex.refined_flows(real_supply, real_demand)) {
        if (e.row() < n0 && e.col() < n1) {
            entries.push_back(e);
        }
    }

    OptSolution<Scalar> out;
    out.plan = TransportPlan<Scalar>(n0, n1, std::move(entries));
    out.transported_mass = out.plan.total_mass();
    out.destroyed_mass = m0 - out.transported_mass;
    out.created_mass = m1 - out.transported_mass;
    out.cost = plan_cost_opt(out.plan, mu0, muj, lambda);
    return out;
}

} // namespace lopt
