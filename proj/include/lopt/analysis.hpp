#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "lopt/measures.hpp"
#include "lopt/projections.hpp"
#include "lopt/random.hpp"
#include "lopt/solver_ot.hpp"

namespace lopt {

/// Free-support barycenter by fixed-point iteration.
///
/// The support is initialised from a seeded subsample (without replacement)
/// of the pooled positive-weight atoms and carries uniform weights summing to
/// the common input mass. Each iteration projects every input onto the current
/// support and moves each support point to the mean of its projections. When
/// `objective` is given it receives sum_i OT(support_k, mu^i) for k = 0..iters.
template <typename Scalar>
DiscreteMeasure<Scalar> ot_barycenter(std::span<const DiscreteMeasure<Scalar>> measures,
                                      Index support_size,
                                      int iters,
                                      std::uint64_t seed,
                                      std::vector<Scalar>* objective = nullptr)
{
    detail::require(!measures.empty(), "barycenter needs at least one measure");
    detail::require(support_size >= 1, "support size must be >= 1");
    detail::require(iters >= 1, "iteration count must be >= 1");
    const Index d = measures.front().dim();
    const Scalar mass = total_mass(measures.front());
    detail::require(mass > Scalar(0), "barycenter inputs need positive mass");
    for (const auto& mu : measures) {
        detail::require(mu.dim() == d, "barycenter inputs live in different dimensions");
        detail::require(std::abs(total_mass(mu) - mass) <= Scalar(kMassTolerance) * std::max(mass, Scalar(1)),
                        "barycenter inputs must share the same total mass");
    }

    std::vector<std::pair<std::size_t, Index>> pool;
    for (std::size_t i = 0; i < measures.size(); ++i) {
        for (Index n = 0; n < measures[i].size(); ++n) {
            if (measures[i].weight(n) > Scalar(0)) {
                pool.emplace_back(i, n);
            }
        }
    }
    detail::require(static_cast<Index>(pool.size()) >= support_size,
                    "support size exceeds the number of pooled atoms");

    CounterRng rng(seed);
    for (Index s = 0; s < support_size; ++s) {
        const auto pick = static_cast<std::size_t>(s) + rng.below(pool.size() - static_cast<std::size_t>(s));
        std::swap(pool[static_cast<std::size_t>(s)], pool[pick]);
    }
    PointMatrix<Scalar> support(support_size, d);
    for (Index s = 0; s < support_size; ++s) {
        const auto [i, n] = pool[static_cast<std::size_t>(s)];
        support.row(s) = measures[i].point(n);
    }
    const WeightVector<Scalar> weights = WeightVector<Scalar>::Constant(support_size, mass / Scalar(support_size));

    if (objective) {
        objective->clear();
    }
    const Scalar inv_k = Scalar(1) / Scalar(measures.size());
    for (int it = 0; it < iters; ++it) {
        const DiscreteMeasure<Scalar> current(support, weights);
        PointMatrix<Scalar> next = PointMatrix<Scalar>::Zero(support_size, d);
        Scalar total = Scalar(0);
        for (const auto& mu : measures) {
            const auto sol = solve_ot(current, mu);
            total += sol.cost;
            next += ot_barycentric_projection(current, mu, sol.plan).measure.points();
        }
        if (objective) {
            objective->push_back(total);
        }
        support = next * inv_k;
    }
    DiscreteMeasure<Scalar> result(std::move(support), weights);
    if (objective) {
        Scalar total = Scalar(0);
        for (const auto& mu : measures) {
            total += solve_ot(result, mu).cost;
        }
        objective->push_back(total);
    }
    return result;
}

template <typename Scalar>
struct PcaResult
{
    PointMatrix<Scalar> components;         ///< C x D, orthonormal rows
    PointMatrix<Scalar> projections;        ///< K x C
    WeightVector<Scalar> explained_variance; ///< length C, nonincreasing
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> mean; ///< mean of the scaled vectors
};

/// PCA over flattened embeddings (one row per measure, atom-major layout,
/// d = D / N0 coordinates per atom). Each atom block is scaled by sqrt(w_n)
/// before centering so that Euclidean geometry matches the w-weighted norm.
/// Each component is signed so its largest-magnitude entry is positive.
template <typename Scalar>
PcaResult<Scalar> pca(const PointMatrix<Scalar>& vectors, const WeightVector<Scalar>& weights, Index components)
{
    const Index k = vectors.rows();
    const Index dim = vectors.cols();
    const Index atoms = weights.size();
    detail::require(k >= 1 && dim >= 1, "pca needs at least one non-empty vector");
    detail::require(atoms >= 1 && dim % atoms == 0, "vector length must be a multiple of the weight count");
    detail::require((weights.array() >= Scalar(0)).all(), "weights must be nonnegative");
    detail::require(components >= 1 && components <= std::min(k, dim), "too many components requested");
    const Index d = dim / atoms;

    PointMatrix<Scalar> x = vectors;
    for (Index n = 0; n < atoms; ++n) {
        x.middleCols(n * d, d) *= std::sqrt(weights(n));
    }
    PcaResult<Scalar> out;
    out.mean = x.colwise().mean();
    x.rowwise() -= out.mean;

    const Scalar denom = Scalar(std::max<Index>(k - 1, 1));
    const PointMatrix<Scalar> cov = (x.transpose() * x) / denom;
    Eigen::SelfAdjointEigenSolver<PointMatrix<Scalar>> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("covariance eigendecomposition failed");
    }

    out.components.resize(components, dim);
    out.explained_variance.resize(components);
    for (Index c = 0; c < components; ++c) {
        const Index col = dim - 1 - c; // eigenvalues ascend
        auto v = eig.eigenvectors().col(col);
        Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        const Scalar sign = v(arg) < Scalar(0) ? Scalar(-1) : Scalar(1);
        out.components.row(c) = sign * v.transpose();
        out.explained_variance(c) = std::max(eig.eigenvalues()(col), Scalar(0));
    }
    out.projections = x * out.components.transpose();
    return out;
}

} // namespace lopt
