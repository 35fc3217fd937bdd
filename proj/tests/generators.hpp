#pragma once

// Random instance generators shared by the unit tests and the acceptance run.

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "lopt/lopt.hpp"

namespace lopt::testing {

inline PointMatrix<double> random_points(CounterRng& rng, Index n, Index d, double lo, double hi)
{
    PointMatrix<double> p(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < d; ++k) {
            p(i, k) = rng.uniform(lo, hi);
        }
    }
    return p;
}

/// Spreads `units` (>= n) over n atoms, each atom getting at least one.
inline std::vector<int> random_partition(CounterRng& rng, int units, int n)
{
    std::vector<int> parts(static_cast<std::size_t>(n), 1);
    for (int u = n; u < units; ++u) {
        ++parts[rng.below(static_cast<std::uint64_t>(n))];
    }
    return parts;
}

inline Measure unit_measure(CounterRng& rng, const std::vector<int>& parts, double unit, Index d, double lo, double hi)
{
    const auto n = static_cast<Index>(parts.size());
    WeightVector<double> w(n);
    for (Index i = 0; i < n; ++i) {
        w(i) = unit * parts[static_cast<std::size_t>(i)];
    }
    return Measure(random_points(rng, n, d, lo, hi), w);
}

struct Pair
{
    Measure a;
    Measure b;
};

/// Balanced instance in [0,1]^2 with at most 7 atoms per side. Even seeds give
/// equal-size uniform measures, odd seeds integer-unit weights (<= 12 units).
inline Pair random_ot_pair(std::uint64_t seed)
{
    CounterRng rng(seed);
    if (seed % 2 == 0) {
        const auto n = static_cast<Index>(1 + rng.below(7));
        return {Measure::uniform(random_points(rng, n, 2, 0.0, 1.0)),
                Measure::uniform(random_points(rng, n, 2, 0.0, 1.0))};
    }
    const int units = 2 + static_cast<int>(rng.below(11));
    const int n0 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(units, 7))));
    const int n1 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(units, 7))));
    const double unit = 1.0 / units;
    auto a = unit_measure(rng, random_partition(rng, units, n0), unit, 2, 0.0, 1.0);
    auto b = unit_measure(rng, random_partition(rng, units, n1), unit, 2, 0.0, 1.0);
    return {std::move(a), std::move(b)};
}

/// Unbalanced instance in [0,3]^2 with integer-unit weights and at most
/// `max_units` units over both measures.
inline Pair random_opt_pair(std::uint64_t seed, int max_units = 10)
{
    CounterRng rng(seed);
    const double unit = (rng.below(2) == 0) ? 0.1 : 1.0;
    const int u0 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_units - 1)));
    const int u1 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_units - u0)));
    const int n0 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(u0, 4))));
    const int n1 = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(u1, 4))));
    auto a = unit_measure(rng, random_partition(rng, u0, n0), unit, 2, 0.0, 3.0);
    auto b = unit_measure(rng, random_partition(rng, u1, n1), unit, 2, 0.0, 3.0);
    return {std::move(a), std::move(b)};
}

/// Measures whose atoms all carry the same weight. Optimal partial plans
/// are then partial permutations, hence map-induced.
inline Measure equal_atom_measure(CounterRng& rng, Index n, double atom_weight, double lo, double hi)
{
    return Measure(random_points(rng, n, 2, lo, hi), WeightVector<double>::Constant(n, atom_weight));
}

/// Canonical form for comparing measures regardless of atom order.
inline Measure canonical(const Measure& mu)
{
    return merge_coincident(mu, 0.0);
}

} // namespace lopt::testing
