#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>

#include "lopt/measures.hpp"
#include "lopt/projections.hpp"
#include "lopt/solver_opt.hpp"
#include "lopt/solver_ot.hpp"

namespace lopt {

/// Identity token of a reference measure (FNV-1a over its shape, coordinates
/// and weights). Embeddings built against different references never mix.
struct ReferenceId
{
    std::uint64_t value = 0;

    friend bool operator==(const ReferenceId&, const ReferenceId&) = default;

    std::string hex() const
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s(16, '0');
        for (int i = 0; i < 16; ++i) {
            s[15 - i] = digits[(value >> (4 * i)) & 0xF];
        }
        return s;
    }

    static ReferenceId from_hex(const std::string& s)
    {
        detail::require(s.size() == 16, "reference hash must be 16 hex digits");
        ReferenceId id;
        for (char c : s) {
            std::uint64_t nibble = 0;
            if (c >= '0' && c <= '9') {
                nibble = static_cast<std::uint64_t>(c - '0');
            } else if (c >= 'a' && c <= 'f') {
                nibble = static_cast<std::uint64_t>(c - 'a' + 10);
            } else {
                throw InputError("reference hash must be lowercase hex");
            }
            id.value = (id.value << 4) | nibble;
        }
        return id;
    }
};

template <typename Scalar>
ReferenceId reference_id(const DiscreteMeasure<Scalar>& reference)
{
    std::uint64_t h = 14695981039346656037ull;
    const auto mix = [&h](std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            h ^= (word >> (8 * b)) & 0xFF;
            h *= 1099511628211ull;
        }
    };
    const auto mix_value = [&mix](Scalar v) {
        double d = static_cast<double>(v);
        if (d == 0.0) {
            d = 0.0; // fold -0 into +0
        }
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof bits);
        mix(bits);
    };
    mix(static_cast<std::uint64_t>(reference.size()));
    mix(static_cast<std::uint64_t>(reference.dim()));
    for (Index n = 0; n < reference.size(); ++n) {
        for (Index k = 0; k < reference.dim(); ++k) {
            mix_value(reference.points()(n, k));
        }
        mix_value(reference.weight(n));
    }
    return {h};
}

/// Displacements u_n = x_hat_n - x0_n of the OT barycentric projection.
template <typename Scalar>
struct LotEmbedding
{
    PointMatrix<Scalar> u;
    ReferenceId reference;
};

/// (u, p_hat, deficit) of the OPT barycentric projection. p_hat_n = 0 forces u_n = 0.
template <typename Scalar>
struct LoptEmbedding
{
    PointMatrix<Scalar> u;
    WeightVector<Scalar> p_hat;
    Scalar deficit = Scalar(0);
    Scalar lambda = Scalar(0);
    ReferenceId reference;
};

namespace detail {

template <typename Scalar>
void require_reference(const ReferenceId& id, const DiscreteMeasure<Scalar>& reference, Index rows)
{
    require(rows == reference.size(), "embedding row count does not match the reference");
    require(id == reference_id(reference), "embedding was built against a different reference");
}

template <typename Scalar>
void require_compatible(const LoptEmbedding<Scalar>& a, const LoptEmbedding<Scalar>& b,
                        const DiscreteMeasure<Scalar>& reference)
{
    require(a.reference == b.reference, "embeddings use different references");
    require(a.lambda == b.lambda, "embeddings use different lambda");
    require(a.u.cols() == b.u.cols(), "embedding dimensions differ");
    require_reference(a.reference, reference, a.u.rows());
    require(a.p_hat.size() == reference.size() && b.p_hat.size() == reference.size(),
            "p_hat length does not match the reference");
}

} // namespace detail

/// LOT embedding from a caller-supplied optimal coupling.
template <typename Scalar>
LotEmbedding<Scalar> lot_embed_with_plan(const DiscreteMeasure<Scalar>& reference,
                                         const DiscreteMeasure<Scalar>& target,
                                         const TransportPlan<Scalar>& gamma)
{
    const auto projected = ot_barycentric_projection(reference, target, gamma);
    return {projected.measure.points() - reference.points(), reference_id(reference)};
}

template <typename Scalar>
LotEmbedding<Scalar> lot_embed(const DiscreteMeasure<Scalar>& reference, const DiscreteMeasure<Scalar>& target)
{
    detail::require((reference.weights().array() > Scalar(0)).all(),
                    "LOT reference weights must be strictly positive");
    return lot_embed_with_plan(reference, target, solve_ot(reference, target).plan);
}

/// LOPT embedding from a caller-supplied optimal partial plan.
template <typename Scalar>
LoptEmbedding<Scalar> lopt_embed_with_plan(const DiscreteMeasure<Scalar>& reference,
                                           const DiscreteMeasure<Scalar>& target,
                                           const TransportPlan<Scalar>& gamma,
                                           Scalar lambda)
{
    detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
    const auto projected = opt_barycentric_projection(reference, target, gamma);
    LoptEmbedding<Scalar> e;
    e.u = projected.measure.points() - reference.points();
    e.p_hat = projected.measure.weights();
    e.deficit = projected.deficit;
    e.lambda = lambda;
    e.reference = reference_id(reference);
    for (Index n = 0; n < e.p_hat.size(); ++n) {
        if (e.p_hat(n) == Scalar(0)) {
            e.u.row(n).setZero();
        }
    }
    return e;
}

template <typename Scalar>
LoptEmbedding<Scalar> lopt_embed(const DiscreteMeasure<Scalar>& reference,
                                 const DiscreteMeasure<Scalar>& target,
                                 Scalar lambda)
{
    detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
    return lopt_embed_with_plan(reference, target, solve_opt(reference, target, lambda).plan, lambda);
}

/// sum_n |u^i_n - u^j_n|^2 p0_n
template <typename Scalar>
Scalar lot_discrepancy(const LotEmbedding<Scalar>& a, const LotEmbedding<Scalar>& b,
                       const DiscreteMeasure<Scalar>& reference)
{
    detail::require(a.reference == b.reference, "embeddings use different references");
    detail::require(a.u.cols() == b.u.cols(), "embedding dimensions differ");
    detail::require_reference(a.reference, reference, a.u.rows());
    return weighted_norm_sq(a.u - b.u, reference.weights());
}

/// |u^i - u^j|^2 over p_hat^i ^ p_hat^j truncated at 2 lambda,
/// + lambda |p_hat^i - p_hat^j|_1, + lambda (deficit_i + deficit_j) when
/// include_deficit is set.
template <typename Scalar>
Scalar lopt_discrepancy(const LoptEmbedding<Scalar>& a, const LoptEmbedding<Scalar>& b,
                        const DiscreteMeasure<Scalar>& reference, bool include_deficit = false)
{
    detail::require_compatible(a, b, reference);
    const WeightVector<Scalar> common = a.p_hat.cwiseMin(b.p_hat);
    const Scalar transported = truncated_norm_sq(a.u - b.u, common, Scalar(2) * a.lambda);
    CompensatedSum<Scalar> mass_gap;
    for (Index n = 0; n < common.size(); ++n) {
        mass_gap.add(std::abs(a.p_hat(n) - b.p_hat(n)));
    }
    Scalar value = transported + a.lambda * mass_gap.value();
    if (include_deficit) {
        value += a.lambda * (a.deficit + b.deficit);
    }
    return value;
}

/// Atom-major flattening [u_0, u_1, ...] of a displacement field.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> flatten_embedding(const PointMatrix<Scalar>& u)
{
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> flat(u.size());
    for (Index n = 0; n < u.rows(); ++n) {
        flat.segment(n * u.cols(), u.cols()) = u.row(n);
    }
    return flat;
}

} // namespace lopt
