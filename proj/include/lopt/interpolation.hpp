#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lopt/embeddings.hpp"
#include "lopt/measures.hpp"
#include "lopt/projections.hpp"
#include "lopt/solver_opt.hpp"
#include "lopt/solver_ot.hpp"

namespace lopt {

enum class InterpolationMode { ot_geodesic, lot_geodesic, opt_interp, lopt_interp };

inline std::string_view to_string(InterpolationMode mode)
{
    switch (mode) {
    case InterpolationMode::ot_geodesic: return "ot_geodesic";
    case InterpolationMode::lot_geodesic: return "lot_geodesic";
    case InterpolationMode::opt_interp: return "opt_interp";
    case InterpolationMode::lopt_interp: return "lopt_interp";
    }
    return "unknown";
}

inline InterpolationMode parse_interpolation_mode(std::string_view name)
{
    if (name == "ot_geodesic" || name == "ot") return InterpolationMode::ot_geodesic;
    if (name == "lot_geodesic" || name == "lot") return InterpolationMode::lot_geodesic;
    if (name == "opt_interp" || name == "opt") return InterpolationMode::opt_interp;
    if (name == "lopt_interp" || name == "lopt") return InterpolationMode::lopt_interp;
    throw InputError("unknown interpolation mode: " + std::string(name));
}

inline bool is_partial(InterpolationMode mode)
{
    return mode == InterpolationMode::opt_interp || mode == InterpolationMode::lopt_interp;
}

inline bool needs_reference(InterpolationMode mode)
{
    return mode == InterpolationMode::lot_geodesic || mode == InterpolationMode::lopt_interp;
}

struct InterpolationRequest
{
    InterpolationMode mode = InterpolationMode::ot_geodesic;
    double t = 0.0;
    std::optional<double> lambda;

    void validate() const
    {
        detail::require(t >= 0.0 && t <= 1.0, "t must lie in [0, 1]");
        if (is_partial(mode)) {
            detail::require(lambda.has_value(), "partial interpolation needs lambda");
            detail::require(*lambda >= 0.0, "lambda must be nonnegative");
        }
    }
};

namespace detail {

template <typename Scalar>
void require_unit_interval(Scalar t)
{
    require(t >= Scalar(0) && t <= Scalar(1), "t must lie in [0, 1]");
}

/// Atom-wise (1 - t) a + t b.
template <typename Scalar>
PointMatrix<Scalar> lerp_rows(const PointMatrix<Scalar>& a, const PointMatrix<Scalar>& b, Scalar t)
{
    return (Scalar(1) - t) * a + t * b;
}

} // namespace detail

/// Geodesic pushed along the barycentric map x_n -> x_hat_n of an optimal
/// coupling. Evaluates every t against a single OT solve.
template <typename Scalar>
std::vector<DiscreteMeasure<Scalar>> ot_geodesic(const DiscreteMeasure<Scalar>& mui,
                                                 const DiscreteMeasure<Scalar>& muj,
                                                 std::span<const Scalar> ts)
{
    for (Scalar t : ts) {
        detail::require_unit_interval(t);
    }
    const auto projected = ot_barycentric_projection(mui, muj, solve_ot(mui, muj).plan);
    std::vector<DiscreteMeasure<Scalar>> out;
    out.reserve(ts.size());
    for (Scalar t : ts) {
        out.emplace_back(detail::lerp_rows(mui.points(), projected.measure.points(), t), mui.weights());
    }
    return out;
}

template <typename Scalar>
DiscreteMeasure<Scalar> ot_geodesic(const DiscreteMeasure<Scalar>& mui, const DiscreteMeasure<Scalar>& muj, Scalar t)
{
    return ot_geodesic(mui, muj, std::span<const Scalar>(&t, 1)).front();
}

/// Atoms x0_n + (1 - t) u^i_n + t u^j_n with reference weights.
template <typename Scalar>
DiscreteMeasure<Scalar> lot_geodesic(const LotEmbedding<Scalar>& a, const LotEmbedding<Scalar>& b,
                                     const DiscreteMeasure<Scalar>& reference, Scalar t)
{
    detail::require_unit_interval(t);
    detail::require(a.reference == b.reference, "embeddings use different references");
    detail::require(a.u.cols() == b.u.cols() && a.u.cols() == reference.dim(), "embedding dimensions differ");
    detail::require_reference(a.reference, reference, a.u.rows());
    return DiscreteMeasure<Scalar>(reference.points() + detail::lerp_rows(a.u, b.u, t), reference.weights());
}

/// Partial interpolant pivoting on mui: transported atoms move linearly with
/// weight p_hat_n, destroyed mass (p_n - p_hat_n) fades out in place. Atom
/// layout is fixed: first the N_i moving atoms, then the N_i fading atoms.
template <typename Scalar>
std::vector<DiscreteMeasure<Scalar>> opt_interpolate(const DiscreteMeasure<Scalar>& mui,
                                                     const DiscreteMeasure<Scalar>& muj,
                                                     Scalar lambda,
                                                     std::span<const Scalar> ts)
{
    detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
    for (Scalar t : ts) {
        detail::require_unit_interval(t);
    }
    const auto projected = opt_barycentric_projection(mui, muj, solve_opt(mui, muj, lambda).plan);
    const auto& p_hat = projected.measure.weights();
    const WeightVector<Scalar> destroyed = (mui.weights() - p_hat).cwiseMax(Scalar(0));
    const Index n = mui.size();

    std::vector<DiscreteMeasure<Scalar>> out;
    out.reserve(ts.size());
    for (Scalar t : ts) {
        PointMatrix<Scalar> pts(2 * n, mui.dim());
        WeightVector<Scalar> w(2 * n);
        pts.topRows(n) = detail::lerp_rows(mui.points(), projected.measure.points(), t);
        pts.bottomRows(n) = mui.points();
        w.head(n) = p_hat;
        w.tail(n) = (Scalar(1) - t) * destroyed;
        out.emplace_back(std::move(pts), std::move(w));
    }
    return out;
}

template <typename Scalar>
DiscreteMeasure<Scalar> opt_interpolate(const DiscreteMeasure<Scalar>& mui, const DiscreteMeasure<Scalar>& muj,
                                        Scalar lambda, Scalar t)
{
    return opt_interpolate(mui, muj, lambda, std::span<const Scalar>(&t, 1)).front();
}

/// LOPT interpolating curve; pure arithmetic on the two embeddings.
///
/// With p_ij = min(p_hat^i, p_hat^j): transported atoms x0_k + u_t(k) carry
/// p_ij_k (k in D_T), destroyed atoms x0_k + u^i_k carry (1-t)(p_hat^i_k - p_ij_k)
/// (k in D_D), created atoms x0_k + u^j_k carry t(p_hat^j_k - p_ij_k) (k in D_C).
/// The index sets do not depend on t, so the atom count is constant along the curve.
template <typename Scalar>
DiscreteMeasure<Scalar> lopt_interpolate(const LoptEmbedding<Scalar>& a, const LoptEmbedding<Scalar>& b,
                                         const DiscreteMeasure<Scalar>& reference, Scalar t)
{
    detail::require_unit_interval(t);
    detail::require_compatible(a, b, reference);
    detail::require(a.u.cols() == reference.dim(), "embedding dimension does not match the reference");

    const WeightVector<Scalar> common = a.p_hat.cwiseMin(b.p_hat);
    std::vector<Index> transport, destroy, create;
    for (Index k = 0; k < reference.size(); ++k) {
        if (common(k) > Scalar(0)) {
            transport.push_back(k);
        }
        if (a.p_hat(k) > common(k)) {
            destroy.push_back(k);
        }
        if (b.p_hat(k) > common(k)) {
            create.push_back(k);
        }
    }
    Index total = static_cast<Index>(transport.size() + destroy.size() + create.size());
    if (total == 0) {
        // Both projections are massless; keep a single zero-weight atom per reference atom.
        return DiscreteMeasure<Scalar>(reference.points(), WeightVector<Scalar>::Zero(reference.size()));
    }

    PointMatrix<Scalar> pts(total, reference.dim());
    WeightVector<Scalar> w(total);
    Index row = 0;
    for (Index k : transport) {
        pts.row(row) = reference.point(k) + (Scalar(1) - t) * a.u.row(k) + t * b.u.row(k);
        w(row++) = common(k);
    }
    for (Index k : destroy) {
        pts.row(row) = reference.point(k) + a.u.row(k);
        w(row++) = (Scalar(1) - t) * (a.p_hat(k) - common(k));
    }
    for (Index k : create) {
        pts.row(row) = reference.point(k) + b.u.row(k);
        w(row++) = t * (b.p_hat(k) - common(k));
    }
    return DiscreteMeasure<Scalar>(std::move(pts), std::move(w));
}

} // namespace lopt
