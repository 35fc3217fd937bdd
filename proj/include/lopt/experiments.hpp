#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lopt/measures.hpp"

namespace lopt::experiments {

/// K unit-mass point sets sampled from N(m^i, I) in R^2 with means equally
/// spaced on the circle of radius sqrt(3), plus an N-point reference from
/// N(mean of m^i, I).
struct GaussianCorpus
{
    std::vector<Measure> measures;
    Measure reference;
    std::vector<Eigen::Vector2d> means;
    Eigen::Vector2d reference_mean;
};

GaussianCorpus gaussian_corpus(int n, int k, std::uint64_t seed);

/// N points from N(mean, sigma^2 I) with uniform weights summing to `mass`.
Measure gaussian_point_set(int n, const Eigen::VectorXd& mean, double sigma, std::uint64_t seed, double mass = 1.0);

/// Axis-aligned box [lo, hi] per coordinate.
struct Box
{
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

Box bounding_box(const Measure& mu);

/// Appends ceil(eta * N) atoms drawn uniformly from `box` (the input's bounding
/// box by default), each of weight 1/N. Input atoms are untouched.
Measure add_uniform_noise(const Measure& input, double eta, std::uint64_t seed, std::optional<Box> box = std::nullopt);

enum class RecordKind { relative_error, timing };
enum class Method { opt_pairwise, lopt };

std::string_view to_string(RecordKind kind);
std::string_view to_string(Method method);

struct ExperimentRecord
{
    RecordKind kind = RecordKind::relative_error;
    Method method = Method::lopt;
    int n = 0;
    int k = 0;
    double lambda = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    double value = 0.0;      ///< mean relative error (dimensionless) or seconds
    int valid_pairs = 0;     ///< pairs entering the mean (relative error) or OPT solves (timing)
    int skipped_pairs = 0;   ///< pairs with OPT = 0, excluded from the mean
};

/// Sorts records by (kind, method, n, k, lambda, trial, seed).
void sort_records(std::vector<ExperimentRecord>& records);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);

/// Mean relative error |OPT - LOPT| / OPT over all pairs of a fresh Gaussian
/// corpus per trial, for every lambda. LOPT includes the deficit correction.
std::vector<ExperimentRecord> bench_relative_error(int n, int k, const std::vector<double>& lambdas, int trials,
                                                   std::uint64_t seed);

/// Wall clock of all pairwise OPT solves vs K LOPT embeddings plus all
/// pairwise LOPT evaluations on one Gaussian corpus. Runs single-threaded;
/// each method reports the fastest of `repeats` runs.
std::vector<ExperimentRecord> bench_timing(int n, int k, double lambda, std::uint64_t seed, int repeats = 1);

/// Accuracy of the best single threshold on `scores` separating labels 0/1
/// (either orientation).
double threshold_accuracy(const Eigen::VectorXd& scores, const std::vector<int>& labels);

struct PcaRobustnessConfig
{
    int measures_per_class = 50;
    int points = 60;
    double eta = 0.75;
    double lambda = 1.0;
    std::array<Eigen::Vector2d, 2> class_means{Eigen::Vector2d(-1.5, 0.0), Eigen::Vector2d(1.5, 0.0)};
    double sigma = 1.0;
    int reference_samples = 30;
    int reference_iters = 10;
    std::uint64_t seed = 0;
};

struct PcaRobustnessResult
{
    double lopt_accuracy = 0.0;
    double lot_accuracy = 0.0;
    Eigen::MatrixXd lopt_projections; ///< rows: measures, cols: pc1, pc2
    Eigen::MatrixXd lot_projections;
    std::vector<int> labels;
};

/// Two Gaussian classes with uniform noise of mass eta drawn over the bounding
/// box of the whole clean corpus. LOPT embeds the noisy
/// measures as-is, LOT embeds them renormalized to unit mass; both use an OT
/// barycenter of clean samples as reference and classify by a threshold on
/// their first principal component.
PcaRobustnessResult pca_robustness(const PcaRobustnessConfig& config);

} // namespace lopt::experiments
