#include "lopt/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>
#include <utility>

#include "lopt/analysis.hpp"
#include "lopt/embeddings.hpp"
#include "lopt/io.hpp"
#include "lopt/parallel.hpp"
#include "lopt/random.hpp"
#include "lopt/solver_opt.hpp"

namespace lopt::experiments {

namespace {

constexpr std::uint64_t kReferenceStream = 0xFFFFFFFFull;

std::vector<std::pair<int, int>> all_pairs(int k)
{
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    return pairs;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

Measure gaussian_point_set(int n, const Eigen::VectorXd& mean, double sigma, std::uint64_t seed, double mass)
{
    detail::require(n >= 1, "point count must be >= 1");
    detail::require(sigma >= 0.0, "sigma must be nonnegative");
    CounterRng rng(seed);
    PointMatrix<double> pts(n, mean.size());
    for (int i = 0; i < n; ++i) {
        for (Index k = 0; k < mean.size(); ++k) {
            pts(i, k) = mean(k) + sigma * rng.normal();
        }
    }
    return Measure::uniform(std::move(pts), mass);
}

GaussianCorpus gaussian_corpus(int n, int k, std::uint64_t seed)
{
    detail::require(n >= 1, "n must be >= 1");
    detail::require(k >= 1, "k must be >= 1");
    const CounterRng root(seed);
    const double radius = std::sqrt(3.0);

    std::vector<Eigen::Vector2d> means;
    std::vector<Measure> measures;
    Eigen::Vector2d mean_sum = Eigen::Vector2d::Zero();
    for (int i = 0; i < k; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / k;
        const Eigen::Vector2d m(radius * std::cos(angle), radius * std::sin(angle));
        means.push_back(m);
        mean_sum += m;
        measures.push_back(gaussian_point_set(n, m, 1.0, root.split(static_cast<std::uint64_t>(i)).next_u64()));
    }
    const Eigen::Vector2d reference_mean = mean_sum / k;
    Measure reference = gaussian_point_set(n, reference_mean, 1.0, root.split(kReferenceStream).next_u64());
    return {std::move(measures), std::move(reference), std::move(means), reference_mean};
}

Box bounding_box(const Measure& mu)
{
    return {mu.points().colwise().minCoeff().transpose(), mu.points().colwise().maxCoeff().transpose()};
}

Measure add_uniform_noise(const Measure& input, double eta, std::uint64_t seed, std::optional<Box> box)
{
    detail::require(std::isfinite(eta) && eta >= 0.0, "eta must be nonnegative");
    const Index n = input.size();
    const auto extra = static_cast<Index>(std::ceil(eta * static_cast<double>(n) - 1e-9));
    if (extra <= 0) {
        return input;
    }
    const Box b = box ? *box : bounding_box(input);
    detail::require(b.lo.size() == input.dim() && b.hi.size() == input.dim(), "noise box dimension mismatch");
    detail::require((b.lo.array() <= b.hi.array()).all(), "noise box must satisfy lo <= hi");

    CounterRng rng(seed);
    PointMatrix<double> pts(n + extra, input.dim());
    WeightVector<double> w(n + extra);
    pts.topRows(n) = input.points();
    w.head(n) = input.weights();
    for (Index i = 0; i < extra; ++i) {
        for (Index k = 0; k < input.dim(); ++k) {
            pts(n + i, k) = rng.uniform(b.lo(k), b.hi(k));
        }
        w(n + i) = 1.0 / static_cast<double>(n);
    }
    return Measure(std::move(pts), std::move(w));
}

std::string_view to_string(RecordKind kind)
{
    return kind == RecordKind::relative_error ? "relative_error" : "timing";
}

std::string_view to_string(Method method)
{
    return method == Method::opt_pairwise ? "opt_pairwise" : "lopt";
}

void sort_records(std::vector<ExperimentRecord>& records)
{
    const auto key = [](const ExperimentRecord& r) {
        return std::make_tuple(static_cast<int>(r.kind), static_cast<int>(r.method), r.n, r.k, r.lambda, r.trial,
                               r.seed);
    };
    std::stable_sort(records.begin(), records.end(),
                     [&](const ExperimentRecord& a, const ExperimentRecord& b) { return key(a) < key(b); });
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records)
{
    std::string out = "kind,method,n,k,lambda,trial,seed,value,valid_pairs,skipped_pairs\n";
    for (const auto& r : records) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", to_string(r.kind), to_string(r.method), r.n, r.k,
                           io::format_double(r.lambda), r.trial, r.seed, io::format_double(r.value), r.valid_pairs,
                           r.skipped_pairs);
    }
    return out;
}

std::vector<ExperimentRecord> bench_relative_error(int n, int k, const std::vector<double>& lambdas, int trials,
                                                   std::uint64_t seed)
{
    detail::require(k >= 2, "relative error needs k >= 2");
    detail::require(trials >= 1, "trials must be >= 1");
    detail::require(!lambdas.empty(), "at least one lambda is required");
    const auto pairs = all_pairs(k);
    const CounterRng root(seed);

    std::vector<ExperimentRecord> records;
    for (int trial = 0; trial < trials; ++trial) {
        const auto corpus = gaussian_corpus(n, k, root.split(static_cast<std::uint64_t>(trial)).next_u64());
        for (double lambda : lambdas) {
            std::vector<LoptEmbedding<double>> embeddings(static_cast<std::size_t>(k));
            parallel_for(static_cast<std::size_t>(k), [&](std::size_t i) {
                embeddings[i] = lopt_embed(corpus.reference, corpus.measures[i], lambda);
            });
            std::vector<double> exact(pairs.size());
            parallel_for(pairs.size(), [&](std::size_t p) {
                const auto [i, j] = pairs[p];
                exact[p] = solve_opt(corpus.measures[static_cast<std::size_t>(i)],
                                     corpus.measures[static_cast<std::size_t>(j)], lambda)
                               .cost;
            });

            ExperimentRecord r;
            r.kind = RecordKind::relative_error;
            r.method = Method::lopt;
            r.n = n;
            r.k = k;
            r.lambda = lambda;
            r.trial = trial;
            r.seed = seed;
            double sum = 0.0;
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const auto [i, j] = pairs[p];
                if (exact[p] <= 1e-12) {
                    ++r.skipped_pairs;
                    continue;
                }
                const double approx = lopt_discrepancy(embeddings[static_cast<std::size_t>(i)],
                                                       embeddings[static_cast<std::size_t>(j)], corpus.reference,
                                                       true);
                sum += std::abs(exact[p] - approx) / exact[p];
                ++r.valid_pairs;
            }
            r.value = r.valid_pairs > 0 ? sum / r.valid_pairs : 0.0;
            records.push_back(r);
        }
    }
    sort_records(records);
    return records;
}

std::vector<ExperimentRecord> bench_timing(int n, int k, double lambda, std::uint64_t seed, int repeats)
{
    detail::require(k >= 1, "k must be >= 1");
    detail::require(repeats >= 1, "repeats must be >= 1");
    const auto corpus = gaussian_corpus(n, k, seed);
    const auto pairs = all_pairs(k);

    double best_opt = std::numeric_limits<double>::infinity();
    double best_lopt = std::numeric_limits<double>::infinity();
    double sink = 0.0;
    for (int rep = 0; rep < repeats; ++rep) {
        auto start = std::chrono::steady_clock::now();
        for (const auto& [i, j] : pairs) {
            sink += solve_opt(corpus.measures[static_cast<std::size_t>(i)],
                              corpus.measures[static_cast<std::size_t>(j)], lambda)
                        .cost;
        }
        best_opt = std::min(best_opt, seconds_since(start));

        start = std::chrono::steady_clock::now();
        std::vector<LoptEmbedding<double>> embeddings;
        embeddings.reserve(static_cast<std::size_t>(k));
        for (const auto& mu : corpus.measures) {
            embeddings.push_back(lopt_embed(corpus.reference, mu, lambda));
        }
        for (const auto& [i, j] : pairs) {
            sink += lopt_discrepancy(embeddings[static_cast<std::size_t>(i)], embeddings[static_cast<std::size_t>(j)],
                                     corpus.reference, true);
        }
        best_lopt = std::min(best_lopt, seconds_since(start));
    }
    if (!std::isfinite(sink)) {
        throw NumericalError("non-finite transport cost in timing benchmark");
    }

    ExperimentRecord opt;
    opt.kind = RecordKind::timing;
    opt.method = Method::opt_pairwise;
    opt.n = n;
    opt.k = k;
    opt.lambda = lambda;
    opt.seed = seed;
    opt.value = best_opt;
    opt.valid_pairs = static_cast<int>(pairs.size());

    ExperimentRecord lin = opt;
    lin.method = Method::lopt;
    lin.value = best_lopt;
    lin.valid_pairs = k;

    std::vector<ExperimentRecord> records{opt, lin};
    sort_records(records);
    return records;
}

double threshold_accuracy(const Eigen::VectorXd& scores, const std::vector<int>& labels)
{
    detail::require(static_cast<std::size_t>(scores.size()) == labels.size() && !labels.empty(),
                    "scores and labels must have the same nonzero length");
    std::vector<Index> order(labels.size());
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores(a) < scores(b); });

    const auto total_ones = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
    const auto total = static_cast<int>(labels.size());
    int zeros_left = 0, ones_left = 0;
    int best = std::max(total_ones, total - total_ones);
    for (std::size_t s = 0; s < order.size(); ++s) {
        (labels[static_cast<std::size_t>(order[s])] == 1 ? ones_left : zeros_left)++;
        if (s + 1 < order.size() && scores(order[s]) == scores(order[s + 1])) {
            continue;
        }
        const int ones_right = total_ones - ones_left;
        const int zeros_right = (total - total_ones) - zeros_left;
        best = std::max({best, zeros_left + ones_right, ones_left + zeros_right});
    }
    return static_cast<double>(best) / total;
}

PcaRobustnessResult pca_robustness(const PcaRobustnessConfig& config)
{
    detail::require(config.measures_per_class >= 1 && config.points >= 1, "empty PCA corpus");
    const CounterRng root(config.seed);

    const int total = 2 * config.measures_per_class;
    std::vector<Measure> clean;
    std::vector<int> labels;
    clean.reserve(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) {
        const int label = i % 2;
        clean.push_back(gaussian_point_set(config.points, config.class_means[static_cast<std::size_t>(label)],
                                           config.sigma, root.split(static_cast<std::uint64_t>(i)).split(0).next_u64()));
        labels.push_back(label);
    }
    // Noise covers the bounding box of the whole clean corpus, a shared canvas
    // like the image domain of a digit dataset.
    Box canvas = bounding_box(clean.front());
    for (const auto& mu : clean) {
        const Box b = bounding_box(mu);
        canvas.lo = canvas.lo.cwiseMin(b.lo);
        canvas.hi = canvas.hi.cwiseMax(b.hi);
    }
    std::vector<Measure> noisy;
    noisy.reserve(clean.size());
    for (int i = 0; i < total; ++i) {
        noisy.push_back(add_uniform_noise(clean[static_cast<std::size_t>(i)], config.eta,
                                          root.split(static_cast<std::uint64_t>(i)).split(1).next_u64(), canvas));
    }

    std::vector<Measure> clean_samples;
    for (int i = 0; i < config.reference_samples; ++i) {
        const int label = i % 2;
        clean_samples.push_back(gaussian_point_set(config.points,
                                                   config.class_means[static_cast<std::size_t>(label)], config.sigma,
                                                   root.split(kReferenceStream).split(static_cast<std::uint64_t>(i)).next_u64()));
    }
    const Measure reference = ot_barycenter<double>(clean_samples, config.points, config.reference_iters,
                                                    root.split(kReferenceStream + 1).next_u64());

    const Index dim = reference.size() * reference.dim();
    PointMatrix<double> lopt_vectors(total, dim);
    PointMatrix<double> lot_vectors(total, dim);
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t i) {
        const auto& mu = noisy[i];
        const auto row = static_cast<Index>(i);
        lopt_vectors.row(row) = flatten_embedding(lopt_embed(reference, mu, config.lambda).u);
        const Measure normalized = mu.scaled(1.0 / total_mass(mu));
        lot_vectors.row(row) = flatten_embedding(lot_embed(reference, normalized).u);
    });

    const auto lopt_pca = pca(lopt_vectors, reference.weights(), 2);
    const auto lot_pca = pca(lot_vectors, reference.weights(), 2);

    PcaRobustnessResult out;
    out.labels = labels;
    out.lopt_projections = lopt_pca.projections;
    out.lot_projections = lot_pca.projections;
    out.lopt_accuracy = threshold_accuracy(lopt_pca.projections.col(0), labels);
    out.lot_accuracy = threshold_accuracy(lot_pca.projections.col(0), labels);
    return out;
}

} // namespace lopt::experiments
