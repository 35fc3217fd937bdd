#include <gtest/gtest.h>

#include <cmath>

#include "lopt/experiments.hpp"
#include "lopt/io.hpp"
#include "lopt/lopt.hpp"
#include "lopt/parallel.hpp"

using namespace lopt;
using namespace lopt::experiments;

TEST(GaussianCorpus, MeansOnTheCircle)
{
    const auto c = gaussian_corpus(10, 2, 3);
    ASSERT_EQ(c.measures.size(), 2u);
    EXPECT_NEAR(c.means[0].norm(), std::sqrt(3.0), 1e-15);
    EXPECT_NEAR((c.means[0] + c.means[1]).norm(), 0.0, 1e-15);
    EXPECT_NEAR(c.reference_mean.norm(), 0.0, 1e-15);
    EXPECT_NEAR(total_mass(c.measures[1]), 1.0, 1e-15);
    EXPECT_EQ(c.reference.size(), 10);

    const auto single = gaussian_corpus(5, 1, 3);
    EXPECT_EQ((single.reference_mean - single.means[0]).norm(), 0.0);
}

TEST(GaussianCorpus, DeterministicAndSeedSensitive)
{
    const auto a = gaussian_corpus(20, 3, 11);
    const auto b = gaussian_corpus(20, 3, 11);
    const auto c = gaussian_corpus(20, 3, 12);
    EXPECT_EQ(io::format_measure_csv(a.measures[2]), io::format_measure_csv(b.measures[2]));
    EXPECT_EQ(io::format_measure_csv(a.reference), io::format_measure_csv(b.reference));
    EXPECT_NE(io::format_measure_csv(a.measures[2]), io::format_measure_csv(c.measures[2]));
}

TEST(GaussianPointSet, SampleMomentsAreReasonable)
{
    Eigen::VectorXd mean(2);
    mean << 1.0, -2.0;
    const auto mu = gaussian_point_set(4000, mean, 0.5, 1);
    const Eigen::RowVectorXd m = mu.points().colwise().mean();
    EXPECT_NEAR(m(0), 1.0, 0.05);
    EXPECT_NEAR(m(1), -2.0, 0.05);
    const double var = (mu.points().rowwise() - m).squaredNorm() / (2.0 * 4000);
    EXPECT_NEAR(var, 0.25, 0.03);
}

TEST(UniformNoise, Examples)
{
    const auto mu = gaussian_point_set(100, Eigen::VectorXd::Zero(2), 1.0, 5);
    EXPECT_EQ(io::format_measure_csv(add_uniform_noise(mu, 0.0, 1)), io::format_measure_csv(mu));

    const auto noisy = add_uniform_noise(mu, 0.5, 1);
    ASSERT_EQ(noisy.size(), 150);
    EXPECT_NEAR(total_mass(noisy), 1.5, 1e-12);
    EXPECT_EQ(noisy.weight(120), 0.01);
    EXPECT_EQ(noisy.points().topRows(100), mu.points());
    const auto box = bounding_box(mu);
    for (Index i = 100; i < 150; ++i) {
        EXPECT_TRUE((noisy.point(i).transpose().array() >= box.lo.array()).all());
        EXPECT_TRUE((noisy.point(i).transpose().array() <= box.hi.array()).all());
    }
    EXPECT_EQ(io::format_measure_csv(add_uniform_noise(mu, 0.5, 1)), io::format_measure_csv(noisy));
    EXPECT_EQ(add_uniform_noise(mu, 0.75, 1).size(), 175);
    EXPECT_THROW(add_uniform_noise(mu, -0.1, 1), InputError);
}

TEST(UniformNoise, CustomBox)
{
    const auto mu = gaussian_point_set(10, Eigen::VectorXd::Zero(2), 1.0, 5);
    Box box{Eigen::Vector2d(10, 10), Eigen::Vector2d(11, 12)};
    const auto noisy = add_uniform_noise(mu, 1.0, 2, box);
    for (Index i = 10; i < 20; ++i) {
        EXPECT_GE(noisy.point(i)(0), 10.0);
        EXPECT_LE(noisy.point(i)(1), 12.0);
    }
}

TEST(Records, CsvLayoutAndSorting)
{
    std::vector<ExperimentRecord> rs(2);
    rs[0].method = Method::lopt;
    rs[0].lambda = 5;
    rs[1].method = Method::opt_pairwise;
    rs[1].lambda = 0.5;
    rs[1].value = 0.25;
    sort_records(rs);
    EXPECT_EQ(rs[0].method, Method::opt_pairwise);
    EXPECT_EQ(records_to_csv(rs), "kind,method,n,k,lambda,trial,seed,value,valid_pairs,skipped_pairs\n"
                                  "relative_error,opt_pairwise,0,0,0.5,0,0,0.25,0,0\n"
                                  "relative_error,lopt,0,0,5,0,0,0,0,0\n");
}

TEST(ThresholdAccuracy, BestCutEitherOrientation)
{
    Eigen::VectorXd scores(6);
    scores << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
    EXPECT_DOUBLE_EQ(threshold_accuracy(scores, {0, 0, 0, 1, 1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(threshold_accuracy(scores, {1, 1, 1, 0, 0, 0}), 1.0);
    EXPECT_DOUBLE_EQ(threshold_accuracy(scores, {0, 1, 0, 1, 1, 1}), 5.0 / 6.0);
    Eigen::VectorXd ties = Eigen::VectorXd::Zero(4);
    EXPECT_DOUBLE_EQ(threshold_accuracy(ties, {0, 1, 0, 1}), 0.5);
    EXPECT_THROW(threshold_accuracy(scores, {0, 1}), InputError);
}

TEST(BenchRelativeError, RecordsAreCompleteAndFinite)
{
    const auto rs = bench_relative_error(15, 3, {0.5, 5.0}, 2, 7);
    ASSERT_EQ(rs.size(), 4u);
    for (const auto& r : rs) {
        EXPECT_EQ(r.kind, RecordKind::relative_error);
        EXPECT_EQ(r.valid_pairs + r.skipped_pairs, 3);
        EXPECT_TRUE(std::isfinite(r.value));
        EXPECT_GE(r.value, 0.0);
    }
    const auto again = bench_relative_error(15, 3, {0.5, 5.0}, 2, 7);
    EXPECT_EQ(records_to_csv(rs), records_to_csv(again));
}

TEST(BenchRelativeError, ReferencePairsHaveZeroError)
{
    const auto c = gaussian_corpus(30, 2, 4);
    for (double lambda : {0.5, 5.0}) {
        const auto origin = lopt_embed(c.reference, c.reference, lambda);
        for (const auto& mu : c.measures) {
            const double opt = solve_opt(c.reference, mu, lambda).cost;
            const double lin = lopt_discrepancy(origin, lopt_embed(c.reference, mu, lambda), c.reference, true);
            EXPECT_NEAR(std::abs(opt - lin) / opt, 0.0, 1e-8);
        }
    }
}

TEST(BenchTiming, CountsSolves)
{
    const auto rs = bench_timing(20, 4, 5.0, 1);
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(rs[0].method, Method::opt_pairwise);
    EXPECT_EQ(rs[0].valid_pairs, 6);
    EXPECT_EQ(rs[1].valid_pairs, 4);
    EXPECT_GE(rs[0].value, 0.0);
    EXPECT_GE(rs[1].value, 0.0);
}

TEST(PcaRobustness, SmallConfigurationRuns)
{
    PcaRobustnessConfig config;
    config.measures_per_class = 6;
    config.points = 15;
    config.reference_samples = 4;
    config.reference_iters = 2;
    const auto r = pca_robustness(config);
    EXPECT_EQ(r.labels.size(), 12u);
    EXPECT_EQ(r.lopt_projections.rows(), 12);
    EXPECT_GE(r.lopt_accuracy, 0.5);
    EXPECT_LE(r.lopt_accuracy, 1.0);
}

TEST(ParallelFor, CoversEveryIndexAndRethrows)
{
    std::vector<int> hits(100, 0);
    parallel_for(100, [&](std::size_t i) { hits[i] += 1; }, 4);
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, [](std::size_t i) { if (i == 7) throw InputError("boom"); }, 3), InputError);
}
