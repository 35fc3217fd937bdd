#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "lopt/lopt.hpp"

using namespace lopt;
using lopt::testing::random_opt_pair;

namespace {

Measure singleton(double x, double y, double w = 1.0)
{
    PointMatrix<double> p(1, 2);
    p << x, y;
    return Measure(p, WeightVector<double>::Constant(1, w));
}

constexpr double kLambdas[] = {0.0, 0.1, 1.0, 5.0, 50.0};

double min_separation(const Measure& a, const Measure& b, const OptSolution<double>& sol)
{
    const auto row = sol.plan.source_marginal();
    const auto col = sol.plan.target_marginal();
    double best = std::numeric_limits<double>::infinity();
    for (Index n = 0; n < a.size(); ++n) {
        if (a.weight(n) - row(n) <= 1e-9) continue;
        for (Index m = 0; m < b.size(); ++m) {
            if (b.weight(m) - col(m) <= 1e-9) continue;
            best = std::min(best, std::sqrt(squared_distance(a, n, b, m)));
        }
    }
    return best;
}

} // namespace

TEST(SolveOpt, IdenticalMeasuresTransportEverything)
{
    CounterRng rng(3);
    const auto mu = Measure::uniform(lopt::testing::random_points(rng, 5, 2, 0, 1));
    const auto sol = solve_opt(mu, mu, 0.5);
    EXPECT_NEAR(sol.cost, 0.0, 1e-15);
    EXPECT_NEAR(sol.transported_mass, 1.0, 1e-12);
}

TEST(SolveOpt, DestroyAndCreateWhenCheaper)
{
    const auto sol = solve_opt(singleton(0, 0), singleton(2, 0), 1.0);
    EXPECT_NEAR(sol.cost, 2.0, 1e-12);
    EXPECT_NEAR(sol.transported_mass, 0.0, 1e-12);
    EXPECT_TRUE(sol.plan.entries.empty());
}

TEST(SolveOpt, TransportWhenCheaper)
{
    const auto sol = solve_opt(singleton(0, 0), singleton(2, 0), 3.0);
    EXPECT_NEAR(sol.cost, 4.0, 1e-12);
    EXPECT_NEAR(sol.transported_mass, 1.0, 1e-12);
}

TEST(SolveOpt, RejectsNegativeLambda)
{
    EXPECT_THROW(solve_opt(singleton(0, 0), singleton(1, 0), -1.0), InputError);
}

TEST(SolveOpt, MatchesBruteForceAcrossLambdas)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto [a, b] = random_opt_pair(seed);
        const double lambda = kLambdas[seed % 5];
        const auto fast = solve_opt(a, b, lambda);
        const auto slow = brute_force_opt(a, b, lambda);
        ASSERT_NEAR(fast.cost, slow.cost, 1e-9) << "seed " << seed << " lambda " << lambda;
        EXPECT_NEAR(fast.cost, plan_cost_opt(fast.plan, a, b, lambda), 1e-9);
        EXPECT_TRUE(is_dominated(fast.plan, a, b));
        EXPECT_GE(fast.destroyed_mass, -1e-9);
        EXPECT_GE(fast.created_mass, -1e-9);
    }
}

TEST(SolveOpt, SupportRestrictedToTwoLambda)
{
    for (std::uint64_t seed = 300; seed < 400; ++seed) {
        const auto [a, b] = random_opt_pair(seed);
        const double lambda = kLambdas[seed % 5];
        const auto sol = solve_opt(a, b, lambda);
        for (const auto& e : sol.plan.entries) {
            EXPECT_LE(squared_distance(a, e.row(), b, e.col()), 2 * lambda + 1e-9);
        }
        EXPECT_GE(min_separation(a, b, sol), std::sqrt(2 * lambda) - 1e-6) << "seed " << seed;
    }
}

TEST(SolveOpt, MonotoneInLambdaAndBoundedByEmptyPlan)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto [a, b] = random_opt_pair(seed);
        double previous = -1.0;
        for (double lambda : kLambdas) {
            const double c = solve_opt(a, b, lambda).cost;
            EXPECT_GE(c, previous - 1e-12);
            EXPECT_LE(c, lambda * (total_mass(a) + total_mass(b)) + 1e-12);
            previous = c;
        }
    }
}

TEST(SolveOpt, LargeLambdaReducesToOt)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto [a, b] = lopt::testing::random_ot_pair(seed);
        const auto ot = solve_ot(a, b);
        const auto opt = solve_opt(a, b, 5.0); // diameter^2 of [0,1]^2 is 2 < 2 lambda
        EXPECT_NEAR(opt.cost, ot.cost, 1e-9);
        EXPECT_NEAR(opt.transported_mass, total_mass(a), 1e-9);
    }
}

TEST(SolveOpt, OptimalOnItsOwnSecondMarginal)
{
    for (std::uint64_t seed = 500; seed < 540; ++seed) {
        const auto [a, b] = random_opt_pair(seed);
        const double lambda = kLambdas[1 + seed % 4];
        const auto sol = solve_opt(a, b, lambda);
        if (sol.plan.entries.empty()) continue;
        const Measure gamma1(b.points(), sol.plan.target_marginal());
        const auto restricted = solve_opt(a, gamma1, lambda);
        EXPECT_NEAR(restricted.cost, plan_cost_opt(sol.plan, a, gamma1, lambda), 1e-9) << "seed " << seed;
    }
}

TEST(SolveOpt, ZeroMassSideIsPureCreation)
{
    const auto sol = solve_opt(singleton(0, 0, 0.0), singleton(1, 0, 2.0), 0.5);
    EXPECT_NEAR(sol.cost, 1.0, 1e-12);
    EXPECT_NEAR(sol.created_mass, 2.0, 1e-12);
}

TEST(BruteForceOpt, ZeroLambdaGivesEmptyPlan)
{
    const auto [a, b] = random_opt_pair(9);
    const auto sol = brute_force_opt(a, b, 0.0);
    EXPECT_EQ(sol.cost, 0.0);
}

TEST(BruteForceOpt, SeedSevenRegression)
{
    CounterRng rng(7);
    const auto a = Measure::uniform(lopt::testing::random_points(rng, 3, 2, 0, 3), 3.0);
    const auto b = Measure::uniform(lopt::testing::random_points(rng, 3, 2, 0, 3), 3.0);
    const double oracle = brute_force_opt(a, b, 1.0).cost;
    EXPECT_NEAR(solve_opt(a, b, 1.0).cost, oracle, 1e-9);
    EXPECT_NEAR(oracle, 3.0241580924504774, 1e-12);
}
