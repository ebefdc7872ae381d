#include "incdbscan/bench.hpp"
#include "support/agreement.hpp"
#include "support/helpers.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace incdbscan;
namespace t = incdbscan::testkit;

namespace {

// Direct count over every unordered pair.
double rand_index_pairs(const Labeling& a, const Labeling& b)
{
    std::vector<std::pair<ClusterId, ClusterId>> v;
    ClusterId fresh = -1;
    for (const auto& [id, la] : a) {
        ClusterId x = la == noise_label ? fresh-- : la;
        ClusterId y = b.at(id) == noise_label ? fresh-- : b.at(id);
        v.emplace_back(x, y);
    }
    std::size_t agree = 0, total = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            agree += (v[i].first == v[j].first) == (v[i].second == v[j].second);
            ++total;
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(total);
}

} // namespace

TEST(RandIndex, SmallCases)
{
    const Labeling ab_c{{1, 1}, {2, 1}, {3, 2}};
    const Labeling a_bc{{1, 1}, {2, 2}, {3, 2}};
    const Labeling singles{{1, 1}, {2, 2}, {3, 3}};
    const Labeling one{{1, 5}, {2, 5}, {3, 5}};
    EXPECT_EQ(rand_index(ab_c, ab_c), 1.0);
    EXPECT_DOUBLE_EQ(rand_index(ab_c, a_bc), 1.0 / 3.0);
    EXPECT_EQ(rand_index(singles, one), 0.0);
    EXPECT_EQ(rand_index(Labeling{}, Labeling{}), 1.0);
}

TEST(RandIndex, NoiseIsSingletonsUnlessIgnored)
{
    const Labeling all_noise{{1, 0}, {2, 0}, {3, 0}};
    const Labeling one{{1, 4}, {2, 4}, {3, 4}};
    const Labeling singles{{1, 1}, {2, 2}, {3, 3}};
    EXPECT_EQ(rand_index(all_noise, singles), 1.0);
    EXPECT_EQ(rand_index(all_noise, one), 0.0);

    const Labeling a{{1, 1}, {2, 1}, {3, 0}, {4, 2}};
    const Labeling b{{1, 7}, {2, 7}, {3, 7}, {4, 0}};
    EXPECT_EQ(rand_index(a, b, NoiseHandling::ignore), 1.0);
    EXPECT_LT(rand_index(a, b), 1.0);
}

TEST(RandIndex, RejectsDifferentIdSets)
{
    EXPECT_THROW(rand_index(Labeling{{1, 1}, {2, 1}}, Labeling{{1, 1}, {3, 1}}), InvalidInput);
    EXPECT_THROW(rand_index(Labeling{{1, 1}}, Labeling{{1, 1}, {3, 1}}), InvalidInput);
}

TEST(RandIndex, MatchesPairCountAndIsSymmetric)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 40)(rng);
        std::uniform_int_distribution<ClusterId> la(0, 4), lb(0, 6);
        Labeling a, b;
        for (PointId id = 1; id <= n; ++id) {
            a[id * 3] = la(rng);
            b[id * 3] = lb(rng);
        }
        const double fast = rand_index(a, b);
        EXPECT_NEAR(fast, rand_index_pairs(a, b), 1e-12);
        EXPECT_EQ(fast, rand_index(b, a));
        // Relabeling clusters leaves the index at 1.
        Labeling shifted = a;
        for (auto& [id, l] : shifted)
            l = l == noise_label ? l : l + 100;
        EXPECT_EQ(rand_index(a, shifted), 1.0);
    }
}

TEST(RunTrial, EmptyAdditions)
{
    const auto base = t::random_dataset(4, 200, 2);
    const Params params{0.8, 4};
    const auto tr = run_trial(base, Dataset{}, params, 3);
    EXPECT_EQ(tr.agreement, 1.0);
    EXPECT_EQ(tr.added, 0u);
    EXPECT_GT(tr.t1, 0.0);
    EXPECT_GT(tr.t2, 0.0);
    EXPECT_LT(tr.t2, tr.t1);
}

TEST(RunTrial, WellSeparatedBlobsAgreeFully)
{
    const auto s = t::make_agreement_scenario(9, Metric::euclidean);
    const auto tr = run_trial(s.base, s.stored, s.additions, s.params, 3);
    EXPECT_EQ(tr.agreement, 1.0);
    EXPECT_EQ(tr.added, s.additions.size());
    EXPECT_DOUBLE_EQ(tr.speedup, tr.t1 / tr.t2);
}

TEST(RunTrial, Rejections)
{
    const auto base = validate_dataset({{1, {0.0, 0.0}}, {2, {1.0, 1.0}}});
    EXPECT_THROW(run_trial(base, validate_dataset({{2, {5.0, 5.0}}}), Params{1.0, 2}), InvalidInput);
    EXPECT_THROW(run_trial(base, validate_dataset({{3, {5.0}}}), Params{1.0, 2}), InvalidInput);
    EXPECT_THROW(run_trial(base, Dataset{}, Params{1.0, 2}, 0), InvalidInput);
}

TEST(Summarize, CrossoverAndRecommendation)
{
    BenchReport r;
    r.agreement_floor = 0.95;
    r.trials = {{0.01, 1, 1.0, 0.1, 10, 0.99},
                {0.02, 2, 1.0, 0.5, 2, 0.90},
                {0.05, 5, 1.0, 0.8, 1.25, 0.97},
                {0.10, 10, 1.0, 1.2, 0.8, 0.99},
                {0.20, 20, 1.0, 0.9, 1.1, 0.99}};
    summarize(r);
    ASSERT_TRUE(r.crossover_x);
    EXPECT_DOUBLE_EQ(*r.crossover_x, 10.0);
    ASSERT_TRUE(r.recommended_x);
    EXPECT_DOUBLE_EQ(*r.recommended_x, 20.0);

    r.trials = {{0.5, 50, 1.0, 2.0, 0.5, 0.5}};
    summarize(r);
    EXPECT_DOUBLE_EQ(*r.crossover_x, 50.0);
    EXPECT_FALSE(r.recommended_x);
}

TEST(Sweep, ShapeAndDeterministicAgreement)
{
    const auto base = t::random_dataset(21, 300, 2);
    const Params params{0.8, 4, Metric::manhattan, OutlierRule::density};
    AdditionSpec spec;
    spec.seed = 5;
    const std::vector<double> deltas{0.01, 0.02, 0.05, 0.10, 0.20, 0.50};
    const auto once = sweep(base, spec, params, deltas, 1);
    const auto five = sweep(base, spec, params, deltas, 5);
    ASSERT_EQ(once.trials.size(), 6u);
    ASSERT_EQ(five.trials.size(), 6u);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        EXPECT_EQ(once.trials[i].delta_fraction, deltas[i]);
        EXPECT_EQ(once.trials[i].added, static_cast<std::size_t>(std::llround(deltas[i] * 300)));
        EXPECT_EQ(once.trials[i].agreement, five.trials[i].agreement);
        EXPECT_GE(once.trials[i].agreement, 0.0);
        EXPECT_LE(once.trials[i].agreement, 1.0);
    }
    if (five.crossover_x) {
        bool matches_trial = false;
        for (const auto& tr : five.trials)
            matches_trial = matches_trial || tr.delta_fraction * 100.0 == *five.crossover_x;
        EXPECT_TRUE(matches_trial);
    }
}

TEST(Sweep, SingleDelta)
{
    const auto base = t::random_dataset(22, 200, 2);
    const Params params{0.8, 4, Metric::manhattan, OutlierRule::density};
    const auto r = sweep(base, AdditionSpec{}, params, {0.1}, 1);
    ASSERT_EQ(r.trials.size(), 1u);
    EXPECT_EQ(r.crossover_x.has_value(), r.trials[0].t2 >= r.trials[0].t1);
}

TEST(Sweep, Rejections)
{
    const auto base = t::random_dataset(23, 50, 2);
    const Params params{0.8, 4};
    AdditionSpec bad;
    bad.centers = {{1.0, 2.0, 3.0}};
    EXPECT_THROW(sweep(base, bad, params, {0.1}, 1), InvalidInput);
    EXPECT_THROW(sweep(base, AdditionSpec{}, params, {0.2, 0.1}, 1), InvalidInput);
    EXPECT_THROW(sweep(base, AdditionSpec{}, params, {0.0}, 1), InvalidInput);
    EXPECT_THROW(sweep(base, AdditionSpec{}, params, {1.5}, 1), InvalidInput);
    EXPECT_THROW(sweep(Dataset{}, AdditionSpec{}, params, {0.1}, 1), InvalidInput);
}

TEST(DrawAdditions, SeededAndFreshIds)
{
    const auto base = t::random_dataset(24, 100, 2);
    const Params params{0.8, 4};
    const auto stored = dbscan(base, params);
    AdditionSpec spec;
    spec.seed = 9;
    const auto a = draw_additions(base, stored, spec, params, 40, 1000);
    const auto b = draw_additions(base, stored, spec, params, 40, 1000);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.front().id, 1000u);
    EXPECT_EQ(a.back().id, 1039u);
    spec.seed = 10;
    EXPECT_NE(a, draw_additions(base, stored, spec, params, 40, 1000));
}

TEST(ReportCsv, Layout)
{
    BenchReport r;
    r.trials = {{0.01, 1, 0.5, 0.25, 2.0, 1.0}};
    summarize(r);
    std::ostringstream os;
    write_report_csv(os, r);
    EXPECT_EQ(os.str(), "delta_percent,t1_seconds,t2_seconds,speedup,rand_index\n"
                        "1,0.5,0.25,2,1\n"
                        "# crossover_x=none\n"
                        "# recommended_x=1\n"
                        "# agreement_floor=0.95\n");
}
