#include <gtest/gtest.h>

#include <random>

#include "shuftext/eval.hpp"
#include "test_support.hpp"

using namespace shuftext;
using shuftext::testing::make_example;

namespace {

Prediction pred(const std::string& label) { return {label, {{label, 1.0}}}; }

EvalRecord record(const std::string& gold, const std::string& orig, std::optional<std::string> shuf) {
    EvalRecord r{"id", gold, pred(orig), std::nullopt};
    if (shuf) r.shuffled_pred = pred(*shuf);
    return r;
}

}  // namespace

TEST(Accuracy, Ratios) {
    EXPECT_EQ(round_to(accuracy({pred("a"), pred("b"), pred("a")}, {"a", "b", "b"}), 2), 66.67);
    EXPECT_EQ(accuracy({pred("a"), pred("b")}, {"a", "b"}), 100.0);
    EXPECT_EQ(accuracy({pred("a"), pred("b")}, {"b", "a"}), 0.0);
    EXPECT_THROW(accuracy({pred("a")}, {"a", "b"}), Error);
    EXPECT_THROW(accuracy({}, {}), Error);
}

TEST(SamePredictionPct, OnlyEligibleRecordsCount) {
    const std::vector<EvalRecord> recs = {record("a", "a", "a"), record("b", "b", "a"), record("a", "a", "a"),
                                          record("a", "b", std::nullopt)};
    const auto m = same_prediction_pct(recs);
    ASSERT_TRUE(m.value);
    EXPECT_EQ(round_to(*m.value, 2), 66.67);

    const auto none = same_prediction_pct({record("a", "b", std::nullopt)});
    EXPECT_FALSE(none.value);
    EXPECT_FALSE(none.reason.empty());
}

TEST(SamePredictionPct, RecordOrderIrrelevant) {
    std::vector<EvalRecord> recs;
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i)
        recs.push_back(record("a", rng() % 2 ? "a" : "b", rng() % 3 ? std::optional<std::string>("a") : std::nullopt));
    const auto before = same_prediction_pct(recs);
    std::shuffle(recs.begin(), recs.end(), rng);
    EXPECT_EQ(same_prediction_pct(recs), before);
}

TEST(BoxPlot, ExactRanks) {
    const std::vector<double> v = {0.9, 0.5, 0.7, 0.6, 0.8};
    const auto s = boxplot_stats(v, "pos");
    EXPECT_EQ(s.class_label, "pos");
    EXPECT_EQ(s.n, 5u);
    EXPECT_DOUBLE_EQ(s.median, 0.7);
    EXPECT_DOUBLE_EQ(s.q1, 0.6);
    EXPECT_DOUBLE_EQ(s.q3, 0.8);
    EXPECT_DOUBLE_EQ(s.lower_whisker, 0.5);
    EXPECT_DOUBLE_EQ(s.upper_whisker, 0.9);
    EXPECT_EQ(s.n_outliers, 0u);
}

TEST(BoxPlot, Singleton) {
    const std::vector<double> v = {0.9};
    const auto s = boxplot_stats(v, "x");
    for (double x : {s.median, s.q1, s.q3, s.lower_whisker, s.upper_whisker}) EXPECT_DOUBLE_EQ(x, 0.9);
    EXPECT_EQ(s.n_outliers, 0u);
}

TEST(BoxPlot, HandComputedOutlier) {
    // n = 6: q1 at rank 1.25 -> 0.8 + 0.25 * 0.01 = 0.8025
    //        median at 2.5 -> 0.815, q3 at 3.75 -> 0.82 + 0.75 * 0.01 = 0.8275
    // IQR = 0.025, fences 0.765 and 0.865: 0.1 is the only outlier
    const std::vector<double> v = {0.1, 0.8, 0.81, 0.82, 0.83, 0.84};
    const auto s = boxplot_stats(v, "x");
    EXPECT_NEAR(s.q1, 0.8025, 1e-12);
    EXPECT_NEAR(s.median, 0.815, 1e-12);
    EXPECT_NEAR(s.q3, 0.8275, 1e-12);
    EXPECT_DOUBLE_EQ(s.lower_whisker, 0.8);
    EXPECT_DOUBLE_EQ(s.upper_whisker, 0.84);
    EXPECT_EQ(s.n_outliers, 1u);
    EXPECT_TRUE(s.ordered());
}

TEST(BoxPlot, WhiskerClampedToInterpolatedHinge) {
    // q1 at rank 0.75 = 0.375, IQR 0.125, lower fence 0.1875: 0 is an outlier and
    // the nearest in-fence point (0.5) lies above q1
    const std::vector<double> v = {0.0, 0.5, 0.5, 0.5};
    const auto s = boxplot_stats(v, "x");
    EXPECT_DOUBLE_EQ(s.q1, 0.375);
    EXPECT_DOUBLE_EQ(s.lower_whisker, 0.375);
    EXPECT_DOUBLE_EQ(s.upper_whisker, 0.5);
    EXPECT_EQ(s.n_outliers, 1u);
    EXPECT_TRUE(s.ordered());
}

TEST(BoxPlot, Errors) {
    EXPECT_THROW(boxplot_stats({}, "x"), Error);
    const std::vector<double> bad = {0.5, 1.5};
    EXPECT_THROW(boxplot_stats(bad, "x"), Error);
}

TEST(BoxPlot, OrderingChainOnRandomInputs) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> v(1 + rng() % 25);
        for (auto& x : v) x = rng() % 4 == 0 ? std::round(u(rng) * 4) / 4 : u(rng);
        EXPECT_TRUE(boxplot_stats(v, "c").ordered());
    }
}

TEST(RunShufText, NaiveBayesIsFullyInvariant) {
    const auto ds = shuftext::testing::keyword_dataset(300, 120, 21);
    NaiveBayes nb;
    const auto rep = run_shuftext(nb, ds, ShuffleSeed{5});

    ASSERT_TRUE(rep.same_prediction_pct.value);
    EXPECT_EQ(*rep.same_prediction_pct.value, 100.0);
    EXPECT_EQ(rep.n_test, ds.test.size());
    EXPECT_EQ(rep.records.size(), ds.test.size());
    std::size_t with_shuffled = 0;
    for (const auto& r : rep.records) {
        EXPECT_EQ(r.shuffled_pred.has_value(), r.original_pred.label == r.gold_label);
        if (r.shuffled_pred) {
            ++with_shuffled;
            EXPECT_EQ(*r.shuffled_pred, r.original_pred);
        }
    }
    EXPECT_EQ(with_shuffled, rep.n_correct);
    EXPECT_EQ(static_cast<double>(with_shuffled),
              std::round(rep.original_test_accuracy / 100.0 * static_cast<double>(ds.test.size())));
    EXPECT_EQ(rep.boxplots_original, rep.boxplots_shuffled);
    for (const auto& b : rep.boxplots_original) EXPECT_TRUE(b.ordered());
    EXPECT_EQ(rep.config.model_kind, "builtin-nb");
    EXPECT_EQ(rep.config.seed, 5u);
    EXPECT_EQ(rep.config.dataset_name, "keywords");
}

TEST(RunShufText, Deterministic) {
    const auto ds = shuftext::testing::bigram_dataset(200, 60, 2);
    NgramLogReg a, b;
    EXPECT_EQ(run_shuftext(a, ds, ShuffleSeed{8}), run_shuftext(b, ds, ShuffleSeed{8}));
}

TEST(RunShufText, NoCorrectPredictionsLeavesMetricUndefined) {
    // "c" occurs only in the test split, so its prior is zero and it is never predicted
    Dataset ds;
    ds.name = "never";
    ds.labels = {"a", "b", "c"};
    ds.train = {make_example("train:1", "x y", "a"), make_example("train:2", "z w", "b")};
    ds.test = {make_example("test:1", "x y", "c"), make_example("test:2", "z", "c")};
    NaiveBayes nb;
    const auto rep = run_shuftext(nb, ds, ShuffleSeed{0});
    EXPECT_EQ(rep.original_test_accuracy, 0.0);
    EXPECT_FALSE(rep.same_prediction_pct.value);
    EXPECT_NE(rep.same_prediction_pct.reason, "");
    EXPECT_TRUE(rep.boxplots_original.empty());
    EXPECT_TRUE(rep.boxplots_shuffled.empty());
}
