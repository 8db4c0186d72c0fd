#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shuftext/models.hpp"
#include "test_support.hpp"

using namespace shuftext;
using shuftext::testing::make_example;
using Tokens = std::vector<std::string>;

namespace {

void expect_valid(const Prediction& p, const std::vector<std::string>& labels) {
    EXPECT_EQ(simplex_violation(p.probs, labels), "");
    EXPECT_EQ(p.label, argmax_label(p.probs));
}

std::vector<Example> toy_sentiment() {
    return {make_example("t1", "great fun movie", "pos"), make_example("t2", "a great cast", "pos"),
            make_example("t3", "dull boring movie", "neg"), make_example("t4", "a dull plot", "neg")};
}

}  // namespace

TEST(Prediction, TiesGoToSmallestLabel) {
    const auto p = prediction_from_log_scores({"b", "a", "c"}, {0.0, 0.0, -1.0});
    EXPECT_EQ(p.label, "a");
    EXPECT_DOUBLE_EQ(p.probs.at("a"), p.probs.at("b"));
}

TEST(Prediction, SimplexViolations) {
    EXPECT_NE(simplex_violation({{"a", 0.5}}, {"a", "b"}), "");
    EXPECT_NE(simplex_violation({{"a", 0.5}, {"b", 0.6}}, {"a", "b"}), "");
    EXPECT_NE(simplex_violation({{"a", -0.1}, {"b", 1.1}}, {"a", "b"}), "");
    EXPECT_EQ(simplex_violation({{"a", 0.25}, {"b", 0.75}}, {"a", "b"}), "");
}

TEST(NaiveBayes, HandComputedPosterior) {
    // V = {bad, good}; P(good|pos) = (1+1)/(1+2), P(good|neg) = (0+1)/(1+2); equal priors
    // P(pos | good) = (2/3) / (2/3 + 1/3) = 2/3
    NaiveBayes nb;
    nb.fit({make_example("1", "good", "pos"), make_example("2", "bad", "neg")}, {"pos", "neg"});
    const auto p = nb.predict({{"good"}})[0];
    EXPECT_EQ(p.label, "pos");
    EXPECT_NEAR(p.probs.at("pos"), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(p.probs.at("neg"), 1.0 / 3.0, 1e-12);
}

TEST(NaiveBayes, EmptySentenceGivesPriors) {
    NaiveBayes nb;
    nb.fit({make_example("1", "a", "x"), make_example("2", "b", "x"), make_example("3", "c", "y")}, {"x", "y"});
    const auto p = nb.predict({Tokens{}})[0];
    EXPECT_NEAR(p.probs.at("x"), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(p.probs.at("y"), 1.0 / 3.0, 1e-12);
}

TEST(NaiveBayes, UnseenTokensOnlySmoothing) {
    // unseen token: (0+1)/(total_c + |V|) per class; totals equal, so posterior stays at the prior
    NaiveBayes nb;
    nb.fit({make_example("1", "good", "pos"), make_example("2", "bad", "neg")}, {"neg", "pos"});
    const auto p = nb.predict({{"zzz"}})[0];
    EXPECT_NEAR(p.probs.at("pos"), 0.5, 1e-12);
}

TEST(NaiveBayes, KeywordDominance) {
    NaiveBayes nb;
    nb.fit(toy_sentiment(), {"neg", "pos"});
    EXPECT_EQ(nb.predict({{"great", "movie"}})[0].label, "pos");
    EXPECT_TRUE(nb.predict({}).empty());
    for (const auto& ex : toy_sentiment()) EXPECT_EQ(nb.predict({ex.tokens})[0].label, ex.label);
}

TEST(NaiveBayes, ExactPermutationInvariance) {
    const auto ds = shuftext::testing::keyword_dataset(300, 100, 1);
    NaiveBayes nb;
    nb.fit(ds.train, ds.labels);
    Xoshiro256ss rng(5);
    for (const auto& ex : ds.test) {
        const auto base = nb.predict({ex.tokens})[0];
        expect_valid(base, ds.labels);
        for (int k = 0; k < 5; ++k) {
            const auto perm = shuffle_tokens(ex.tokens, rng);
            EXPECT_EQ(nb.predict({perm})[0], base);  // field-for-field, exact doubles
        }
    }
}

TEST(NaiveBayes, FitErrorsAndDeterminism) {
    NaiveBayes nb;
    EXPECT_THROW(nb.predict({{"x"}}), ModelError);
    EXPECT_THROW(nb.fit({}, {"a"}), ModelError);
    EXPECT_THROW(nb.fit({make_example("1", "x", "zzz")}, {"a"}), ModelError);

    NaiveBayes a, b;
    a.fit(toy_sentiment(), {"neg", "pos"});
    b.fit(toy_sentiment(), {"neg", "pos"});
    EXPECT_EQ(a.predict({{"great", "plot"}}), b.predict({{"great", "plot"}}));
    EXPECT_THROW(NaiveBayes(0.0), ModelError);
}

TEST(NgramFeatures, UnigramsAndBigrams) {
    EXPECT_EQ(ngram_features({"not", "good", "not"}),
              (Tokens{"b:good not", "b:not good", "u:good", "u:not"}));
    EXPECT_TRUE(ngram_features({}).empty());
}

TEST(NgramLogReg, SeparableToySetFitsPerfectly) {
    NgramLogReg lr;
    const auto train = toy_sentiment();
    lr.fit(train, {"neg", "pos"});
    for (const auto& ex : train) {
        const auto p = lr.predict({ex.tokens})[0];
        expect_valid(p, {"neg", "pos"});
        EXPECT_EQ(p.label, ex.label) << ex.text;
    }
}

TEST(NgramLogReg, DeterministicWeights) {
    const auto ds = shuftext::testing::bigram_dataset(200, 10, 4);
    NgramLogReg a(NgramLogRegConfig{20, 0.1, 9}), b(NgramLogRegConfig{20, 0.1, 9});
    a.fit(ds.train, ds.labels);
    b.fit(ds.train, ds.labels);
    EXPECT_EQ(a.weights(), b.weights());
    EXPECT_EQ(a.bias(), b.bias());

    NgramLogReg c(NgramLogRegConfig{20, 0.1, 10});
    c.fit(ds.train, ds.labels);
    EXPECT_NE(a.weights(), c.weights());
}

TEST(NgramLogReg, OrderMatters) {
    const auto ds = shuftext::testing::bigram_dataset(600, 0, 2);
    NgramLogReg lr;
    lr.fit(ds.train, ds.labels);
    // same unigrams, different bigrams
    EXPECT_EQ(lr.predict({tokenize("the film was not good")})[0].label, "neg");
    EXPECT_EQ(lr.predict({tokenize("the film was good not")})[0].label, "pos");
}

TEST(NgramLogReg, InvariantUnderBigramPreservingPermutations) {
    // "x y z x" and "y z x y" share the unigram set and the bigram multiset {xy, yz, zx}
    const auto ds = shuftext::testing::bigram_dataset(100, 0, 2);
    NgramLogReg lr;
    lr.fit(ds.train, ds.labels);
    EXPECT_EQ(lr.predict({{"film", "plot", "cast", "film"}})[0], lr.predict({{"plot", "cast", "film", "plot"}})[0]);
}

TEST(NgramLogReg, Errors) {
    NgramLogReg lr;
    EXPECT_THROW(lr.predict({{"x"}}), ModelError);
    EXPECT_THROW(lr.fit({}, {"a"}), ModelError);
    EXPECT_THROW(NgramLogReg(NgramLogRegConfig{20, 0.0, 0}), ModelError);
}

TEST(Models, BatchOrderAndCardinality) {
    const auto ds = shuftext::testing::keyword_dataset(150, 40, 8);
    NaiveBayes nb;
    NgramLogReg lr;
    for (Model* m : std::vector<Model*>{&nb, &lr}) {
        m->fit(ds.train, ds.labels);
        std::vector<TokenList> batch;
        for (const auto& ex : ds.test) batch.push_back(ex.tokens);
        const auto all = m->predict(batch);
        ASSERT_EQ(all.size(), batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            expect_valid(all[i], ds.labels);
            EXPECT_EQ(all[i], m->predict({batch[i]})[0]);
        }
    }
}
