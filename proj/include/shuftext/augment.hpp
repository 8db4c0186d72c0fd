#pragma once

// Training-set augmentation runs: a shuffled-sentence class (experiment 1)
// and an out-of-domain generic class (experiment 2).

#include <set>
#include <string>
#include <vector>

#include "shuftext/corpus.hpp"
#include "shuftext/eval.hpp"
#include "shuftext/random.hpp"
#include "shuftext/shuffle.hpp"

namespace shuftext {

struct Exp1Report {
    RunConfigEcho config;
    std::size_t n_train_augmented = 0;
    std::size_t n_added = 0;  // N, the average class size
    std::size_t n_test = 0;
    std::size_t n_correct_original = 0;
    std::size_t n_shuffled = 0;
    std::size_t n_correct_shuffled = 0;
    double original_test_accuracy = 0.0;
    Metric shuffled_test_accuracy;  // against the shuffled class label
    double overall_test_accuracy = 0.0;
    std::vector<BoxPlotStats> boxplots_original;  // correctly classified originals
    std::vector<BoxPlotStats> boxplots_shuffled;  // every shuffled test sentence
    std::vector<EvalRecord> records;

    friend bool operator==(const Exp1Report&, const Exp1Report&) = default;
};

struct GenericRecord {
    std::string example_id;
    Prediction pred;
    friend bool operator==(const GenericRecord&, const GenericRecord&) = default;
};

struct Exp2Report {
    RunConfigEcho config;
    std::size_t n_train_augmented = 0;
    std::size_t n_added = 0;
    std::size_t n_test = 0;
    std::size_t n_correct = 0;
    std::size_t n_same = 0;
    std::size_t n_generic_test = 0;
    std::size_t n_generic_correct = 0;
    LengthSummary train_bounds;
    LengthSummary test_bounds;
    double original_test_accuracy = 0.0;
    Metric generic_sentence_accuracy;
    Metric same_prediction_pct;
    std::vector<BoxPlotStats> boxplots_original;
    std::vector<BoxPlotStats> boxplots_shuffled;
    std::vector<BoxPlotStats> boxplots_generic;
    std::vector<EvalRecord> records;
    std::vector<GenericRecord> generic_records;

    friend bool operator==(const Exp2Report&, const Exp2Report&) = default;
};

// Micro-average over the original and shuffled test sets.
inline double overall_accuracy(std::size_t correct_original, std::size_t n_original,
                               std::size_t correct_shuffled, std::size_t n_shuffled) {
    if (n_original + n_shuffled == 0) throw Error("overall_accuracy: empty test sets");
    return percent(correct_original + correct_shuffled, n_original + n_shuffled);
}

// Same identity from reported percentages: the shuffled set holds the
// correctly classified originals, round(original% * n_test).
inline double overall_accuracy_from_percents(std::size_t n_test, double original_pct, double shuffled_pct) {
    const double c_orig = original_pct / 100.0 * static_cast<double>(n_test);
    const double n_shuf = std::round(c_orig);
    const double c_shuf = shuffled_pct / 100.0 * n_shuf;
    return 100.0 * (c_orig + c_shuf) / (static_cast<double>(n_test) + n_shuf);
}

// Appends shuffled copies of n uniformly drawn training examples, relabeled
// `new_label`. Originals are kept.
inline std::vector<Example> make_shuffled_class(const std::vector<Example>& train, std::size_t n, ShuffleSeed seed,
                                                const std::string& new_label) {
    if (n > train.size())
        throw DataError("cannot draw " + std::to_string(n) + " samples from a training set of " +
                        std::to_string(train.size()));
    auto rng = substream(seed.value, "shuffled-class/select");
    std::vector<Example> picked;
    picked.reserve(n);
    for (auto i : sample_indices(train.size(), n, rng)) picked.push_back(train[i]);

    std::vector<Example> out = train;
    for (auto& ex : build_shuffled_set(picked, seed, new_label)) out.push_back(std::move(ex));
    return out;
}

inline std::vector<std::string> with_label(std::vector<std::string> labels, std::string_view extra) {
    labels.emplace_back(extra);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

inline void require_unreserved(const Dataset& ds) {
    for (const auto& l : ds.labels)
        if (is_reserved_label(l)) throw DataError("dataset label '" + l + "' collides with a reserved label");
}

inline Exp1Report run_experiment1(Model& model, const Dataset& ds, ShuffleSeed seed) {
    require_unreserved(ds);
    if (ds.test.empty()) throw DataError("dataset '" + ds.name + "' has an empty test split");
    const std::string shuffled_label(kShuffledLabel);

    Exp1Report rep;
    rep.n_added = avg_class_size(ds.train);
    const auto augmented = make_shuffled_class(ds.train, rep.n_added, seed, shuffled_label);
    rep.n_train_augmented = augmented.size();
    model.fit(augmented, with_label(ds.labels, kShuffledLabel));

    auto probe = probe_shuffled(model, ds.test, seed, shuffled_label);
    rep.config = echo_config(model, ds, seed);
    rep.n_test = ds.test.size();
    rep.n_correct_original = probe.correct.size();
    rep.n_shuffled = probe.shuffled.size();
    for (const auto& p : probe.shuffled_preds) rep.n_correct_shuffled += p.label == shuffled_label;

    rep.original_test_accuracy = accuracy(probe.original, gold_labels(ds.test));
    rep.shuffled_test_accuracy = rep.n_shuffled == 0
                                     ? Metric::undefined("no correctly classified test samples to shuffle")
                                     : Metric{percent(rep.n_correct_shuffled, rep.n_shuffled), {}};
    rep.overall_test_accuracy =
        overall_accuracy(rep.n_correct_original, rep.n_test, rep.n_correct_shuffled, rep.n_shuffled);
    rep.boxplots_original = boxplots_by_predicted_class(correct_only(probe));
    rep.boxplots_shuffled = boxplots_by_predicted_class(probe.shuffled_preds);
    rep.records = std::move(probe.records);
    return rep;
}

// n uniform draws without replacement from the corpus sentences whose token
// count lies in [bounds.q1, bounds.q3] and whose id is not excluded.
inline std::vector<Example> select_generic(const std::vector<Example>& corpus, const LengthSummary& bounds,
                                           std::size_t n, std::uint64_t seed,
                                           const std::set<std::string>& exclude_ids = {}) {
    std::vector<const Example*> pool;
    for (const auto& ex : corpus)
        if (bounds.contains(ex.tokens.size()) && !exclude_ids.count(ex.id)) pool.push_back(&ex);
    if (pool.size() < n)
        throw DataError("generic corpus too small: " + std::to_string(pool.size()) +
                        " qualifying sentences for " + std::to_string(n) + " requested");

    auto rng = substream(seed, "generic/select");
    std::vector<Example> out;
    out.reserve(n);
    for (auto i : sample_indices(pool.size(), n, rng)) {
        Example ex = *pool[i];
        ex.label = std::string(kGenericLabel);
        out.push_back(std::move(ex));
    }
    return out;
}

inline Exp2Report run_experiment2(Model& model, const Dataset& ds, const std::vector<Example>& generic_corpus,
                                  ShuffleSeed seed) {
    require_unreserved(ds);
    if (ds.test.empty()) throw DataError("dataset '" + ds.name + "' has an empty test split");

    Exp2Report rep;
    rep.n_added = avg_class_size(ds.train);
    rep.train_bounds = length_iqr(ds.train);
    const auto train_generic =
        select_generic(generic_corpus, rep.train_bounds, rep.n_added, derive_seed(seed.value, "generic/train"));

    auto augmented = ds.train;
    augmented.insert(augmented.end(), train_generic.begin(), train_generic.end());
    rep.n_train_augmented = augmented.size();
    model.fit(augmented, with_label(ds.labels, kGenericLabel));

    auto probe = probe_shuffled(model, ds.test, seed);
    rep.config = echo_config(model, ds, seed);
    rep.n_test = ds.test.size();
    rep.n_correct = probe.correct.size();
    rep.original_test_accuracy = accuracy(probe.original, gold_labels(ds.test));
    rep.same_prediction_pct = same_prediction_pct(probe.records);
    for (const auto& r : probe.records)
        rep.n_same += r.shuffled_pred && r.shuffled_pred->label == r.original_pred.label;

    rep.test_bounds = length_iqr(ds.test);
    std::set<std::string> used;
    for (const auto& ex : train_generic) used.insert(ex.id);
    const auto test_generic = select_generic(generic_corpus, rep.test_bounds, rep.n_added,
                                             derive_seed(seed.value, "generic/test"), used);
    const auto generic_preds = model.predict(token_lists(test_generic));
    if (generic_preds.size() != test_generic.size()) throw ModelError("model returned a wrong number of predictions");
    rep.n_generic_test = test_generic.size();
    rep.n_generic_correct = count_correct(generic_preds, gold_labels(test_generic));
    rep.generic_sentence_accuracy = rep.n_generic_test == 0
                                        ? Metric::undefined("no generic test sentences")
                                        : Metric{percent(rep.n_generic_correct, rep.n_generic_test), {}};
    for (std::size_t i = 0; i < test_generic.size(); ++i)
        rep.generic_records.push_back({test_generic[i].id, generic_preds[i]});

    rep.boxplots_original = boxplots_by_predicted_class(correct_only(probe));
    rep.boxplots_shuffled = boxplots_by_predicted_class(probe.shuffled_preds);
    rep.boxplots_generic = boxplots_by_predicted_class(generic_preds);
    rep.records = std::move(probe.records);
    return rep;
}

}  // namespace shuftext
