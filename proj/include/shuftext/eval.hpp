#pragma once

// The shuffle test: fit, predict the test split, shuffle the correctly
// classified sentences, predict again and compare.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shuftext/corpus.hpp"
#include "shuftext/errors.hpp"
#include "shuftext/models.hpp"
#include "shuftext/shuffle.hpp"
#include "shuftext/stats.hpp"

namespace shuftext {

// A percentage that may be undefined; `reason` explains a missing value.
struct Metric {
    std::optional<double> value;
    std::string reason;

    static Metric undefined(std::string why) { return {std::nullopt, std::move(why)}; }
    friend bool operator==(const Metric&, const Metric&) = default;
};

struct BoxPlotStats {
    std::string class_label;
    std::size_t n = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double lower_whisker = 0.0;
    double upper_whisker = 0.0;
    std::size_t n_outliers = 0;

    // 0 <= lower_whisker <= q1 <= median <= q3 <= upper_whisker <= 1
    bool ordered() const {
        return 0.0 <= lower_whisker && lower_whisker <= q1 && q1 <= median && median <= q3 &&
               q3 <= upper_whisker && upper_whisker <= 1.0;
    }

    friend bool operator==(const BoxPlotStats&, const BoxPlotStats&) = default;
};

struct EvalRecord {
    std::string example_id;
    std::string gold_label;
    Prediction original_pred;
    std::optional<Prediction> shuffled_pred;  // present iff original_pred was correct

    friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

// Echo of what produced a report.
struct RunConfigEcho {
    std::uint64_t seed = 0;
    std::string model_kind;
    std::string model_name;
    std::map<std::string, std::string> model_config;
    std::string dataset_name;

    friend bool operator==(const RunConfigEcho&, const RunConfigEcho&) = default;
};

struct ShufTextReport {
    RunConfigEcho config;
    std::size_t n_test = 0;
    std::size_t n_correct = 0;
    std::size_t n_same = 0;
    double original_test_accuracy = 0.0;
    Metric same_prediction_pct;
    std::vector<BoxPlotStats> boxplots_original;
    std::vector<BoxPlotStats> boxplots_shuffled;
    std::vector<EvalRecord> records;

    friend bool operator==(const ShufTextReport&, const ShufTextReport&) = default;
};

inline std::size_t count_correct(const std::vector<Prediction>& preds, const std::vector<std::string>& golds) {
    if (preds.size() != golds.size())
        throw Error("accuracy: " + std::to_string(preds.size()) + " predictions for " +
                    std::to_string(golds.size()) + " gold labels");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i].label == golds[i];
    return correct;
}

// Percent of predictions matching gold; full precision, round for display.
inline double accuracy(const std::vector<Prediction>& preds, const std::vector<std::string>& golds) {
    const auto correct = count_correct(preds, golds);
    if (preds.empty()) throw Error("accuracy: empty input");
    return percent(correct, preds.size());
}

inline Metric same_prediction_pct(const std::vector<EvalRecord>& records) {
    std::size_t eligible = 0, same = 0;
    for (const auto& r : records) {
        if (!r.shuffled_pred) continue;
        ++eligible;
        same += r.shuffled_pred->label == r.original_pred.label;
    }
    if (eligible == 0) return Metric::undefined("no correctly classified test samples");
    return {percent(same, eligible), {}};
}

// Quartiles by (n-1)p interpolation, Tukey whiskers at the most extreme data
// points inside 1.5 IQR of the hinges. An interpolated hinge can sit outside
// every in-fence point (e.g. {0, .5, .5, .5}: q1 = .375, whisker .5); the
// whisker is then clamped to the hinge, as matplotlib does.
inline BoxPlotStats boxplot_stats(std::span<const double> values, std::string class_label) {
    if (values.empty()) throw Error("boxplot_stats: no values for class '" + class_label + "'");
    std::vector<double> v(values.begin(), values.end());
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0)) throw Error("boxplot_stats: value outside [0,1]");
    std::sort(v.begin(), v.end());

    BoxPlotStats s;
    s.class_label = std::move(class_label);
    s.n = v.size();
    s.q1 = quantile_sorted(v, 0.25);
    s.median = quantile_sorted(v, 0.5);
    s.q3 = quantile_sorted(v, 0.75);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    s.lower_whisker = s.q1;
    s.upper_whisker = s.q3;
    bool have_lo = false;
    for (double x : v) {
        if (x < lo_fence || x > hi_fence) {
            ++s.n_outliers;
            continue;
        }
        if (!have_lo) {
            s.lower_whisker = x;
            have_lo = true;
        }
        s.upper_whisker = x;
    }
    s.lower_whisker = std::min(s.lower_whisker, s.q1);
    s.upper_whisker = std::max(s.upper_whisker, s.q3);
    return s;
}

// One box per predicted class, sorted by label; classes with no values are omitted.
inline std::vector<BoxPlotStats> boxplots_by_predicted_class(const std::vector<Prediction>& preds) {
    std::map<std::string, std::vector<double>> groups;
    for (const auto& p : preds) groups[p.label].push_back(p.confidence());
    std::vector<BoxPlotStats> out;
    for (auto& [label, values] : groups) out.push_back(boxplot_stats(values, label));
    return out;
}

inline std::vector<TokenList> token_lists(const std::vector<Example>& examples) {
    std::vector<TokenList> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) out.push_back(ex.tokens);
    return out;
}

inline std::vector<std::string> gold_labels(const std::vector<Example>& examples) {
    std::vector<std::string> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) out.push_back(ex.label);
    return out;
}

inline RunConfigEcho echo_config(const Model& model, const Dataset& ds, ShuffleSeed seed) {
    return {seed.value, model.kind(), model.name(), model.config(), ds.name};
}

// Predicts `test`, then re-predicts shuffled copies of the correctly
// classified examples. Shared by the plain test and both augmentation runs.
struct ShuffleProbe {
    std::vector<Prediction> original;
    std::vector<Example> correct;            // test examples predicted correctly
    std::vector<Example> shuffled;           // shuffled copies of `correct`
    std::vector<Prediction> shuffled_preds;  // predictions for `shuffled`
    std::vector<EvalRecord> records;
};

inline ShuffleProbe probe_shuffled(Model& model, const std::vector<Example>& test, ShuffleSeed seed,
                                   const std::optional<std::string>& shuffled_label = std::nullopt) {
    ShuffleProbe probe;
    probe.original = model.predict(token_lists(test));
    if (probe.original.size() != test.size()) throw ModelError("model returned a wrong number of predictions");

    std::vector<std::size_t> correct_idx;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (probe.original[i].label == test[i].label) {
            correct_idx.push_back(i);
            probe.correct.push_back(test[i]);
        }
    }
    probe.shuffled = build_shuffled_set(probe.correct, seed, shuffled_label);
    probe.shuffled_preds = model.predict(token_lists(probe.shuffled));
    if (probe.shuffled_preds.size() != probe.shuffled.size())
        throw ModelError("model returned a wrong number of predictions");

    probe.records.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i)
        probe.records.push_back({test[i].id, test[i].label, probe.original[i], std::nullopt});
    for (std::size_t k = 0; k < correct_idx.size(); ++k)
        probe.records[correct_idx[k]].shuffled_pred = probe.shuffled_preds[k];
    return probe;
}

inline std::vector<Prediction> correct_only(const ShuffleProbe& probe) {
    std::vector<Prediction> out;
    for (const auto& r : probe.records)
        if (r.shuffled_pred) out.push_back(r.original_pred);
    return out;
}

inline ShufTextReport run_shuftext(Model& model, const Dataset& ds, ShuffleSeed seed) {
    if (ds.test.empty()) throw DataError("dataset '" + ds.name + "' has an empty test split");
    model.fit(ds.train, ds.labels);
    auto probe = probe_shuffled(model, ds.test, seed);

    ShufTextReport rep;
    rep.config = echo_config(model, ds, seed);
    rep.n_test = ds.test.size();
    rep.n_correct = probe.correct.size();
    rep.original_test_accuracy = accuracy(probe.original, gold_labels(ds.test));
    rep.same_prediction_pct = same_prediction_pct(probe.records);
    for (const auto& r : probe.records)
        rep.n_same += r.shuffled_pred && r.shuffled_pred->label == r.original_pred.label;
    rep.boxplots_original = boxplots_by_predicted_class(correct_only(probe));
    rep.boxplots_shuffled = boxplots_by_predicted_class(probe.shuffled_preds);
    rep.records = std::move(probe.records);
    return rep;
}

}  // namespace shuftext
