#pragma once

// Black-box classifier interface and the two built-in reference models.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "shuftext/corpus.hpp"
#include "shuftext/errors.hpp"
#include "shuftext/random.hpp"
#include "shuftext/shuffle.hpp"

namespace shuftext {

using TokenList = std::vector<std::string>;

struct Prediction {
    std::string label;
    std::map<std::string, double> probs;

    double confidence() const {
        auto it = probs.find(label);
        return it == probs.end() ? 0.0 : it->second;
    }

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

// argmax over probs, ties to the lexicographically smallest label.
inline std::string argmax_label(const std::map<std::string, double>& probs) {
    std::string best;
    double best_p = -std::numeric_limits<double>::infinity();
    for (const auto& [label, p] : probs) {
        if (best.empty() || p > best_p) {
            best = label;
            best_p = p;
        }
    }
    return best;
}

// Empty string when valid, otherwise a description of the first violation.
inline std::string simplex_violation(const std::map<std::string, double>& probs,
                                     const std::vector<std::string>& labels, double tol = 1e-6) {
    for (const auto& label : labels)
        if (!probs.count(label)) return "missing probability for label '" + label + "'";
    double sum = 0.0;
    for (const auto& [label, p] : probs) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0)
            return "probability for '" + label + "' outside [0,1]";
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol) return "probabilities sum to " + std::to_string(sum);
    return {};
}

// Normalizes log-space scores onto the simplex and picks the label.
inline Prediction prediction_from_log_scores(const std::vector<std::string>& labels,
                                             const std::vector<double>& scores) {
    double max_score = -std::numeric_limits<double>::infinity();
    for (double s : scores) max_score = std::max(max_score, s);
    std::vector<double> e(scores.size());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        e[i] = std::isinf(scores[i]) && scores[i] < 0 ? 0.0 : std::exp(scores[i] - max_score);
        z += e[i];
    }
    Prediction pred;
    for (std::size_t i = 0; i < labels.size(); ++i) pred.probs[labels[i]] = e[i] / z;
    pred.label = argmax_label(pred.probs);
    return pred;
}

class Model {
public:
    virtual ~Model() = default;

    // One of builtin-nb, builtin-ngram-lr, external.
    virtual std::string kind() const = 0;
    // Filesystem-safe name used in report file names.
    virtual std::string name() const { return kind(); }
    virtual std::map<std::string, std::string> config() const = 0;
    virtual bool fitted() const = 0;
    virtual bool can_fit() const { return true; }

    virtual void fit(const std::vector<Example>& train, const std::vector<std::string>& labels) = 0;
    virtual std::vector<Prediction> predict(const std::vector<TokenList>& texts) = 0;
};

namespace detail {

inline std::vector<std::string> checked_label_set(const std::vector<Example>& train,
                                                  std::vector<std::string> labels) {
    if (train.empty()) throw ModelError("fit: empty training set");
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    if (labels.empty()) throw ModelError("fit: empty label set");
    for (const auto& ex : train)
        if (!std::binary_search(labels.begin(), labels.end(), ex.label))
            throw ModelError("fit: example " + ex.id + " has label '" + ex.label +
                             "' outside the label set");
    return labels;
}

}  // namespace detail

// Multinomial Naive Bayes over unigram counts with Laplace smoothing.
//
// Token counts of the input are aggregated in sorted order before scoring,
// so predictions are bit-identical for every permutation of a sentence.
class NaiveBayes final : public Model {
public:
    explicit NaiveBayes(double alpha = 1.0) : alpha_(alpha) {
        if (!(alpha > 0.0)) throw ModelError("builtin-nb: alpha must be positive");
    }

    std::string kind() const override { return "builtin-nb"; }
    std::map<std::string, std::string> config() const override {
        return {{"alpha", format_param(alpha_)}};
    }
    bool fitted() const override { return fitted_; }

    void fit(const std::vector<Example>& train, const std::vector<std::string>& labels) override {
        labels_ = detail::checked_label_set(train, labels);
        const std::size_t k = labels_.size();
        log_prior_.assign(k, 0.0);
        total_.assign(k, 0.0);
        counts_.clear();

        std::vector<std::size_t> class_docs(k, 0);
        std::set<std::string> vocab;
        for (const auto& ex : train) {
            const auto c = label_index(ex.label);
            ++class_docs[c];
            for (const auto& tok : ex.tokens) {
                auto& row = counts_[tok];
                if (row.empty()) row.assign(k, 0.0);
                row[c] += 1.0;
                total_[c] += 1.0;
                vocab.insert(tok);
            }
        }
        vocab_size_ = static_cast<double>(vocab.size());
        for (std::size_t c = 0; c < k; ++c) {
            log_prior_[c] = class_docs[c] == 0
                                ? -std::numeric_limits<double>::infinity()
                                : std::log(static_cast<double>(class_docs[c]) / static_cast<double>(train.size()));
        }
        fitted_ = true;
    }

    std::vector<Prediction> predict(const std::vector<TokenList>& texts) override {
        if (!fitted_) throw ModelError("builtin-nb: predict called before fit");
        std::vector<Prediction> out;
        out.reserve(texts.size());
        for (const auto& tokens : texts) out.push_back(predict_one(tokens));
        return out;
    }

    Prediction predict_one(const TokenList& tokens) const {
        std::map<std::string, double> bag;
        for (const auto& tok : tokens) bag[tok] += 1.0;

        std::vector<double> scores = log_prior_;
        for (std::size_t c = 0; c < labels_.size(); ++c) {
            if (std::isinf(scores[c])) continue;
            const double denom = total_[c] + alpha_ * vocab_size_;
            for (const auto& [tok, n] : bag) {
                auto it = counts_.find(tok);
                const double count = it == counts_.end() ? 0.0 : it->second[c];
                scores[c] += n * std::log((count + alpha_) / denom);
            }
        }
        return prediction_from_log_scores(labels_, scores);
    }

    const std::vector<std::string>& labels() const { return labels_; }

    static std::string format_param(double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }

private:
    std::size_t label_index(const std::string& label) const {
        return static_cast<std::size_t>(std::lower_bound(labels_.begin(), labels_.end(), label) - labels_.begin());
    }

    double alpha_;
    bool fitted_ = false;
    std::vector<std::string> labels_;
    std::vector<double> log_prior_;
    std::vector<double> total_;
    double vocab_size_ = 0.0;
    std::unordered_map<std::string, std::vector<double>> counts_;
};

struct NgramLogRegConfig {
    int epochs = 20;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
};

// Presence features: "u:<tok>" for every unigram and "b:<tok> <tok>" for
// every adjacent pair, deduplicated and sorted.
inline std::vector<std::string> ngram_features(const TokenList& tokens) {
    std::set<std::string> feats;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        feats.insert("u:" + tokens[i]);
        if (i + 1 < tokens.size()) feats.insert("b:" + tokens[i] + " " + tokens[i + 1]);
    }
    return {feats.begin(), feats.end()};
}

// Multinomial logistic regression on unigram+bigram presence, trained with
// plain SGD from zero weights. The bigrams give it a little word-order signal.
class NgramLogReg final : public Model {
public:
    explicit NgramLogReg(NgramLogRegConfig cfg = {}) : cfg_(cfg) {
        if (cfg_.epochs < 0) throw ModelError("builtin-ngram-lr: epochs must be >= 0");
        if (!(cfg_.learning_rate > 0.0)) throw ModelError("builtin-ngram-lr: learning rate must be positive");
    }

    std::string kind() const override { return "builtin-ngram-lr"; }
    std::map<std::string, std::string> config() const override {
        return {{"epochs", std::to_string(cfg_.epochs)},
                {"learning_rate", NaiveBayes::format_param(cfg_.learning_rate)},
                {"seed", std::to_string(cfg_.seed)}};
    }
    bool fitted() const override { return fitted_; }

    void fit(const std::vector<Example>& train, const std::vector<std::string>& labels) override {
        labels_ = detail::checked_label_set(train, labels);
        const std::size_t k = labels_.size();

        feature_index_.clear();
        std::vector<std::vector<std::size_t>> rows;
        std::vector<std::size_t> targets;
        rows.reserve(train.size());
        for (const auto& ex : train) {
            std::vector<std::size_t> row;
            for (auto& f : ngram_features(ex.tokens)) {
                auto [it, inserted] = feature_index_.try_emplace(std::move(f), feature_index_.size());
                row.push_back(it->second);
            }
            rows.push_back(std::move(row));
            targets.push_back(static_cast<std::size_t>(
                std::lower_bound(labels_.begin(), labels_.end(), ex.label) - labels_.begin()));
        }

        weights_.assign(feature_index_.size() * k, 0.0);
        bias_.assign(k, 0.0);

        auto rng = substream(cfg_.seed, "builtin-ngram-lr/epoch-order");
        std::vector<std::size_t> order(train.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<double> probs(k);
        for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
            order = shuffle_tokens(std::move(order), rng);
            for (auto i : order) {
                softmax_into(rows[i], probs);
                for (std::size_t c = 0; c < k; ++c) {
                    const double g = probs[c] - (c == targets[i] ? 1.0 : 0.0);
                    const double step = cfg_.learning_rate * g;
                    bias_[c] -= step;
                    for (auto f : rows[i]) weights_[f * k + c] -= step;
                }
            }
        }
        fitted_ = true;
    }

    std::vector<Prediction> predict(const std::vector<TokenList>& texts) override {
        if (!fitted_) throw ModelError("builtin-ngram-lr: predict called before fit");
        std::vector<Prediction> out;
        out.reserve(texts.size());
        for (const auto& tokens : texts) out.push_back(predict_one(tokens));
        return out;
    }

    Prediction predict_one(const TokenList& tokens) const {
        std::vector<std::size_t> row;
        for (const auto& f : ngram_features(tokens)) {
            auto it = feature_index_.find(f);
            if (it != feature_index_.end()) row.push_back(it->second);
        }
        return prediction_from_log_scores(labels_, logits(row));
    }

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& bias() const { return bias_; }

private:
    std::vector<double> logits(const std::vector<std::size_t>& row) const {
        const std::size_t k = labels_.size();
        std::vector<double> z = bias_;
        for (auto f : row)
            for (std::size_t c = 0; c < k; ++c) z[c] += weights_[f * k + c];
        return z;
    }

    void softmax_into(const std::vector<std::size_t>& row, std::vector<double>& probs) const {
        auto z = logits(row);
        const double m = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (std::size_t c = 0; c < z.size(); ++c) {
            probs[c] = std::exp(z[c] - m);
            sum += probs[c];
        }
        for (auto& p : probs) p /= sum;
    }

    NgramLogRegConfig cfg_;
    bool fitted_ = false;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> feature_index_;
    std::vector<double> weights_;  // feature-major, feature * k + class
    std::vector<double> bias_;
};

}  // namespace shuftext
