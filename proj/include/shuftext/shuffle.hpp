#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shuftext/corpus.hpp"
#include "shuftext/random.hpp"

namespace shuftext {

// Fisher-Yates, walking from the back: swap(t[i], t[below(i + 1)]).
// Identity permutations are possible and are not rejected.
template <typename T>
std::vector<T> shuffle_tokens(std::vector<T> tokens, Xoshiro256ss& rng) {
    for (std::size_t i = tokens.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        using std::swap;
        swap(tokens[i - 1], tokens[j]);
    }
    return tokens;
}

// Shuffled copy of one example; the generator is keyed by the example id so
// the result does not depend on where the example sits in its list.
inline Example shuffle_example(const Example& ex, ShuffleSeed seed,
                               const std::optional<std::string>& label_override = std::nullopt) {
    auto rng = substream(seed.value, ex.id);
    Example out;
    out.id = ex.id + "#shuf";
    out.tokens = shuffle_tokens(ex.tokens, rng);
    out.text = join_tokens(out.tokens);
    out.label = label_override ? *label_override : ex.label;
    return out;
}

inline std::vector<Example> build_shuffled_set(const std::vector<Example>& examples, ShuffleSeed seed,
                                               const std::optional<std::string>& label_override = std::nullopt) {
    std::vector<Example> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) out.push_back(shuffle_example(ex, seed, label_override));
    return out;
}

// n distinct indices of [0, population), uniform without replacement
// (partial Fisher-Yates), returned ascending.
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, Xoshiro256ss& rng) {
    std::vector<std::size_t> idx(population);
    for (std::size_t i = 0; i < population; ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace shuftext
