#pragma once

#include <map>
#include <memory>
#include <string>

#include "shuftext/adapter.hpp"
#include "shuftext/errors.hpp"
#include "shuftext/models.hpp"

namespace shuftext {

struct ModelSpec {
    std::string kind = "builtin-nb";  // builtin-nb | builtin-ngram-lr | external
    std::map<std::string, std::string> params;
    std::string adapter_command;
    AdapterOptions adapter;
};

namespace detail {

inline double param_double(const std::map<std::string, std::string>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    if (it == p.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw ModelError("model parameter " + key + "='" + it->second + "' is not a number");
    }
}

inline std::uint64_t param_u64(const std::map<std::string, std::string>& p, const std::string& key,
                               std::uint64_t fallback) {
    auto it = p.find(key);
    if (it == p.end()) return fallback;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(it->second, &used);
        if (used != it->second.size() || it->second.front() == '-') throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw ModelError("model parameter " + key + "='" + it->second + "' is not a non-negative integer");
    }
}

inline void reject_unknown(const std::map<std::string, std::string>& p, std::initializer_list<std::string> known,
                           const std::string& kind) {
    for (const auto& [k, v] : p)
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw ModelError("unknown parameter '" + k + "' for " + kind);
}

}  // namespace detail

inline std::unique_ptr<Model> make_model(const ModelSpec& spec) {
    if (spec.kind == "builtin-nb") {
        detail::reject_unknown(spec.params, {"alpha"}, spec.kind);
        return std::make_unique<NaiveBayes>(detail::param_double(spec.params, "alpha", 1.0));
    }
    if (spec.kind == "builtin-ngram-lr") {
        detail::reject_unknown(spec.params, {"epochs", "learning_rate", "seed"}, spec.kind);
        NgramLogRegConfig cfg;
        cfg.epochs = static_cast<int>(detail::param_u64(spec.params, "epochs", 20));
        cfg.learning_rate = detail::param_double(spec.params, "learning_rate", 0.1);
        cfg.seed = detail::param_u64(spec.params, "seed", 0);
        return std::make_unique<NgramLogReg>(cfg);
    }
    if (spec.kind == "external") {
        if (spec.adapter_command.empty()) throw ModelError("external model needs an adapter command");
        return std::make_unique<ExternalModel>(spec.adapter_command, spec.adapter);
    }
    throw ModelError("unknown model '" + spec.kind + "' (expected builtin-nb, builtin-ngram-lr or external)");
}

}  // namespace shuftext
