#pragma once

// Client for external classifier processes speaking newline-delimited JSON:
//
//   {"op":"hello"}                                   -> {"op":"hello","name":str,"can_fit":bool}
//   {"op":"fit","labels":[...],"train":[{"text","label"},...]}
//                                                    -> {"op":"ok"} | {"op":"err","msg":str}
//   {"op":"predict","id":int,"texts":[str,...]}      -> {"op":"predictions","id":int,
//                                                        "predictions":[{"label","probs"},...]}

#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shuftext/errors.hpp"
#include "shuftext/models.hpp"
#include "shuftext/subprocess.hpp"

namespace shuftext {

struct AdapterOptions {
    double timeout_secs = 120.0;
    std::size_t batch_size = 64;
};

// Timeout from SHUFTEXT_ADAPTER_TIMEOUT_SECS, if set and valid.
inline std::optional<double> timeout_from_env() {
    const char* raw = std::getenv("SHUFTEXT_ADAPTER_TIMEOUT_SECS");
    if (!raw || !*raw) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(v > 0.0))
        throw Error("SHUFTEXT_ADAPTER_TIMEOUT_SECS must be a positive number, got '" + std::string(raw) + "'");
    return v;
}

// One adapter process; at most one request in flight.
class AdapterConnection {
public:
    AdapterConnection(std::string command, double timeout_secs)
        : command_(std::move(command)), timeout_(timeout_secs), proc_(command_) {}

    nlohmann::json request(const nlohmann::json& msg) { return request_raw(msg.dump()); }

    // Sends an arbitrary line; used to probe error handling.
    nlohmann::json request_raw(const std::string& line) {
        const auto deadline = Subprocess::Clock::now() +
                              std::chrono::duration_cast<Subprocess::Clock::duration>(
                                  std::chrono::duration<double>(timeout_));
        proc_.write_line(line, deadline);
        auto reply = proc_.read_line(deadline);
        if (!reply) throw AdapterError("adapter '" + command_ + "' exited unexpectedly" + stderr_suffix());
        try {
            return nlohmann::json::parse(*reply);
        } catch (const nlohmann::json::parse_error&) {
            throw AdapterError("adapter sent a line that is not JSON: " + excerpt(*reply));
        }
    }

    std::string stderr_suffix() {
        auto e = proc_.stderr_excerpt();
        return e.empty() ? std::string{} : "; adapter stderr: " + e;
    }

    bool running() { return proc_.running(); }
    const std::string& command() const { return command_; }

    static std::string excerpt(const std::string& s) { return s.size() > 200 ? s.substr(0, 200) + "..." : s; }

private:
    std::string command_;
    double timeout_;
    Subprocess proc_;
};

namespace detail {

inline std::string op_of(const nlohmann::json& msg) {
    if (msg.is_object() && msg.contains("op") && msg["op"].is_string()) return msg["op"].get<std::string>();
    return {};
}

// Validates one predictions response against the request; returns the parsed
// predictions or throws naming the offending item.
inline std::vector<Prediction> parse_predictions(const nlohmann::json& resp, long long id, std::size_t expected,
                                                 const std::vector<std::string>& labels) {
    const std::string ctx = "adapter response to predict id " + std::to_string(id);
    if (op_of(resp) == "err")
        throw AdapterError(ctx + ": adapter error: " + resp.value("msg", std::string("(no message)")));
    if (op_of(resp) != "predictions") throw AdapterError(ctx + ": expected op \"predictions\", got " + resp.dump());
    if (!resp.contains("id") || !resp["id"].is_number_integer())
        throw AdapterError(ctx + ": missing id");
    if (resp["id"].get<long long>() != id)
        throw AdapterError(ctx + ": id mismatch (got " + resp["id"].dump() + ")");
    if (!resp.contains("predictions") || !resp["predictions"].is_array())
        throw AdapterError(ctx + ": missing predictions array");
    const auto& arr = resp["predictions"];
    if (arr.size() != expected)
        throw AdapterError(ctx + ": expected " + std::to_string(expected) + " predictions, got " +
                           std::to_string(arr.size()));

    std::vector<Prediction> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& item = arr[i];
        const std::string where = ctx + ", item " + std::to_string(i);
        if (!item.is_object() || !item.contains("label") || !item["label"].is_string() ||
            !item.contains("probs") || !item["probs"].is_object())
            throw AdapterError(where + ": needs string \"label\" and object \"probs\"");
        Prediction p;
        p.label = item["label"].get<std::string>();
        for (const auto& [k, v] : item["probs"].items()) {
            if (!v.is_number()) throw AdapterError(where + ": non-numeric probability for '" + k + "'");
            if (!labels.empty() && !std::binary_search(labels.begin(), labels.end(), k))
                throw AdapterError(where + ": unknown label '" + k + "'");
            p.probs[k] = v.get<double>();
        }
        const auto bad = simplex_violation(p.probs, labels);
        if (!bad.empty()) throw AdapterError(where + ": non-simplex probs: " + bad);
        if (argmax_label(p.probs) != p.label)
            throw AdapterError(where + ": label '" + p.label + "' is not the argmax of probs");
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace detail

class ExternalModel final : public Model {
public:
    ExternalModel(std::string command, AdapterOptions options = {})
        : options_(options), conn_(std::make_unique<AdapterConnection>(std::move(command), options.timeout_secs)) {
        if (options_.batch_size == 0) throw ModelError("adapter batch size must be positive");
        const auto hello = conn_->request({{"op", "hello"}});
        if (detail::op_of(hello) != "hello" || !hello.contains("name") || !hello["name"].is_string() ||
            !hello.contains("can_fit") || !hello["can_fit"].is_boolean())
            throw AdapterError("bad hello response: " + hello.dump());
        adapter_name_ = hello["name"].get<std::string>();
        can_fit_ = hello["can_fit"].get<bool>();
    }

    std::string kind() const override { return "external"; }

    std::string name() const override {
        std::string safe;
        for (char c : adapter_name_) safe.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '-');
        return "external-" + (safe.empty() ? std::string("adapter") : safe);
    }

    std::map<std::string, std::string> config() const override {
        return {{"command", conn_->command()},
                {"adapter_name", adapter_name_},
                {"can_fit", can_fit_ ? "true" : "false"},
                {"batch_size", std::to_string(options_.batch_size)},
                {"timeout_secs", NaiveBayes::format_param(options_.timeout_secs)}};
    }

    bool fitted() const override { return fitted_; }
    bool can_fit() const override { return can_fit_; }

    // Adapters that cannot fit are treated as pre-trained; only the label set
    // is recorded for response validation.
    void fit(const std::vector<Example>& train, const std::vector<std::string>& labels) override {
        labels_ = detail::checked_label_set(train, labels);
        if (can_fit_) {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& ex : train) rows.push_back({{"text", join_tokens(ex.tokens)}, {"label", ex.label}});
            const auto resp = conn_->request({{"op", "fit"}, {"labels", labels_}, {"train", rows}});
            if (detail::op_of(resp) == "err")
                throw AdapterError("adapter fit failed: " + resp.value("msg", std::string("(no message)")) +
                                   conn_->stderr_suffix());
            if (detail::op_of(resp) != "ok") throw AdapterError("bad fit response: " + resp.dump());
        }
        fitted_ = true;
    }

    std::vector<Prediction> predict(const std::vector<TokenList>& texts) override {
        if (!fitted_) throw ModelError("external: predict called before fit");
        std::vector<Prediction> out;
        out.reserve(texts.size());
        for (std::size_t start = 0; start < texts.size(); start += options_.batch_size) {
            const auto stop = std::min(texts.size(), start + options_.batch_size);
            nlohmann::json batch = nlohmann::json::array();
            for (auto i = start; i < stop; ++i) batch.push_back(join_tokens(texts[i]));
            const auto id = next_id_++;
            const auto resp = conn_->request({{"op", "predict"}, {"id", id}, {"texts", batch}});
            auto preds = detail::parse_predictions(resp, id, stop - start, labels_);
            for (auto& p : preds) out.push_back(std::move(p));
        }
        return out;
    }

private:
    AdapterOptions options_;
    std::unique_ptr<AdapterConnection> conn_;
    std::string adapter_name_;
    bool can_fit_ = false;
    bool fitted_ = false;
    std::vector<std::string> labels_;
    long long next_id_ = 1;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Conformance replay against an adapter: hello, fit, predict, id echo,
// simplex validity and recovery from a malformed request.
inline std::vector<CheckResult> protocol_check(const std::string& command, double timeout_secs = 10.0) {
    std::vector<CheckResult> results;
    auto record = [&](std::string name, bool ok, std::string detail) {
        results.push_back({std::move(name), ok, std::move(detail)});
    };
    const std::vector<std::string> names = {"hello", "fit", "predict", "id-echo", "simplex", "malformed-recovery"};

    std::unique_ptr<AdapterConnection> conn;
    try {
        conn = std::make_unique<AdapterConnection>(command, timeout_secs);
    } catch (const Error& e) {
        for (const auto& n : names) record(n, false, e.what());
        return results;
    }

    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const Error& e) {
            record(name, false, e.what());
        } catch (const nlohmann::json::exception& e) {
            record(name, false, std::string("bad JSON shape: ") + e.what());
        }
    };

    bool can_fit = false;
    guarded("hello", [&] {
        const auto r = conn->request({{"op", "hello"}});
        const bool ok = detail::op_of(r) == "hello" && r.contains("name") && r["name"].is_string() &&
                        r.contains("can_fit") && r["can_fit"].is_boolean();
        if (ok) can_fit = r["can_fit"].get<bool>();
        record("hello", ok, ok ? "name=" + r["name"].get<std::string>() : "bad response: " + r.dump());
    });

    const std::vector<std::string> labels = {"neg", "pos"};
    guarded("fit", [&] {
        if (!can_fit) {
            record("fit", true, "skipped: adapter reports can_fit=false");
            return;
        }
        nlohmann::json train = nlohmann::json::array({
            {{"text", "good great fine"}, {"label", "pos"}},
            {{"text", "lovely good film"}, {"label", "pos"}},
            {{"text", "bad awful poor"}, {"label", "neg"}},
            {{"text", "boring bad film"}, {"label", "neg"}},
        });
        const auto r = conn->request({{"op", "fit"}, {"labels", labels}, {"train", train}});
        const bool ok = detail::op_of(r) == "ok";
        record("fit", ok, ok ? "" : "expected {\"op\":\"ok\"}, got " + r.dump());
    });

    nlohmann::json last_predictions;
    const nlohmann::json texts = {"good great fine", "bad awful poor"};
    guarded("predict", [&] {
        const auto r = conn->request({{"op", "predict"}, {"id", 7}, {"texts", texts}});
        const bool ok = detail::op_of(r) == "predictions" && r.contains("predictions") &&
                        r["predictions"].is_array() && r["predictions"].size() == texts.size();
        if (ok) last_predictions = r;
        record("predict", ok, ok ? "" : "bad response: " + r.dump());
    });

    guarded("id-echo", [&] {
        const long long id = 4242;
        const auto r = conn->request({{"op", "predict"}, {"id", id}, {"texts", nlohmann::json::array({"fine film"})}});
        const bool ok = r.contains("id") && r["id"].is_number_integer() && r["id"].get<long long>() == id;
        record("id-echo", ok, ok ? "" : "expected id 4242, got " + r.dump());
    });

    guarded("simplex", [&] {
        if (last_predictions.is_null()) {
            record("simplex", false, "no predictions to validate");
            return;
        }
        std::vector<std::string> seen = labels;
        if (!can_fit) {
            seen.clear();
            for (const auto& [k, v] : last_predictions["predictions"][0]["probs"].items()) seen.push_back(k);
        }
        // id echo is judged separately; validate against whatever id came back
        const auto id = last_predictions.value("id", 7LL);
        detail::parse_predictions(last_predictions, id, texts.size(), seen);
        record("simplex", true, "");
    });

    guarded("malformed-recovery", [&] {
        const auto r = conn->request_raw("this is not json");
        if (detail::op_of(r) != "err") {
            record("malformed-recovery", false, "expected {\"op\":\"err\"}, got " + r.dump());
            return;
        }
        const auto again = conn->request({{"op", "hello"}});
        const bool ok = detail::op_of(again) == "hello";
        record("malformed-recovery", ok, ok ? "" : "adapter did not answer after the error: " + again.dump());
    });
    return results;
}

}  // namespace shuftext
