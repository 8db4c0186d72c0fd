#pragma once

// Report serialization: canonical JSON, result tables and box-plot data.
//
// JSON objects have sorted keys; percentages are rounded to 2 decimals and
// probabilities / box statistics to 4 before being written, so the text is a
// pure function of the report and parses back to the same numbers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "shuftext/augment.hpp"
#include "shuftext/digest.hpp"
#include "shuftext/errors.hpp"
#include "shuftext/eval.hpp"

namespace shuftext {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

enum class Experiment { shuftext, exp1, exp2 };

using AnyReport = std::variant<ShufTextReport, Exp1Report, Exp2Report>;

inline std::string_view experiment_name(Experiment e) {
    switch (e) {
        case Experiment::shuftext: return "shuftext";
        case Experiment::exp1: return "exp1";
        case Experiment::exp2: return "exp2";
    }
    return "?";
}

inline Experiment parse_experiment(std::string_view name) {
    if (name == "shuftext") return Experiment::shuftext;
    if (name == "exp1") return Experiment::exp1;
    if (name == "exp2") return Experiment::exp2;
    throw Error("unknown experiment '" + std::string(name) + "'");
}

inline Experiment experiment_of(const AnyReport& r) { return static_cast<Experiment>(r.index()); }

inline const RunConfigEcho& config_of(const AnyReport& r) {
    return std::visit([](const auto& rep) -> const RunConfigEcho& { return rep.config; }, r);
}

struct InputDigest {
    std::string role;  // train | test | generic
    std::string path;
    std::string sha256;
    friend bool operator==(const InputDigest&, const InputDigest&) = default;
};

struct RunManifest {
    std::string toolkit_version{kToolkitVersion};
    std::uint64_t seed = 0;
    std::string dataset_name;
    std::vector<InputDigest> inputs;
    std::string model_kind;
    std::string model_name;
    std::map<std::string, std::string> model_config;
    std::optional<std::string> created_at;  // only set when explicitly requested

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

inline RunManifest make_manifest(const RunConfigEcho& cfg,
                                 const std::vector<std::pair<std::string, std::filesystem::path>>& inputs,
                                 std::optional<std::string> created_at = std::nullopt) {
    RunManifest m;
    m.seed = cfg.seed;
    m.dataset_name = cfg.dataset_name;
    m.model_kind = cfg.model_kind;
    m.model_name = cfg.model_name;
    m.model_config = cfg.model_config;
    m.created_at = std::move(created_at);
    for (const auto& [role, path] : inputs) m.inputs.push_back({role, path.string(), sha256_file(path)});
    return m;
}

// Inputs whose current digest differs from the recorded one.
inline std::vector<std::string> verify_manifest(const RunManifest& m) {
    std::vector<std::string> bad;
    for (const auto& in : m.inputs) {
        try {
            if (sha256_file(in.path) != in.sha256) bad.push_back(in.path);
        } catch (const IoError&) {
            bad.push_back(in.path);
        }
    }
    return bad;
}

namespace detail {

using nlohmann::json;

inline json pct_json(double x) { return round_to(x, 2); }
inline json prob_json(double x) { return round_to(x, 4); }

inline void put_metric(json& obj, const std::string& key, const Metric& m) {
    if (m.value) {
        obj[key] = pct_json(*m.value);
    } else {
        obj[key] = nullptr;
        obj[key + "_reason"] = m.reason;
    }
}

inline Metric get_metric(const json& obj, const std::string& key) {
    if (obj.at(key).is_null()) return Metric::undefined(obj.value(key + "_reason", std::string{}));
    return {obj.at(key).get<double>(), {}};
}

inline json to_json(const Prediction& p) {
    json probs = json::object();
    for (const auto& [k, v] : p.probs) probs[k] = prob_json(v);
    return {{"label", p.label}, {"probs", probs}};
}

inline Prediction prediction_from_json(const json& j) {
    Prediction p;
    p.label = j.at("label").get<std::string>();
    for (const auto& [k, v] : j.at("probs").items()) p.probs[k] = v.get<double>();
    return p;
}

inline json to_json(const BoxPlotStats& s) {
    return {{"class_label", s.class_label}, {"n", s.n},
            {"median", prob_json(s.median)}, {"q1", prob_json(s.q1)},
            {"q3", prob_json(s.q3)}, {"lower_whisker", prob_json(s.lower_whisker)},
            {"upper_whisker", prob_json(s.upper_whisker)}, {"n_outliers", s.n_outliers}};
}

inline BoxPlotStats boxplot_from_json(const json& j) {
    BoxPlotStats s;
    s.class_label = j.at("class_label").get<std::string>();
    s.n = j.at("n").get<std::size_t>();
    s.median = j.at("median").get<double>();
    s.q1 = j.at("q1").get<double>();
    s.q3 = j.at("q3").get<double>();
    s.lower_whisker = j.at("lower_whisker").get<double>();
    s.upper_whisker = j.at("upper_whisker").get<double>();
    s.n_outliers = j.at("n_outliers").get<std::size_t>();
    return s;
}

inline json boxes_json(const std::vector<BoxPlotStats>& boxes) {
    json arr = json::array();
    for (const auto& b : boxes) arr.push_back(to_json(b));
    return arr;
}

inline std::vector<BoxPlotStats> boxes_from_json(const json& arr) {
    std::vector<BoxPlotStats> out;
    for (const auto& b : arr) out.push_back(boxplot_from_json(b));
    return out;
}

inline json records_json(const std::vector<EvalRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back({{"id", r.example_id},
                       {"gold", r.gold_label},
                       {"original", to_json(r.original_pred)},
                       {"shuffled", r.shuffled_pred ? to_json(*r.shuffled_pred) : json(nullptr)}});
    }
    return arr;
}

inline std::vector<EvalRecord> records_from_json(const json& arr) {
    std::vector<EvalRecord> out;
    for (const auto& r : arr) {
        EvalRecord rec;
        rec.example_id = r.at("id").get<std::string>();
        rec.gold_label = r.at("gold").get<std::string>();
        rec.original_pred = prediction_from_json(r.at("original"));
        if (!r.at("shuffled").is_null()) rec.shuffled_pred = prediction_from_json(r.at("shuffled"));
        out.push_back(std::move(rec));
    }
    return out;
}

inline json config_json(const RunConfigEcho& c) {
    return {{"seed", c.seed}, {"model_kind", c.model_kind}, {"model_name", c.model_name},
            {"model_config", c.model_config}, {"dataset_name", c.dataset_name}};
}

inline RunConfigEcho config_from_json(const json& j) {
    RunConfigEcho c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.model_kind = j.at("model_kind").get<std::string>();
    c.model_name = j.at("model_name").get<std::string>();
    c.model_config = j.at("model_config").get<std::map<std::string, std::string>>();
    c.dataset_name = j.at("dataset_name").get<std::string>();
    return c;
}

inline json bounds_json(const LengthSummary& b) { return {{"q1", b.q1}, {"q3", b.q3}}; }
inline LengthSummary bounds_from_json(const json& j) { return {j.at("q1").get<double>(), j.at("q3").get<double>()}; }

}  // namespace detail

inline nlohmann::json manifest_json(const RunManifest& m) {
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& in : m.inputs) inputs.push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
    return {{"toolkit_version", m.toolkit_version},
            {"seed", m.seed},
            {"dataset", {{"name", m.dataset_name}, {"inputs", inputs}}},
            {"model", {{"kind", m.model_kind}, {"name", m.model_name}, {"config", m.model_config}}},
            {"created_at", m.created_at ? nlohmann::json(*m.created_at) : nlohmann::json(nullptr)}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    m.toolkit_version = j.at("toolkit_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.dataset_name = j.at("dataset").at("name").get<std::string>();
    for (const auto& in : j.at("dataset").at("inputs"))
        m.inputs.push_back({in.at("role").get<std::string>(), in.at("path").get<std::string>(),
                            in.at("sha256").get<std::string>()});
    m.model_kind = j.at("model").at("kind").get<std::string>();
    m.model_name = j.at("model").at("name").get<std::string>();
    m.model_config = j.at("model").at("config").get<std::map<std::string, std::string>>();
    if (!j.at("created_at").is_null()) m.created_at = j.at("created_at").get<std::string>();
    return m;
}

inline nlohmann::json report_json(const AnyReport& report, const std::optional<RunManifest>& manifest = std::nullopt) {
    using detail::json;
    json j;
    j["experiment"] = experiment_name(experiment_of(report));
    j["manifest"] = manifest ? manifest_json(*manifest) : json(nullptr);
    std::visit(
        [&](const auto& rep) {
            using T = std::decay_t<decltype(rep)>;
            j["config"] = detail::config_json(rep.config);
            json metrics = json::object();
            json counts = json::object();
            json boxes = json::object();
            if constexpr (std::is_same_v<T, ShufTextReport>) {
                metrics["original_test_accuracy"] = detail::pct_json(rep.original_test_accuracy);
                detail::put_metric(metrics, "same_prediction_pct", rep.same_prediction_pct);
                counts = {{"n_test", rep.n_test}, {"n_correct", rep.n_correct}, {"n_same", rep.n_same}};
                boxes = {{"original", detail::boxes_json(rep.boxplots_original)},
                         {"shuffled", detail::boxes_json(rep.boxplots_shuffled)}};
            } else if constexpr (std::is_same_v<T, Exp1Report>) {
                metrics["original_test_accuracy"] = detail::pct_json(rep.original_test_accuracy);
                detail::put_metric(metrics, "shuffled_test_accuracy", rep.shuffled_test_accuracy);
                metrics["overall_test_accuracy"] = detail::pct_json(rep.overall_test_accuracy);
                counts = {{"n_train_augmented", rep.n_train_augmented}, {"n_added", rep.n_added},
                          {"n_test", rep.n_test}, {"n_correct_original", rep.n_correct_original},
                          {"n_shuffled", rep.n_shuffled}, {"n_correct_shuffled", rep.n_correct_shuffled}};
                boxes = {{"original", detail::boxes_json(rep.boxplots_original)},
                         {"shuffled", detail::boxes_json(rep.boxplots_shuffled)}};
            } else {
                metrics["original_test_accuracy"] = detail::pct_json(rep.original_test_accuracy);
                detail::put_metric(metrics, "generic_sentence_accuracy", rep.generic_sentence_accuracy);
                detail::put_metric(metrics, "same_prediction_pct", rep.same_prediction_pct);
                counts = {{"n_train_augmented", rep.n_train_augmented}, {"n_added", rep.n_added},
                          {"n_test", rep.n_test}, {"n_correct", rep.n_correct}, {"n_same", rep.n_same},
                          {"n_generic_test", rep.n_generic_test}, {"n_generic_correct", rep.n_generic_correct}};
                boxes = {{"original", detail::boxes_json(rep.boxplots_original)},
                         {"shuffled", detail::boxes_json(rep.boxplots_shuffled)},
                         {"generic", detail::boxes_json(rep.boxplots_generic)}};
                j["length_bounds"] = {{"train", detail::bounds_json(rep.train_bounds)},
                                      {"test", detail::bounds_json(rep.test_bounds)}};
                json gen = json::array();
                for (const auto& g : rep.generic_records)
                    gen.push_back({{"id", g.example_id}, {"pred", detail::to_json(g.pred)}});
                j["generic_records"] = gen;
            }
            j["metrics"] = metrics;
            j["counts"] = counts;
            j["boxplots"] = boxes;
            j["records"] = detail::records_json(rep.records);
        },
        report);
    return j;
}

inline AnyReport report_from_json(const nlohmann::json& j) {
    const auto exp = parse_experiment(j.at("experiment").get<std::string>());
    const auto& m = j.at("metrics");
    const auto& c = j.at("counts");
    const auto& b = j.at("boxplots");
    auto n = [&](const char* key) { return c.at(key).get<std::size_t>(); };
    switch (exp) {
        case Experiment::shuftext: {
            ShufTextReport r;
            r.config = detail::config_from_json(j.at("config"));
            r.original_test_accuracy = m.at("original_test_accuracy").get<double>();
            r.same_prediction_pct = detail::get_metric(m, "same_prediction_pct");
            r.n_test = n("n_test");
            r.n_correct = n("n_correct");
            r.n_same = n("n_same");
            r.boxplots_original = detail::boxes_from_json(b.at("original"));
            r.boxplots_shuffled = detail::boxes_from_json(b.at("shuffled"));
            r.records = detail::records_from_json(j.at("records"));
            return r;
        }
        case Experiment::exp1: {
            Exp1Report r;
            r.config = detail::config_from_json(j.at("config"));
            r.original_test_accuracy = m.at("original_test_accuracy").get<double>();
            r.shuffled_test_accuracy = detail::get_metric(m, "shuffled_test_accuracy");
            r.overall_test_accuracy = m.at("overall_test_accuracy").get<double>();
            r.n_train_augmented = n("n_train_augmented");
            r.n_added = n("n_added");
            r.n_test = n("n_test");
            r.n_correct_original = n("n_correct_original");
            r.n_shuffled = n("n_shuffled");
            r.n_correct_shuffled = n("n_correct_shuffled");
            r.boxplots_original = detail::boxes_from_json(b.at("original"));
            r.boxplots_shuffled = detail::boxes_from_json(b.at("shuffled"));
            r.records = detail::records_from_json(j.at("records"));
            return r;
        }
        case Experiment::exp2: {
            Exp2Report r;
            r.config = detail::config_from_json(j.at("config"));
            r.original_test_accuracy = m.at("original_test_accuracy").get<double>();
            r.generic_sentence_accuracy = detail::get_metric(m, "generic_sentence_accuracy");
            r.same_prediction_pct = detail::get_metric(m, "same_prediction_pct");
            r.n_train_augmented = n("n_train_augmented");
            r.n_added = n("n_added");
            r.n_test = n("n_test");
            r.n_correct = n("n_correct");
            r.n_same = n("n_same");
            r.n_generic_test = n("n_generic_test");
            r.n_generic_correct = n("n_generic_correct");
            r.train_bounds = detail::bounds_from_json(j.at("length_bounds").at("train"));
            r.test_bounds = detail::bounds_from_json(j.at("length_bounds").at("test"));
            r.boxplots_original = detail::boxes_from_json(b.at("original"));
            r.boxplots_shuffled = detail::boxes_from_json(b.at("shuffled"));
            r.boxplots_generic = detail::boxes_from_json(b.at("generic"));
            r.records = detail::records_from_json(j.at("records"));
            for (const auto& g : j.at("generic_records"))
                r.generic_records.push_back(
                    {g.at("id").get<std::string>(), detail::prediction_from_json(g.at("pred"))});
            return r;
        }
    }
    throw Error("unreachable");
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::string fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, round_to(x, decimals));
    // "-0.00" would otherwise leak through for tiny negatives
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string csv(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            out += csv_field(row[i]);
        }
        out.push_back('\n');
    }
    return out;
}

inline std::string metric_cell(const Metric& m) { return m.value ? fixed(*m.value, 2) : "NA"; }

}  // namespace detail

inline std::string report_json_text(const AnyReport& report, const std::optional<RunManifest>& manifest = std::nullopt) {
    return report_json(report, manifest).dump(2) + "\n";
}

inline void emit_json(const AnyReport& report, const std::optional<RunManifest>& manifest,
                      const std::filesystem::path& path) {
    detail::write_file(path, report_json_text(report, manifest));
}

inline std::vector<std::string> table_header(Experiment e) {
    switch (e) {
        case Experiment::shuftext:
            return {"Model", "Dataset", "Original Test Accuracy", "Percentage of Same Prediction"};
        case Experiment::exp1:
            return {"Model", "Dataset", "Original Test Accuracy", "Shuffled Test Accuracy", "Overall Test Accuracy"};
        case Experiment::exp2:
            return {"Model", "Dataset", "Original Test Accuracy", "Generic Sentence Accuracy",
                    "Percentage of same Prediction"};
    }
    return {};
}

// Header plus one row per report, values at 2 decimals; NA for undefined.
inline std::vector<std::vector<std::string>> table_rows(const std::vector<AnyReport>& reports, Experiment e) {
    std::vector<std::vector<std::string>> rows{table_header(e)};
    for (const auto& r : reports) {
        if (experiment_of(r) != e)
            throw Error("report of type " + std::string(experiment_name(experiment_of(r))) +
                        " in a " + std::string(experiment_name(e)) + " table");
        const auto& cfg = config_of(r);
        std::vector<std::string> row{cfg.model_name, cfg.dataset_name};
        std::visit(
            [&](const auto& rep) {
                using T = std::decay_t<decltype(rep)>;
                row.push_back(detail::fixed(rep.original_test_accuracy, 2));
                if constexpr (std::is_same_v<T, ShufTextReport>) {
                    row.push_back(detail::metric_cell(rep.same_prediction_pct));
                } else if constexpr (std::is_same_v<T, Exp1Report>) {
                    row.push_back(detail::metric_cell(rep.shuffled_test_accuracy));
                    row.push_back(detail::fixed(rep.overall_test_accuracy, 2));
                } else {
                    row.push_back(detail::metric_cell(rep.generic_sentence_accuracy));
                    row.push_back(detail::metric_cell(rep.same_prediction_pct));
                }
            },
            r);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string table_csv(const std::vector<AnyReport>& reports, Experiment e) {
    return detail::csv(table_rows(reports, e));
}

inline void emit_table_csv(const std::vector<AnyReport>& reports, Experiment e, const std::filesystem::path& path) {
    detail::write_file(path, table_csv(reports, e));
}

// Space-aligned rendering of table_rows for terminals.
inline std::string table_text(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (width.size() <= i) width.push_back(0);
            width[i] = std::max(width[i], row[i].size());
        }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += row[i];
            if (i + 1 < row.size()) out += std::string(width[i] - row[i].size() + 2, ' ');
        }
        out += '\n';
    }
    return out;
}

inline std::string boxplot_csv(const AnyReport& report) {
    std::vector<std::vector<std::string>> rows{
        {"panel", "class_label", "n", "median", "q1", "q3", "lower_whisker", "upper_whisker", "n_outliers"}};
    auto panel = [&](const char* name, const std::vector<BoxPlotStats>& boxes) {
        for (const auto& s : boxes) {
            if (!s.ordered())
                throw Error(std::string("box-plot ordering violated for panel ") + name + ", class " + s.class_label);
            rows.push_back({name, s.class_label, std::to_string(s.n), detail::fixed(s.median, 4),
                            detail::fixed(s.q1, 4), detail::fixed(s.q3, 4), detail::fixed(s.lower_whisker, 4),
                            detail::fixed(s.upper_whisker, 4), std::to_string(s.n_outliers)});
        }
    };
    std::visit(
        [&](const auto& rep) {
            panel("original", rep.boxplots_original);
            panel("shuffled", rep.boxplots_shuffled);
            if constexpr (std::is_same_v<std::decay_t<decltype(rep)>, Exp2Report>) panel("generic", rep.boxplots_generic);
        },
        report);
    return detail::csv(rows);
}

inline void emit_boxplot_data(const AnyReport& report, const std::filesystem::path& path) {
    detail::write_file(path, boxplot_csv(report));
}

struct ReportPaths {
    std::filesystem::path json;
    std::filesystem::path boxplot;
    std::filesystem::path summary;
};

// <outdir>/<experiment>/<model>_<dataset>.report.json, .boxplot.csv, summary.csv
inline ReportPaths report_paths(const std::filesystem::path& outdir, Experiment e, const std::string& model_name,
                                const std::string& dataset_name) {
    const auto dir = outdir / std::string(experiment_name(e));
    const auto stem = model_name + "_" + dataset_name;
    return {dir / (stem + ".report.json"), dir / (stem + ".boxplot.csv"), dir / "summary.csv"};
}

inline std::pair<AnyReport, std::optional<RunManifest>> read_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        const auto j = nlohmann::json::parse(in);
        std::optional<RunManifest> m;
        if (!j.at("manifest").is_null()) m = manifest_from_json(j.at("manifest"));
        return {report_from_json(j), m};
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed report " + path.string() + ": " + e.what());
    }
}

// Rebuilds summary.csv from every report of experiment `e` in its directory,
// ordered by file name. Returns the table rows.
inline std::vector<std::vector<std::string>> refresh_summary(const std::filesystem::path& outdir, Experiment e) {
    const auto dir = outdir / std::string(experiment_name(e));
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() > 12 && name.ends_with(".report.json")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<AnyReport> reports;
    for (const auto& f : files) reports.push_back(read_report(f).first);
    emit_table_csv(reports, e, dir / "summary.csv");
    return table_rows(reports, e);
}

}  // namespace shuftext
