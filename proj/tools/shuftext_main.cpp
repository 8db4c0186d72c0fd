// shuftext: word-order sensitivity experiments for text classifiers.
//
//   shuftext run      --train T --test S [--model M] [--seed N] [--out DIR]
//   shuftext exp1     (same flags)                    shuffled-class augmentation
//   shuftext exp2     (same flags) --generic-corpus G generic-class augmentation
//   shuftext protocol-check --adapter "CMD"           adapter conformance replay

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shuftext.hpp"

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kDataError = 3,
    kAdapterError = 4,
    kModelError = 5,
    kIoError = 6,
};

struct Options {
    std::string train;
    std::string test;
    std::string format;
    std::string name;
    std::string model = "builtin-nb";
    std::vector<std::string> model_params;
    std::string adapter;
    std::optional<double> adapter_timeout;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    std::string out = "out";
    std::string generic_corpus;
    bool record_time = false;
};

class UsageError : public shuftext::Error {
public:
    using Error::Error;
};

std::string safe_name(const std::string& raw) {
    std::string out;
    for (char c : raw) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '-');
    return out.empty() ? "dataset" : out;
}

// Train file stem, or its directory name when the file is just "train.*".
std::string default_dataset_name(const std::filesystem::path& train) {
    auto stem = train.stem().string();
    if (stem == "train" && train.has_parent_path()) {
        auto dir = std::filesystem::absolute(train).parent_path().filename().string();
        if (!dir.empty()) return dir;
    }
    return stem;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

shuftext::ModelSpec model_spec(const Options& o) {
    shuftext::ModelSpec spec;
    spec.kind = o.model;
    for (const auto& kv : o.model_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--model-param expects key=value, got '" + kv + "'");
        spec.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    spec.adapter_command = o.adapter;
    if (spec.kind == "external" && spec.adapter_command.empty())
        throw UsageError("--model external requires --adapter \"<command>\"");
    if (spec.kind != "external" && !spec.adapter_command.empty())
        throw UsageError("--adapter is only valid with --model external");

    // flag > environment > default
    spec.adapter.timeout_secs = 120.0;
    if (auto env = shuftext::timeout_from_env()) spec.adapter.timeout_secs = *env;
    if (o.adapter_timeout) spec.adapter.timeout_secs = *o.adapter_timeout;
    spec.adapter.batch_size = o.batch_size;
    return spec;
}

int run_pipeline(shuftext::Experiment experiment, const Options& o) {
    using namespace shuftext;
    const Format format = o.format.empty() ? format_from_path(o.train) : parse_format(o.format);
    const auto spec = model_spec(o);

    Dataset ds = load_dataset(o.train, o.test, format, safe_name(o.name.empty() ? default_dataset_name(o.train) : o.name));
    std::vector<std::pair<std::string, std::filesystem::path>> inputs{{"train", o.train}, {"test", o.test}};

    auto model = make_model(spec);
    const ShuffleSeed seed{o.seed};
    AnyReport report;
    switch (experiment) {
        case Experiment::shuftext:
            report = run_shuftext(*model, ds, seed);
            break;
        case Experiment::exp1:
            report = run_experiment1(*model, ds, seed);
            break;
        case Experiment::exp2: {
            const auto generic = load_generic_corpus(o.generic_corpus, format_from_path(o.generic_corpus));
            inputs.emplace_back("generic", o.generic_corpus);
            report = run_experiment2(*model, ds, generic, seed);
            break;
        }
    }

    const auto manifest =
        make_manifest(config_of(report), inputs, o.record_time ? std::optional<std::string>(utc_now()) : std::nullopt);
    const auto paths = report_paths(o.out, experiment, model->name(), ds.name);
    emit_json(report, manifest, paths.json);
    emit_boxplot_data(report, paths.boxplot);
    const auto rows = refresh_summary(o.out, experiment);

    std::cout << table_text(rows);
    std::cout << "seed " << o.seed << "; wrote " << paths.json.string() << ", " << paths.boxplot.string() << ", "
              << paths.summary.string() << "\n";
    return kOk;
}

int run_protocol_check(const Options& o) {
    double timeout = 10.0;
    if (auto env = shuftext::timeout_from_env()) timeout = *env;
    if (o.adapter_timeout) timeout = *o.adapter_timeout;
    const auto results = shuftext::protocol_check(o.adapter, timeout);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name;
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << "\n";
    }
    std::cout << (all ? "adapter conforms" : "adapter does not conform") << "\n";
    return all ? kOk : kFailure;
}

void add_pipeline_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--train", o.train, "Training split (TSV label<TAB>text or JSONL)")->required();
    cmd->add_option("--test", o.test, "Test split")->required();
    cmd->add_option("--format", o.format, "Input format; inferred from the extension when omitted")
        ->check(CLI::IsMember({"tsv", "jsonl"}));
    cmd->add_option("--name", o.name, "Dataset name used in reports (default: train file stem)");
    cmd->add_option("--model", o.model, "builtin-nb, builtin-ngram-lr or external");
    cmd->add_option("--model-param", o.model_params, "Model parameter key=value (repeatable)");
    cmd->add_option("--adapter", o.adapter, "Adapter command line for --model external");
    cmd->add_option("--adapter-timeout", o.adapter_timeout, "Seconds per adapter request (default 120)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--batch-size", o.batch_size, "Texts per adapter predict request")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Shuffle seed (unsigned 64-bit)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_flag("--record-time", o.record_time, "Store a creation timestamp in the manifest");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Word-order sensitivity tests for text classifiers"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "Shuffle test on correctly classified test sentences");
    run->alias("shuftext");
    add_pipeline_flags(run, o);
    auto* exp1 = app.add_subcommand("exp1", "Shuffled-class augmentation experiment");
    add_pipeline_flags(exp1, o);
    auto* exp2 = app.add_subcommand("exp2", "Generic-class augmentation experiment");
    add_pipeline_flags(exp2, o);
    exp2->add_option("--generic-corpus", o.generic_corpus, "Out-of-domain sentences (TSV/JSONL, labels ignored)")
        ->required();
    auto* check = app.add_subcommand("protocol-check", "Replay the adapter conformance suite");
    check->add_option("--adapter", o.adapter, "Adapter command line")->required();
    check->add_option("--adapter-timeout", o.adapter_timeout, "Seconds per request (default 10)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*run) return run_pipeline(shuftext::Experiment::shuftext, o);
        if (*exp1) return run_pipeline(shuftext::Experiment::exp1, o);
        if (*exp2) return run_pipeline(shuftext::Experiment::exp2, o);
        if (*check) return run_protocol_check(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const shuftext::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const shuftext::AdapterError& e) {
        std::cerr << "adapter error: " << e.what() << "\n";
        return kAdapterError;
    } catch (const shuftext::ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kModelError;
    } catch (const shuftext::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
