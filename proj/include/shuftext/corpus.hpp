#pragma once

// Labeled text datasets: tokenization, loading, and length statistics.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shuftext/errors.hpp"
#include "shuftext/stats.hpp"

namespace shuftext {

inline constexpr std::string_view kShuffledLabel = "__shuffled__";
inline constexpr std::string_view kGenericLabel = "__generic__";

struct Example {
    std::string id;
    std::string text;
    std::vector<std::string> tokens;
    std::string label;

    friend bool operator==(const Example&, const Example&) = default;
};

struct Dataset {
    std::string name;
    std::vector<std::string> labels;  // sorted, unique
    std::vector<Example> train;
    std::vector<Example> test;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct LengthSummary {
    double q1 = 0.0;
    double q3 = 0.0;

    bool contains(std::size_t length) const {
        const auto x = static_cast<double>(length);
        return q1 <= x && x <= q3;
    }

    friend bool operator==(const LengthSummary&, const LengthSummary&) = default;
};

enum class Format { tsv, jsonl };

namespace detail {

inline constexpr char32_t kReplacement = 0xFFFD;

inline std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        int len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        }
        bool ok = len > 0 && i + static_cast<std::size_t>(len) <= s.size();
        for (int k = 1; ok && k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
            if ((b & 0xC0) != 0x80) ok = false;
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(len);
    }
    return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Unicode White_Space property.
inline bool is_space(char32_t c) {
    return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
           (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
           c == 0x205F || c == 0x3000;
}

inline bool is_punct(char32_t c) {
    if (c < 0x80) {
        return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
               (c >= 0x7B && c <= 0x7E);
    }
    return c == 0xA1 || c == 0xAB || c == 0xB7 || c == 0xBB || c == 0xBF ||
           (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
           (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011);
}

// Simple case folding for Latin, Greek and Cyrillic; other scripts pass through.
inline char32_t to_lower(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 0x20;
    if (c < 0xC0) return c;
    if (c <= 0xDE) return c == 0xD7 ? c : c + 0x20;
    if ((c >= 0x100 && c <= 0x137) || (c >= 0x14A && c <= 0x177)) return (c % 2 == 0) ? c + 1 : c;
    if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) return (c % 2 == 1) ? c + 1 : c;
    if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
    if (c >= 0x400 && c <= 0x40F) return c + 0x50;
    if (c >= 0x410 && c <= 0x42F) return c + 0x20;
    return c;
}

inline std::string encode(std::u32string_view cps) {
    std::string out;
    for (char32_t c : cps) append_utf8(out, c);
    return out;
}

inline void split_chunk(std::u32string_view chunk, std::vector<std::string>& out) {
    std::size_t begin = 0;
    std::size_t end = chunk.size();
    while (begin < end && is_punct(chunk[begin])) {
        out.push_back(encode(chunk.substr(begin, 1)));
        ++begin;
    }
    std::size_t trail = end;
    while (trail > begin && is_punct(chunk[trail - 1])) --trail;
    if (trail > begin) out.push_back(encode(chunk.substr(begin, trail - begin)));
    for (std::size_t k = trail; k < end; ++k) out.push_back(encode(chunk.substr(k, 1)));
}

}  // namespace detail

// Lowercases, splits on Unicode whitespace and detaches leading/trailing
// punctuation one character per token. Internal punctuation ("don't",
// "u.s") stays inside the word.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::u32string cps = detail::decode_utf8(text);
    for (auto& c : cps) c = detail::to_lower(c);

    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && detail::is_space(cps[i])) ++i;
        std::size_t j = i;
        while (j < cps.size() && !detail::is_space(cps[j])) ++j;
        if (j > i) detail::split_chunk(std::u32string_view(cps).substr(i, j - i), tokens);
        i = j;
    }
    return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

inline bool is_reserved_label(std::string_view label) {
    return label == kShuffledLabel || label == kGenericLabel;
}

inline Format format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return Format::jsonl;
    return Format::tsv;
}

inline Format parse_format(std::string_view name) {
    if (name == "tsv") return Format::tsv;
    if (name == "jsonl") return Format::jsonl;
    throw DataError("unknown format '" + std::string(name) + "' (expected tsv or jsonl)");
}

namespace detail {

struct RawRecord {
    std::size_t line = 0;
    std::string label;
    std::string text;
};

inline std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

// Reads nonblank records. When `label_required` is false a TSV line without a
// tab is taken as bare text and a missing JSONL label is accepted.
inline std::vector<RawRecord> read_records(const std::filesystem::path& path, Format format,
                                           bool label_required) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());

    std::vector<RawRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        RawRecord rec;
        rec.line = lineno;
        if (format == Format::tsv) {
            const auto tab = line.find('\t');
            if (tab == std::string::npos) {
                if (label_required)
                    throw DataError(where(path, lineno) + ": malformed line (expected label<TAB>text)");
                rec.text = line;
            } else {
                rec.label = line.substr(0, tab);
                rec.text = line.substr(tab + 1);
            }
        } else {
            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw DataError(where(path, lineno) + ": malformed JSON (" + e.what() + ")");
            }
            if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string())
                throw DataError(where(path, lineno) + ": record needs a string \"text\" field");
            rec.text = obj["text"].get<std::string>();
            if (obj.contains("label")) {
                if (!obj["label"].is_string())
                    throw DataError(where(path, lineno) + ": \"label\" must be a string");
                rec.label = obj["label"].get<std::string>();
            } else if (label_required) {
                throw DataError(where(path, lineno) + ": record needs a string \"label\" field");
            }
        }
        if (label_required && rec.label.empty())
            throw DataError(where(path, lineno) + ": empty label");
        if (tokenize(rec.text).empty()) throw DataError(where(path, lineno) + ": empty text");
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw DataError("empty split: " + path.string());
    return records;
}

}  // namespace detail

// One split file -> examples with ids "<split>:<line-number>".
inline std::vector<Example> load_split(const std::filesystem::path& path, Format format,
                                       std::string_view split) {
    std::vector<Example> out;
    for (auto& rec : detail::read_records(path, format, true)) {
        if (is_reserved_label(rec.label))
            throw DataError(detail::where(path, rec.line) + ": label '" + rec.label +
                            "' is reserved by the toolkit");
        Example ex;
        ex.id = std::string(split) + ":" + std::to_string(rec.line);
        ex.tokens = tokenize(rec.text);
        ex.text = std::move(rec.text);
        ex.label = std::move(rec.label);
        out.push_back(std::move(ex));
    }
    return out;
}

inline Dataset load_dataset(const std::filesystem::path& train_path,
                            const std::filesystem::path& test_path, Format format,
                            std::string name = {}) {
    Dataset ds;
    ds.name = name.empty() ? train_path.stem().string() : std::move(name);
    ds.train = load_split(train_path, format, "train");
    ds.test = load_split(test_path, format, "test");

    std::set<std::string> labels;
    for (const auto& ex : ds.train) labels.insert(ex.label);
    for (const auto& ex : ds.test) labels.insert(ex.label);
    ds.labels.assign(labels.begin(), labels.end());
    return ds;
}

// Out-of-domain sentences; any label column is ignored.
inline std::vector<Example> load_generic_corpus(const std::filesystem::path& path, Format format) {
    std::vector<Example> out;
    for (auto& rec : detail::read_records(path, format, false)) {
        Example ex;
        ex.id = "generic:" + std::to_string(rec.line);
        ex.tokens = tokenize(rec.text);
        ex.text = std::move(rec.text);
        ex.label = std::string(kGenericLabel);
        out.push_back(std::move(ex));
    }
    return out;
}

// floor(|split| / distinct labels in split).
inline std::size_t avg_class_size(const std::vector<Example>& split) {
    if (split.empty()) throw DataError("avg_class_size: empty split");
    std::set<std::string_view> labels;
    for (const auto& ex : split) labels.insert(ex.label);
    return split.size() / labels.size();
}

inline LengthSummary length_iqr_of(std::vector<double> lengths) {
    if (lengths.empty()) throw DataError("length_iqr: empty split");
    std::sort(lengths.begin(), lengths.end());
    return {quantile_sorted(lengths, 0.25), quantile_sorted(lengths, 0.75)};
}

inline LengthSummary length_iqr(const std::vector<Example>& split) {
    std::vector<double> lengths;
    lengths.reserve(split.size());
    for (const auto& ex : split) lengths.push_back(static_cast<double>(ex.tokens.size()));
    return length_iqr_of(std::move(lengths));
}

}  // namespace shuftext
