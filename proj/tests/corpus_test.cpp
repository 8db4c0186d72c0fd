#include <gtest/gtest.h>

#include <random>

#include "shuftext/corpus.hpp"
#include "test_support.hpp"

using namespace shuftext;
using shuftext::testing::TempDir;
using shuftext::testing::write_text;

using Tokens = std::vector<std::string>;

TEST(Tokenize, LowercasesAndSplitsOnWhitespace) {
    EXPECT_EQ(tokenize("When did Hawaii become a state"), (Tokens{"when", "did", "hawaii", "become", "a", "state"}));
    EXPECT_EQ(tokenize("  tabs\tand\nnewlines  "), (Tokens{"tabs", "and", "newlines"}));
}

TEST(Tokenize, EmptyInput) {
    EXPECT_TRUE(tokenize("").empty());
    EXPECT_TRUE(tokenize(" \t\n").empty());
}

TEST(Tokenize, DetachesEdgePunctuation) {
    EXPECT_EQ(tokenize("bank balance?"), (Tokens{"bank", "balance", "?"}));
    EXPECT_EQ(tokenize("\"Wow!!\""), (Tokens{"\"", "wow", "!", "!", "\""}));
    EXPECT_EQ(tokenize("..."), (Tokens{".", ".", "."}));
    // internal punctuation stays
    EXPECT_EQ(tokenize("don't stop, u.s. troops"), (Tokens{"don't", "stop", ",", "u.s", ".", "troops"}));
}

TEST(Tokenize, UnicodeWhitespaceAndCase) {
    // U+00A0 no-break space, U+3000 ideographic space; É -> é, Ж -> ж
    EXPECT_EQ(tokenize("CAFÉ\xC2\xA0OK\xE3\x80\x80\xD0\x96УК"), (Tokens{"café", "ok", "жук"}));
    // em dash and guillemets are punctuation
    EXPECT_EQ(tokenize("«Hola»\xE2\x80\x94"), (Tokens{"«", "hola", "»", "\xE2\x80\x94"}));
}

TEST(Tokenize, InvalidUtf8IsReplacedNotDropped) {
    const auto toks = tokenize("ab\xFF" "cd");
    ASSERT_EQ(toks.size(), 1u);
    EXPECT_EQ(toks[0], "ab\xEF\xBF\xBD" "cd");
}

TEST(Tokenize, StableThroughJoin) {
    std::mt19937_64 rng(11);
    const std::string alphabet = "abcXYZ .,!?'\"-()\t";
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        const auto len = rng() % 30;
        for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
        const auto toks = tokenize(s);
        for (const auto& t : toks) EXPECT_FALSE(t.empty());
        EXPECT_EQ(tokenize(join_tokens(toks)), toks) << "input: " << s;
        EXPECT_EQ(tokenize(s), toks);
    }
}

TEST(LoadDataset, TsvFieldsAndIds) {
    TempDir dir;
    write_text(dir / "train.tsv", "DESC\twhat is a cnn\n\nHUM\tWho wrote it?\n");
    write_text(dir / "test.tsv", "LOC\twhere is pune\n");
    const auto ds = load_dataset(dir / "train.tsv", dir / "test.tsv", Format::tsv, "trec");

    EXPECT_EQ(ds.name, "trec");
    EXPECT_EQ(ds.labels, (Tokens{"DESC", "HUM", "LOC"}));
    ASSERT_EQ(ds.train.size(), 2u);
    EXPECT_EQ(ds.train[0].id, "train:1");
    EXPECT_EQ(ds.train[0].label, "DESC");
    EXPECT_EQ(ds.train[0].tokens, (Tokens{"what", "is", "a", "cnn"}));
    // blank line 2 is skipped; ids keep physical line numbers
    EXPECT_EQ(ds.train[1].id, "train:3");
    EXPECT_EQ(ds.test[0].id, "test:1");
}

TEST(LoadDataset, Jsonl) {
    TempDir dir;
    write_text(dir / "train.jsonl", R"({"text":"great movie","label":"pos"})" "\n" R"({"label":"neg","text":"dull"})" "\n");
    write_text(dir / "test.jsonl", R"({"text":"fine","label":"pos"})" "\n");
    const auto ds = load_dataset(dir / "train.jsonl", dir / "test.jsonl", Format::jsonl);
    EXPECT_EQ(ds.train[0].label, "pos");
    EXPECT_EQ(ds.train[0].tokens, (Tokens{"great", "movie"}));
    EXPECT_EQ(ds.labels, (Tokens{"neg", "pos"}));
    EXPECT_EQ(ds.name, "train");
}

TEST(LoadDataset, Deterministic) {
    TempDir dir;
    write_text(dir / "a.tsv", "x\tone two\ny\tthree\n");
    write_text(dir / "b.tsv", "x\tfour\n");
    EXPECT_EQ(load_dataset(dir / "a.tsv", dir / "b.tsv", Format::tsv),
              load_dataset(dir / "a.tsv", dir / "b.tsv", Format::tsv));
}

TEST(LoadDataset, Errors) {
    TempDir dir;
    write_text(dir / "ok.tsv", "x\tfine\n");
    write_text(dir / "empty.tsv", "\n\n");
    write_text(dir / "notab.tsv", "x\tfine\nno tab here\n");
    write_text(dir / "nolabel.tsv", "\ttext\n");
    write_text(dir / "notext.tsv", "x\t   \n");
    write_text(dir / "reserved.tsv", "__shuffled__\ttext\n");
    write_text(dir / "bad.jsonl", "{\"text\": 1}\n");

    auto message = [&](const std::string& file, Format f) -> std::string {
        try {
            load_dataset(dir / file, dir / "ok.tsv", f);
        } catch (const DataError& e) {
            return e.what();
        }
        return "no error";
    };
    EXPECT_NE(message("empty.tsv", Format::tsv).find("empty split"), std::string::npos);
    const auto notab = message("notab.tsv", Format::tsv);
    EXPECT_NE(notab.find("notab.tsv:2"), std::string::npos) << notab;
    EXPECT_NE(message("nolabel.tsv", Format::tsv).find("nolabel.tsv:1"), std::string::npos);
    EXPECT_NE(message("notext.tsv", Format::tsv).find("empty text"), std::string::npos);
    EXPECT_NE(message("reserved.tsv", Format::tsv).find("reserved"), std::string::npos);
    EXPECT_NE(message("bad.jsonl", Format::jsonl).find("bad.jsonl:1"), std::string::npos);
    EXPECT_NE(message("missing.tsv", Format::tsv).find("cannot open"), std::string::npos);
}

TEST(LoadGenericCorpus, LabelsIgnored) {
    TempDir dir;
    write_text(dir / "g.tsv", "whatever\tThe river flows\nbare line without a tab\n");
    const auto g = load_generic_corpus(dir / "g.tsv", Format::tsv);
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0].id, "generic:1");
    EXPECT_EQ(g[0].label, kGenericLabel);
    EXPECT_EQ(g[1].tokens.size(), 5u);
}

TEST(AvgClassSize, FloorDivision) {
    auto split = [](std::size_t n, std::size_t classes) {
        std::vector<Example> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back({"id" + std::to_string(i), "", {}, "c" + std::to_string(i % classes)});
        return v;
    };
    EXPECT_EQ(avg_class_size(split(6920, 2)), 3460u);
    EXPECT_EQ(avg_class_size(split(5452, 6)), 5452u / 6u);
    EXPECT_EQ(avg_class_size(split(5452, 6)), 908u);
    EXPECT_EQ(avg_class_size(split(10, 10)), 1u);
    EXPECT_THROW(avg_class_size({}), DataError);
}

TEST(LengthIqr, InterpolatedQuartiles) {
    auto q = length_iqr_of({2, 4, 6, 8, 10});
    EXPECT_DOUBLE_EQ(q.q1, 4.0);
    EXPECT_DOUBLE_EQ(q.q3, 8.0);
    q = length_iqr_of({5});
    EXPECT_DOUBLE_EQ(q.q1, 5.0);
    EXPECT_DOUBLE_EQ(q.q3, 5.0);
    // ranks 0.75 and 2.25 -> 1 + 0.75 and 3 + 0.25
    q = length_iqr_of({4, 1, 3, 2});
    EXPECT_DOUBLE_EQ(q.q1, 1.75);
    EXPECT_DOUBLE_EQ(q.q3, 3.25);
}

TEST(LengthIqr, MedianBetweenHinges) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> lengths(1 + rng() % 40);
        for (auto& x : lengths) x = static_cast<double>(rng() % 30);
        const auto q = length_iqr_of(lengths);
        std::sort(lengths.begin(), lengths.end());
        const double median = quantile_sorted(lengths, 0.5);
        EXPECT_LE(q.q1, median);
        EXPECT_LE(median, q.q3);
        EXPECT_GE(q.q1, 0.0);
    }
}
