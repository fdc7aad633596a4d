#include <doctest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dialogseg/corpus.hpp"
#include "dialogseg/errors.hpp"

using namespace dialogseg;

namespace {

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("tokenize basics") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t\n ").empty());
    CHECK(tokenize("Thank you.") == std::vector<std::string>{"thank", "you", "."});
    CHECK(tokenize("谢谢") == std::vector<std::string>{"谢", "谢"});
}

TEST_CASE("tokenize punctuation peeling") {
    CHECK(tokenize("(hello)") == std::vector<std::string>{"(", "hello", ")"});
    CHECK(tokenize("wait...") == std::vector<std::string>{"wait", ".", ".", "."});
    CHECK(tokenize("...") == std::vector<std::string>{".", ".", "."});
    // interior punctuation stays attached
    CHECK(tokenize("don't stop") == std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize("e.g. x") == std::vector<std::string>{"e.g", ".", "x"});
}

TEST_CASE("tokenize scripts") {
    // Latin-1 letters lowercase too
    CHECK(tokenize("Café") == std::vector<std::string>{"café"});
    // CJK splits per codepoint even when glued to Latin
    CHECK(tokenize("价格100元") == std::vector<std::string>{"价", "格", "100", "元"});
    // fullwidth punctuation separates
    CHECK(tokenize("你好，世界") == std::vector<std::string>{"你", "好", "，", "世", "界"});
    // invalid bytes become replacement chars rather than crashing
    CHECK_FALSE(tokenize("a\xFF\xFE b").empty());
}

TEST_CASE("tokenize idempotent on its own output") {
    const std::vector<std::string> samples = {
        "Thank you.",  "don't (stop)...", "谢谢你! ok",
        "price: 100€", "A  b\tC",         "e.g. café，好",
    };
    for (const auto& s : samples) {
        auto once = tokenize(s);
        CHECK(tokenize(join(once)) == once);
    }
}

TEST_CASE("parse_pair_corpus") {
    auto corpus = parse_pair_corpus("hi\thello there\n");
    REQUIRE(corpus.pairs.size() == 1);
    CHECK(corpus.pairs[0].query == std::vector<std::string>{"hi"});
    CHECK(corpus.pairs[0].reply == std::vector<std::string>{"hello", "there"});
    CHECK(corpus.token_count == 3);

    auto empty = parse_pair_corpus("");
    CHECK(empty.pairs.empty());
    CHECK(empty.token_count == 0);

    // blank lines are skipped, later lines keep their numbers
    auto two = parse_pair_corpus("a\tb\n\nc d\te\n");
    CHECK(two.pairs.size() == 2);
    CHECK(two.token_count == 5);
}

TEST_CASE("parse_pair_corpus malformed lines") {
    CHECK_THROWS_AS(parse_pair_corpus("no tab here\n"), MalformedLine);
    try {
        parse_pair_corpus("a\tb\nno tab\n");
        FAIL("expected MalformedLine");
    } catch (const MalformedLine& e) {
        CHECK(e.line() == 2);
    }
    // a side that tokenizes to nothing is as bad as a missing one
    CHECK_THROWS_AS(parse_pair_corpus("\tb\n"), MalformedLine);
    CHECK_THROWS_AS(parse_pair_corpus("a\t \n"), MalformedLine);
}

TEST_CASE("parse_sessions boundaries and roles") {
    auto sessions = parse_sessions("a\nb\n====\nc\n\n");
    REQUIRE(sessions.size() == 1);
    REQUIRE(sessions[0].utterances.size() == 3);
    CHECK(sessions[0].gold_boundaries == std::set<std::size_t>{1});
    CHECK(sessions[0].utterances[0].role == Role::query);
    CHECK(sessions[0].utterances[1].role == Role::reply);
    CHECK(sessions[0].utterances[2].role == Role::query);
    CHECK(sessions[0].utterances[2].index == 2);

    auto two = parse_sessions("a\n\nb\n\n");
    REQUIRE(two.size() == 2);
    CHECK(two[0].utterances.size() == 1);
    CHECK(two[1].utterances.size() == 1);
    CHECK(two[0].gold_boundaries.empty());
}

TEST_CASE("parse_sessions role prefixes") {
    auto sessions = parse_sessions("Q: hi\nQ: me again\nR: hello\nplain\n\n");
    REQUIRE(sessions.size() == 1);
    const auto& u = sessions[0].utterances;
    REQUIRE(u.size() == 4);
    CHECK(u[0].role == Role::query);
    CHECK(u[1].role == Role::query);   // prefix override beats alternation
    CHECK(u[2].role == Role::reply);
    CHECK(u[3].role == Role::query);   // alternation resumes after the reply
    CHECK(u[0].raw == "hi");           // prefix stripped
    CHECK(u[1].tokens == std::vector<std::string>{"me", "again"});
}

TEST_CASE("parse_sessions boundary at edge") {
    CHECK_THROWS_AS(parse_sessions("====\na\n\n"), BoundaryAtEdge);
    CHECK_THROWS_AS(parse_sessions("a\n====\n\n"), BoundaryAtEdge);
    // doubled markers are not an edge: they annotate the same gap once
    auto doubled = parse_sessions("a\n====\n====\nb\n\n");
    REQUIRE(doubled.size() == 1);
    CHECK(doubled[0].gold_boundaries == std::set<std::size_t>{0});
    // trailing boundary at end of input, no blank line
    CHECK_THROWS_AS(parse_sessions("a\nb\n===="), BoundaryAtEdge);
}

TEST_CASE("parse_sessions handles CRLF and missing final newline") {
    auto sessions = parse_sessions("a\r\nb\r\n====\r\nc");
    REQUIRE(sessions.size() == 1);
    CHECK(sessions[0].utterances.size() == 3);
    CHECK(sessions[0].gold_boundaries == std::set<std::size_t>{1});
    CHECK(sessions[0].utterances[0].raw == "a");
}

TEST_CASE("session round-trip") {
    std::mt19937 rng(42);
    const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta",
                                            "好",    "吗",   "x1"};
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<Session> sessions;
        const std::size_t n_sessions = 1 + rng() % 4;
        for (std::size_t s = 0; s < n_sessions; ++s) {
            Session sess;
            const std::size_t n_utts = 1 + rng() % 8;
            for (std::size_t i = 0; i < n_utts; ++i) {
                Utterance u;
                u.index = i;
                u.role = rng() % 2 ? Role::reply : Role::query;
                const std::size_t n_words = 1 + rng() % 5;
                std::string raw;
                for (std::size_t w = 0; w < n_words; ++w) {
                    if (w) raw += ' ';
                    raw += words[rng() % words.size()];
                }
                u.raw = raw;
                u.tokens = tokenize(raw);
                sess.utterances.push_back(std::move(u));
            }
            for (std::size_t g = 0; g + 1 < n_utts; ++g)
                if (rng() % 3 == 0) sess.gold_boundaries.insert(g);
            sessions.push_back(std::move(sess));
        }

        auto reparsed = parse_sessions(serialize_sessions(sessions));
        REQUIRE(reparsed.size() == sessions.size());
        for (std::size_t s = 0; s < sessions.size(); ++s) {
            REQUIRE(reparsed[s].utterances.size() == sessions[s].utterances.size());
            CHECK(reparsed[s].gold_boundaries == sessions[s].gold_boundaries);
            for (std::size_t i = 0; i < sessions[s].utterances.size(); ++i) {
                CHECK(reparsed[s].utterances[i].role == sessions[s].utterances[i].role);
                CHECK(reparsed[s].utterances[i].raw == sessions[s].utterances[i].raw);
                CHECK(reparsed[s].utterances[i].tokens == sessions[s].utterances[i].tokens);
            }
        }
    }
}

TEST_CASE("build_vocab ordering and threshold") {
    auto corpus = parse_pair_corpus("a a b\ta\n");
    auto v1 = build_vocab(corpus, 1);
    REQUIRE(v1.size() == 2);
    CHECK(v1.lookup("a") == std::size_t{0});
    CHECK(v1.lookup("b") == std::size_t{1});
    CHECK(v1.count(0) == 3);
    CHECK(v1.count(1) == 1);
    CHECK(v1.total_kept_tokens() == 4);

    auto v2 = build_vocab(corpus, 2);
    REQUIRE(v2.size() == 1);
    CHECK(v2.word(0) == "a");
    CHECK_FALSE(v2.lookup("b").has_value());
    CHECK(v2.total_kept_tokens() == 3);

    CHECK_THROWS_AS(build_vocab(corpus, 4), EmptyVocabulary);
}

TEST_CASE("build_vocab tie-break is lexicographic") {
    auto corpus = parse_pair_corpus("z q m\tq z m\n");
    auto v = build_vocab(corpus, 1);
    REQUIRE(v.size() == 3);
    CHECK(v.word(0) == "m");
    CHECK(v.word(1) == "q");
    CHECK(v.word(2) == "z");
}

TEST_CASE("vocabulary ids are dense and deterministic") {
    std::mt19937 rng(9);
    for (int iter = 0; iter < 20; ++iter) {
        std::string text;
        for (int i = 0; i < 60; ++i) {
            text += "w" + std::to_string(rng() % 12);
            text += i % 2 ? "\n" : "\t";
        }
        if (text.back() != '\n') text += "x\n";
        auto corpus = parse_pair_corpus(text);
        auto a = build_vocab(corpus, 1);
        auto b = build_vocab(corpus, 1);
        REQUIRE(a.size() == b.size());
        std::vector<bool> seen(a.size(), false);
        for (std::size_t id = 0; id < a.size(); ++id) {
            CHECK(a.word(id) == b.word(id));
            auto back = a.lookup(a.word(id));
            REQUIRE(back.has_value());
            CHECK(*back == id);
            seen[*back] = true;
        }
        for (bool s : seen) CHECK(s);
    }
}

}  // TEST_SUITE
