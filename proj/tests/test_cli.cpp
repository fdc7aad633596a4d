#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialogseg/cli.hpp"
#include "dialogseg/corpus.hpp"

using namespace dialogseg;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) {
    return std::string(FIXTURE_DIR) + "/" + name;
}

// per-process temp names so parallel test runs cannot collide
std::string temp_file(const std::string& name) {
    static const std::string stem =
        (std::filesystem::temp_directory_path() /
         ("dialogseg-test-" + std::to_string(static_cast<unsigned long long>(
                                  std::hash<std::string>{}(FIXTURE_DIR) ^
                                  static_cast<unsigned long long>(::getpid())))))
            .string();
    return stem + "-" + name;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// last non-empty line of a command's stdout
std::string last_line(const std::string& text) {
    auto end = text.find_last_not_of('\n');
    REQUIRE(end != std::string::npos);
    auto start = text.rfind('\n', end);
    return text.substr(start == std::string::npos ? 0 : start + 1,
                       end - (start == std::string::npos ? 0 : start + 1) + 1);
}

const std::string& trained_model() {
    static const std::string path = [] {
        const std::string p = temp_file("model.txt");
        auto r = run({"train", "--pairs", fixture("toy_pairs.txt"), "--out", p,
                      "--min-count", "1", "--dim", "16", "--epochs", "30", "--seed", "1"});
        REQUIRE(r.code == 0);
        return p;
    }();
    return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and argument errors") {
    auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("train") != std::string::npos);
    CHECK(help.out.find("segment") != std::string::npos);
    CHECK(help.out.find("evaluate") != std::string::npos);

    auto sub_help = run({"segment", "--help"});
    CHECK(sub_help.code == 0);
    CHECK(sub_help.out.find("--alpha") != std::string::npos);
    CHECK(sub_help.out.find("--scorer") != std::string::npos);

    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    auto unknown = run({"evaluate", "--pred", "a", "--gold", "b", "--bogus"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("error:") != std::string::npos);

    // embedding scorers need a model file
    auto no_model = run({"segment", "--sessions", fixture("toy_sessions.txt"),
                         "--scorer", "sumpool"});
    CHECK(no_model.code == 1);
    CHECK(no_model.err.find("--model") != std::string::npos);

    CHECK(run({"segment", "--sessions", "x", "--scorer", "nosuch"}).code == 1);
    CHECK(run({"baseline-random", "--sessions", "x", "--prior", "1.5"}).code == 1);
    CHECK(run({"segment", "--sessions", "x", "--mode", "online", "--smooth", "3"}).code == 1);
}

TEST_CASE("missing files exit 2") {
    auto r = run({"segment", "--sessions", "/nonexistent/sessions.txt",
                  "--scorer", "tfidf"});
    CHECK(r.code == 2);
    CHECK(r.err.find("cannot open") != std::string::npos);

    CHECK(run({"evaluate", "--pred", "/nonexistent/a", "--gold", "/nonexistent/b"}).code == 2);
}

TEST_CASE("sessions too short to segment exit 2") {
    const std::string path = temp_file("single.txt");
    write_file(path, "only one utterance here\n");
    auto r = run({"segment", "--sessions", path, "--scorer", "tfidf"});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("train writes a loadable model deterministically") {
    const std::string& model = trained_model();
    const std::string again = temp_file("model2.txt");
    auto r = run({"train", "--pairs", fixture("toy_pairs.txt"), "--out", again,
                  "--min-count", "1", "--dim", "16", "--epochs", "30", "--seed", "1"});
    REQUIRE(r.code == 0);
    CHECK(read_file(model) == read_file(again));

    const std::string other_seed = temp_file("model3.txt");
    auto r2 = run({"train", "--pairs", fixture("toy_pairs.txt"), "--out", other_seed,
                   "--min-count", "1", "--dim", "16", "--epochs", "30", "--seed", "2"});
    REQUIRE(r2.code == 0);
    CHECK(read_file(model) != read_file(other_seed));

    const std::string header = read_file(model).substr(0, read_file(model).find('\n'));
    CHECK(header == "16 16");  // 16 vocabulary words, 16 dimensions
}

TEST_CASE("segment round trip reaches perfect boundaries on the toy corpus") {
    auto seg = run({"segment", "--sessions", fixture("toy_sessions.txt"),
                    "--model", trained_model(), "--scorer", "sumpool",
                    "--alpha", "0.5", "--smooth", "1"});
    REQUIRE(seg.code == 0);

    auto predicted = parse_sessions(seg.out);
    REQUIRE(predicted.size() == 2);
    CHECK(predicted[0].gold_boundaries == std::set<std::size_t>{2});
    CHECK(predicted[1].gold_boundaries == std::set<std::size_t>{1});

    const std::string pred_path = temp_file("pred.txt");
    write_file(pred_path, seg.out);
    auto eval = run({"evaluate", "--pred", pred_path,
                     "--gold", fixture("toy_sessions.txt")});
    REQUIRE(eval.code == 0);
    CHECK(eval.out.find("precision") != std::string::npos);

    auto j = nlohmann::json::parse(last_line(eval.out));
    CHECK(j["f1"].get<double>() == 1.0);
    CHECK(j["precision"].get<double>() == 1.0);
    CHECK(j["recall"].get<double>() == 1.0);
    CHECK(j["tp"].get<int>() == 2);
    CHECK(j["predicted"].get<int>() == 2);
    CHECK(j["gold"].get<int>() == 2);

    // identical invocations produce byte-identical output
    auto seg2 = run({"segment", "--sessions", fixture("toy_sessions.txt"),
                     "--model", trained_model(), "--scorer", "sumpool",
                     "--alpha", "0.5", "--smooth", "1"});
    CHECK(seg2.out == seg.out);
}

TEST_CASE("online mode emits boundaries for the toy corpus") {
    auto seg = run({"segment", "--sessions", fixture("toy_sessions.txt"),
                    "--model", trained_model(), "--scorer", "sumpool",
                    "--mode", "online", "--alpha", "0.5", "--min-gaps", "3"});
    REQUIRE(seg.code == 0);
    auto predicted = parse_sessions(seg.out);
    REQUIRE(predicted.size() == 2);
    // session 1 switches topic at gap 2, right when the warm-up ends
    CHECK(predicted[0].gold_boundaries.count(0) == 0);
    CHECK(predicted[0].gold_boundaries.count(1) == 0);
    CHECK(predicted[0].gold_boundaries.count(2) == 1);
}

TEST_CASE("profile dump") {
    const std::string dump_path = temp_file("profile.tsv");
    auto seg = run({"segment", "--sessions", fixture("toy_sessions.txt"),
                    "--model", trained_model(), "--scorer", "sumpool",
                    "--dump-profile", dump_path});
    REQUIRE(seg.code == 0);
    const std::string dump = read_file(dump_path);
    CHECK(dump.rfind("# session 0\n", 0) == 0);
    CHECK(dump.find("# session 1\n") != std::string::npos);
    // session 1 has 6 gaps, session 2 has 3: 9 rows plus 2 headers
    std::size_t lines = 0;
    for (char c : dump) lines += c == '\n';
    CHECK(lines == 11);
}

TEST_CASE("tfidf scorer needs no model") {
    auto seg = run({"segment", "--sessions", fixture("toy_sessions.txt"),
                    "--scorer", "tfidf", "--smooth", "1"});
    REQUIRE(seg.code == 0);
    auto predicted = parse_sessions(seg.out);
    REQUIRE(predicted.size() == 2);
    CHECK(predicted[0].gold_boundaries == std::set<std::size_t>{2});
    CHECK(predicted[1].gold_boundaries == std::set<std::size_t>{1});
}

TEST_CASE("evaluate respects tolerance") {
    const std::string pred = temp_file("tol_pred.txt");
    const std::string gold = temp_file("tol_gold.txt");
    write_file(gold, "a\nb\nc\n====\nd\n");   // boundary at gap 2
    write_file(pred, "a\nb\n====\nc\nd\n");   // boundary at gap 1
    auto strict = run({"evaluate", "--pred", pred, "--gold", gold});
    REQUIRE(strict.code == 0);
    CHECK(nlohmann::json::parse(last_line(strict.out))["f1"].get<double>() == 0.0);

    auto loose = run({"evaluate", "--pred", pred, "--gold", gold, "--tolerance", "1"});
    REQUIRE(loose.code == 0);
    CHECK(nlohmann::json::parse(last_line(loose.out))["f1"].get<double>() == 1.0);
}

TEST_CASE("tune prints a grid alpha") {
    auto r = run({"tune", "--sessions", fixture("toy_sessions.txt"),
                  "--model", trained_model(), "--scorer", "sumpool", "--smooth", "1"});
    REQUIRE(r.code == 0);
    const double alpha = std::stod(r.out);
    CHECK(alpha >= -1.0);
    CHECK(alpha <= 2.0);

    auto again = run({"tune", "--sessions", fixture("toy_sessions.txt"),
                      "--model", trained_model(), "--scorer", "sumpool", "--smooth", "1"});
    CHECK(again.out == r.out);
}

TEST_CASE("random baseline") {
    auto a = run({"baseline-random", "--sessions", fixture("toy_sessions.txt"),
                  "--prior", "0.5", "--seed", "9"});
    REQUIRE(a.code == 0);
    auto b = run({"baseline-random", "--sessions", fixture("toy_sessions.txt"),
                  "--prior", "0.5", "--seed", "9"});
    CHECK(a.out == b.out);
    CHECK_FALSE(parse_sessions(a.out).empty());

    // default prior comes from the gold annotations; prior 0 clears everything
    auto gold_rate = run({"baseline-random", "--sessions", fixture("toy_sessions.txt")});
    CHECK(gold_rate.code == 0);
    auto none = run({"baseline-random", "--sessions", fixture("toy_sessions.txt"),
                     "--prior", "0"});
    REQUIRE(none.code == 0);
    for (const auto& s : parse_sessions(none.out)) CHECK(s.gold_boundaries.empty());
}

TEST_CASE("segment output format survives reparsing") {
    auto seg = run({"segment", "--sessions", fixture("toy_sessions.txt"),
                    "--scorer", "tfidf"});
    REQUIRE(seg.code == 0);
    auto sessions = parse_sessions(seg.out);
    CHECK(serialize_sessions(sessions) == seg.out);
    // utterance text and roles are preserved from the input
    auto original = parse_sessions(read_file(fixture("toy_sessions.txt")));
    REQUIRE(sessions.size() == original.size());
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        REQUIRE(sessions[i].utterances.size() == original[i].utterances.size());
        for (std::size_t u = 0; u < sessions[i].utterances.size(); ++u) {
            CHECK(sessions[i].utterances[u].raw == original[i].utterances[u].raw);
            CHECK(sessions[i].utterances[u].role == original[i].utterances[u].role);
        }
    }
}

}  // TEST_SUITE
