#include "dialogseg/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dialogseg/corpus.hpp"
#include "dialogseg/embeddings.hpp"
#include "dialogseg/errors.hpp"
#include "dialogseg/eval.hpp"
#include "dialogseg/similarity.hpp"
#include "dialogseg/tiling.hpp"

namespace dialogseg {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<Session> load_sessions(const std::string& path) {
    return parse_sessions(read_file(path));
}

bool verbose_env() {
    const char* v = std::getenv("DIALOGSEG_VERBOSE");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
}

ContextStrategy parse_strategy(const std::string& name) {
    if (name == "virtual") return ContextStrategy::virtual_sentence;
    if (name == "within") return ContextStrategy::within_sentence;
    return ContextStrategy::window;
}

struct ScorerFlags {
    std::string scorer = "sumpool";
    std::string model_path;
};

// tfidf derives its statistics from the sessions being segmented; the
// embedding scorers need a trained model file.
ScoreFn make_scorer(const ScorerFlags& flags, std::span<const Session> sessions) {
    SimilarityScorer scorer = [&] {
        if (flags.scorer == "tfidf") {
            auto stats = std::make_shared<IdfStats>(build_idf(sessions));
            return SimilarityScorer::tfidf(std::move(stats));
        }
        if (flags.model_path.empty())
            throw CLI::ValidationError("--model is required for scorer " + flags.scorer);
        auto model = std::make_shared<EmbeddingModel>(load_model(flags.model_path));
        if (flags.scorer == "sumpool") return SimilarityScorer::sum_pool(std::move(model));
        if (flags.scorer == "hmax") return SimilarityScorer::heuristic_max(std::move(model));
        return SimilarityScorer::heuristic_avg(std::move(model));
    }();
    return [scorer = std::move(scorer)](const std::vector<std::string>& a,
                                        const std::vector<std::string>& b) {
        return scorer.score(a, b);
    };
}

void add_scorer_flags(CLI::App* cmd, ScorerFlags& flags, bool model_required) {
    auto* model = cmd->add_option("--model", flags.model_path, "trained embedding model file");
    if (model_required) model->required();
    cmd->add_option("--scorer", flags.scorer, "similarity measure")
        ->check(CLI::IsMember({"tfidf", "sumpool", "hmax", "havg"}))
        ->capture_default_str();
}

void write_predictions(std::ostream& out, std::vector<Session> sessions,
                       const std::vector<BoundarySet>& boundaries) {
    for (std::size_t i = 0; i < sessions.size(); ++i)
        sessions[i].gold_boundaries = boundaries[i];
    out << serialize_sessions(sessions);
}

int run_segment(const std::string& sessions_path, const ScorerFlags& scorer_flags,
                const SegmenterConfig& config, const std::string& dump_path,
                std::ostream& out) {
    auto sessions = load_sessions(sessions_path);
    auto scorer = make_scorer(scorer_flags, sessions);

    std::vector<BoundarySet> predicted;
    std::vector<SegmentationResult> results;
    predicted.reserve(sessions.size());
    for (const auto& session : sessions) {
        if (config.mode == SegmentationMode::offline) {
            results.push_back(segment_offline(session, scorer, config));
        } else {
            OnlineSegmenter seg(scorer, config);
            for (const auto& utt : session.utterances) seg.push(utt.tokens);
            SegmentationResult r;
            r.boundaries = seg.boundaries();
            r.profile.sims = seg.sims();
            r.profile.depths = seg.depths();
            results.push_back(std::move(r));
        }
        predicted.push_back(results.back().boundaries);
    }

    if (!dump_path.empty()) {
        std::ofstream dump(dump_path);
        if (!dump) throw Error("cannot open " + dump_path);
        for (std::size_t i = 0; i < results.size(); ++i) {
            dump << "# session " << i << '\n';
            dump_profile_tsv(dump, results[i]);
        }
    }

    write_predictions(out, std::move(sessions), predicted);
    return 0;
}

int run_evaluate(const std::string& pred_path, const std::string& gold_path,
                 std::size_t tolerance, std::ostream& out) {
    auto pred_sessions = load_sessions(pred_path);
    auto gold_sessions = load_sessions(gold_path);
    std::vector<BoundarySet> pred, gold;
    for (const auto& s : pred_sessions) pred.push_back(s.gold_boundaries);
    for (const auto& s : gold_sessions) gold.push_back(s.gold_boundaries);

    const EvalReport r = boundary_prf(pred, gold, tolerance);
    out << "tp         " << r.true_positives << '\n'
        << "predicted  " << r.predicted_count << '\n'
        << "gold       " << r.gold_count << '\n'
        << "precision  " << r.precision << '\n'
        << "recall     " << r.recall << '\n'
        << "f1         " << r.f1 << '\n';
    nlohmann::json j{{"precision", r.precision}, {"recall", r.recall},
                     {"f1", r.f1},               {"predicted", r.predicted_count},
                     {"gold", r.gold_count},     {"tp", r.true_positives}};
    out << j.dump() << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dialogue session segmentation: embedding training, similarity "
                 "scoring, TextTiling-style boundary detection and evaluation.",
                 "dialogseg"};
    app.require_subcommand(1);

    // train
    std::string pairs_path, model_out, strategy = "virtual";
    TrainConfig train_cfg;
    auto* train_cmd = app.add_subcommand(
        "train", "Train CBOW embeddings on a query<TAB>reply pair corpus "
                 "(set DIALOGSEG_VERBOSE=1 for per-epoch progress)");
    train_cmd->add_option("--pairs", pairs_path, "pair corpus file")->required();
    train_cmd->add_option("--out", model_out, "output model file")->required();
    train_cmd->add_option("--strategy", strategy, "context strategy")
        ->check(CLI::IsMember({"virtual", "within", "window"}))
        ->capture_default_str();
    train_cmd->add_option("--tau", train_cfg.window_tau, "window radius (window strategy)")
        ->capture_default_str();
    train_cmd->add_option("--dim", train_cfg.dim, "embedding dimension")->capture_default_str();
    train_cmd->add_option("--epochs", train_cfg.epochs, "training epochs")
        ->capture_default_str();
    train_cmd->add_option("--lr", train_cfg.initial_lr, "initial learning rate")
        ->capture_default_str();
    train_cmd->add_option("--min-count", train_cfg.min_count, "vocabulary frequency cutoff")
        ->capture_default_str();
    train_cmd->add_option("--seed", train_cfg.seed, "RNG seed")->capture_default_str();
    train_cmd->add_option("--threads", train_cfg.threads, "training threads")
        ->capture_default_str();

    // segment
    std::string sessions_path, dump_path, mode = "offline";
    ScorerFlags seg_scorer;
    SegmenterConfig seg_cfg;
    auto* segment_cmd =
        app.add_subcommand("segment", "Segment sessions; writes the session format "
                                      "with ==== boundary lines to stdout");
    segment_cmd->add_option("--sessions", sessions_path, "session file")->required();
    add_scorer_flags(segment_cmd, seg_scorer, false);
    segment_cmd->add_option("--alpha", seg_cfg.alpha, "cutoff threshold multiplier")
        ->capture_default_str();
    segment_cmd->add_option("--mode", mode, "segmentation mode")
        ->check(CLI::IsMember({"offline", "online"}))
        ->capture_default_str();
    segment_cmd
        ->add_option("--smooth", seg_cfg.smoothing_width,
                     "odd moving-average width, 1 = off (offline only)")
        ->capture_default_str();
    segment_cmd
        ->add_option("--min-gaps", seg_cfg.min_gaps_online,
                     "gaps observed before online emission")
        ->capture_default_str();
    segment_cmd
        ->add_option("--min-segment", seg_cfg.min_segment_len,
                     "minimum utterances per segment, 0 = off")
        ->capture_default_str();
    segment_cmd->add_option("--dump-profile", dump_path, "per-gap TSV diagnostics file");

    // evaluate
    std::string pred_path, gold_path;
    std::size_t tolerance = 0;
    auto* eval_cmd = app.add_subcommand(
        "evaluate", "Boundary precision/recall/F of a prediction file against gold");
    eval_cmd->add_option("--pred", pred_path, "predicted session file")->required();
    eval_cmd->add_option("--gold", gold_path, "gold session file")->required();
    eval_cmd->add_option("--tolerance", tolerance, "match slack in gaps")
        ->capture_default_str();

    // tune
    std::string tune_sessions_path;
    ScorerFlags tune_scorer;
    SegmenterConfig tune_cfg;
    auto* tune_cmd = app.add_subcommand(
        "tune", "Grid-search alpha against gold boundary counts on validation sessions");
    tune_cmd->add_option("--sessions", tune_sessions_path, "validation session file")
        ->required();
    add_scorer_flags(tune_cmd, tune_scorer, false);
    tune_cmd->add_option("--smooth", tune_cfg.smoothing_width, "odd moving-average width")
        ->capture_default_str();

    // baseline-random
    std::string base_sessions_path;
    double prior = -1.0;
    std::uint64_t base_seed = 1;
    auto* base_cmd = app.add_subcommand(
        "baseline-random", "Per-gap Bernoulli baseline; writes the session format to stdout");
    base_cmd->add_option("--sessions", base_sessions_path, "session file")->required();
    base_cmd->add_option("--prior", prior, "boundary probability (default: gold prior)")
        ->check(CLI::Range(0.0, 1.0));
    base_cmd->add_option("--seed", base_seed, "RNG seed")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (*train_cmd) {
            train_cfg.strategy = parse_strategy(strategy);
            train_cfg.log_progress = verbose_env();
            train_cfg.validate();
            auto corpus = parse_pair_corpus(read_file(pairs_path));
            auto model = train(corpus, train_cfg);
            save_model(model, model_out);
            return 0;
        }
        if (*segment_cmd) {
            seg_cfg.mode =
                mode == "online" ? SegmentationMode::online : SegmentationMode::offline;
            if (seg_cfg.mode == SegmentationMode::online) {
                if (segment_cmd->count("--smooth") > 0 && seg_cfg.smoothing_width != 1)
                    throw CLI::ValidationError("--smooth must be 1 in online mode");
                seg_cfg.smoothing_width = 1;
            }
            seg_cfg.validate();
            return run_segment(sessions_path, seg_scorer, seg_cfg, dump_path, out);
        }
        if (*eval_cmd) return run_evaluate(pred_path, gold_path, tolerance, out);
        if (*tune_cmd) {
            tune_cfg.validate();
            auto sessions = load_sessions(tune_sessions_path);
            auto scorer = make_scorer(tune_scorer, sessions);
            out << tune_alpha(sessions, scorer, tune_cfg) << '\n';
            return 0;
        }
        if (*base_cmd) {
            auto sessions = load_sessions(base_sessions_path);
            if (prior < 0.0) prior = gold_prior(sessions);
            write_predictions(out, sessions, random_baseline(sessions, prior, base_seed));
            return 0;
        }
        err << "error: no subcommand\n";
        return 1;
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        out << (subs.empty() ? app.help() : subs.front()->help());
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace dialogseg
