#include "dialogseg/embeddings.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "dialogseg/rng.hpp"

namespace dialogseg {

namespace {

inline double sigmoid(double x) {
    if (x > 500.0) x = 500.0;
    if (x < -500.0) x = -500.0;
    return 1.0 / (1.0 + std::exp(-x));
}

// log(sigmoid(y)) without underflow for large |y|.
inline double log_sigmoid(double y) {
    if (y < 0.0) return y - std::log1p(std::exp(y));
    return -std::log1p(std::exp(-y));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Context positions for target t: [lo, hi) excluding t itself.
inline void context_bounds(const EncodedPair& pair, ContextStrategy strategy,
                           std::size_t tau, std::size_t t, std::size_t& lo,
                           std::size_t& hi) {
    const std::size_t q = pair.query.size();
    const std::size_t n = q + pair.reply.size();
    lo = 0;
    hi = n;
    if (strategy != ContextStrategy::virtual_sentence) {
        if (t < q) {
            hi = q;
        } else {
            lo = q;
        }
    }
    if (strategy == ContextStrategy::window) {
        lo = std::max(lo, t >= tau ? t - tau : std::size_t{0});
        hi = std::min(hi, t + tau + 1);
    }
}

inline std::size_t context_size(const EncodedPair& pair, ContextStrategy strategy,
                                std::size_t tau, std::size_t t) {
    std::size_t lo, hi;
    context_bounds(pair, strategy, tau, t, lo, hi);
    return (hi - lo) - (t >= lo && t < hi ? 1 : 0);
}

std::vector<EncodedPair> encode_corpus(const Vocabulary& vocab, const PairCorpus& corpus) {
    std::vector<EncodedPair> encoded;
    encoded.reserve(corpus.pairs.size());
    for (const TokenPair& pair : corpus.pairs) encoded.push_back(encode_pair(vocab, pair));
    return encoded;
}

}  // namespace

void TrainConfig::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(initial_lr > 0.0)) throw std::invalid_argument("initial_lr must be > 0");
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (strategy == ContextStrategy::window && window_tau < 1)
        throw std::invalid_argument("window_tau must be >= 1");
}

EncodedPair encode_pair(const Vocabulary& vocab, const TokenPair& pair) {
    EncodedPair out;
    out.query.reserve(pair.query.size());
    out.reply.reserve(pair.reply.size());
    for (const std::string& tok : pair.query)
        if (auto id = vocab.lookup(tok)) out.query.push_back(*id);
    for (const std::string& tok : pair.reply)
        if (auto id = vocab.lookup(tok)) out.reply.push_back(*id);
    return out;
}

EmbeddingModel init_model(const PairCorpus& corpus, const TrainConfig& config) {
    config.validate();
    EmbeddingModel model;
    model.vocab = build_vocab(corpus, config.min_count);
    model.tree = build_huffman(model.vocab);
    model.dim = config.dim;
    const std::size_t v = model.vocab.size();
    model.input_vectors.resize(v * config.dim);
    model.node_vectors.assign((v - 1) * config.dim, 0.0);
    std::mt19937_64 rng(config.seed);
    const double half = 0.5 / static_cast<double>(config.dim);
    for (double& x : model.input_vectors) x = uniform_range(rng, -half, half);
    return model;
}

std::vector<double> context_vector(const EmbeddingModel& model, const TrainConfig& config,
                                   const EncodedPair& pair, std::size_t t) {
    std::size_t lo, hi;
    context_bounds(pair, config.strategy, config.window_tau, t, lo, hi);
    std::vector<double> ctx(model.dim, 0.0);
    std::size_t used = 0;
    for (std::size_t i = lo; i < hi; ++i) {
        if (i == t) continue;
        auto u = model.input_vector(pair.id_at(i));
        for (std::size_t d = 0; d < model.dim; ++d) ctx[d] += u[d];
        ++used;
    }
    if (used == 0) throw EmptyContext();
    return ctx;
}

double predict_prob(const EmbeddingModel& model, std::size_t word_id,
                    std::span<const double> context) {
    if (context.size() != model.dim)
        throw DimensionMismatch(context.size(), model.dim);
    double logp = 0.0;
    const auto& path = model.tree.paths[word_id];
    const auto& code = model.tree.codes[word_id];
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double x = dot(model.node_vector(path[k]), context);
        logp += log_sigmoid(code[k] ? x : -x);
    }
    return std::exp(logp);
}

double predict_prob(const EmbeddingModel& model, const std::string& word,
                    std::span<const double> context) {
    auto id = model.vocab.lookup(word);
    if (!id) throw UnknownWord(word);
    return predict_prob(model, *id, context);
}

PredictionGradient hs_gradient(const EmbeddingModel& model, std::size_t word_id,
                               std::span<const double> context) {
    if (context.size() != model.dim)
        throw DimensionMismatch(context.size(), model.dim);
    PredictionGradient grad;
    grad.context_grad.assign(model.dim, 0.0);
    const auto& path = model.tree.paths[word_id];
    const auto& code = model.tree.codes[word_id];
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto node = model.node_vector(path[k]);
        const double x = dot(node, context);
        const double g = static_cast<double>(code[k]) - sigmoid(x);
        grad.log_prob += log_sigmoid(code[k] ? x : -x);
        std::vector<double> node_grad(model.dim);
        for (std::size_t d = 0; d < model.dim; ++d) {
            node_grad[d] = g * context[d];
            grad.context_grad[d] += g * node[d];
        }
        grad.node_grads.emplace_back(path[k], std::move(node_grad));
    }
    return grad;
}

namespace {

struct EpochStats {
    double loss_sum = 0.0;
    std::uint64_t targets = 0;
};

// One SGD pass over [begin, end). Shared parameters are updated without
// synchronization; with a single worker the order is fully deterministic.
void train_range(EmbeddingModel& model, const std::vector<EncodedPair>& pairs,
                 std::size_t begin, std::size_t end, const TrainConfig& config,
                 std::atomic<std::uint64_t>& step, std::uint64_t total_steps,
                 EpochStats& stats) {
    const std::size_t dim = model.dim;
    const double lr0 = config.initial_lr;
    std::vector<double> ctx(dim);
    std::vector<double> err(dim);

    for (std::size_t p = begin; p < end; ++p) {
        const EncodedPair& pair = pairs[p];
        const std::size_t n = pair.size();
        for (std::size_t t = 0; t < n; ++t) {
            const std::uint64_t s = step.fetch_add(1, std::memory_order_relaxed);
            const double lr =
                lr0 * (1.0 - 0.9 * static_cast<double>(s) / static_cast<double>(total_steps));
            std::size_t lo, hi;
            context_bounds(pair, config.strategy, config.window_tau, t, lo, hi);
            if (hi - lo <= (t >= lo && t < hi ? 1u : 0u)) continue;

            std::fill(ctx.begin(), ctx.end(), 0.0);
            for (std::size_t i = lo; i < hi; ++i) {
                if (i == t) continue;
                const auto u = model.input_vector(pair.id_at(i));
                for (std::size_t d = 0; d < dim; ++d) ctx[d] += u[d];
            }

            std::fill(err.begin(), err.end(), 0.0);
            const std::size_t w = pair.id_at(t);
            const auto& path = model.tree.paths[w];
            const auto& code = model.tree.codes[w];
            double logp = 0.0;
            for (std::size_t k = 0; k < path.size(); ++k) {
                const auto node = model.node_vector(path[k]);
                const double x = dot(node, ctx);
                logp += log_sigmoid(code[k] ? x : -x);
                const double g = (static_cast<double>(code[k]) - sigmoid(x)) * lr;
                for (std::size_t d = 0; d < dim; ++d) err[d] += g * node[d];
                for (std::size_t d = 0; d < dim; ++d) node[d] += g * ctx[d];
            }
            stats.loss_sum -= logp;
            ++stats.targets;

            for (std::size_t i = lo; i < hi; ++i) {
                if (i == t) continue;
                const auto u = model.input_vector(pair.id_at(i));
                for (std::size_t d = 0; d < dim; ++d) u[d] += err[d];
            }
        }
    }
}

}  // namespace

EmbeddingModel train(const PairCorpus& corpus, const TrainConfig& config) {
    EmbeddingModel model = init_model(corpus, config);
    const std::vector<EncodedPair> pairs = encode_corpus(model.vocab, corpus);

    std::uint64_t positions = 0;
    std::uint64_t trainable = 0;
    for (const EncodedPair& pair : pairs) {
        positions += pair.size();
        for (std::size_t t = 0; t < pair.size(); ++t)
            if (context_size(pair, config.strategy, config.window_tau, t) > 0) ++trainable;
    }
    if (trainable == 0) throw NoTrainableTokens();

    const std::uint64_t total_steps = positions * config.epochs;
    std::atomic<std::uint64_t> step{0};

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::vector<EpochStats> stats(config.threads);
        if (config.threads == 1) {
            train_range(model, pairs, 0, pairs.size(), config, step, total_steps, stats[0]);
        } else {
            std::vector<std::thread> workers;
            const std::size_t chunk = (pairs.size() + config.threads - 1) / config.threads;
            for (std::size_t w = 0; w < config.threads; ++w) {
                const std::size_t b = std::min(w * chunk, pairs.size());
                const std::size_t e = std::min(b + chunk, pairs.size());
                workers.emplace_back([&, b, e, w] {
                    train_range(model, pairs, b, e, config, step, total_steps, stats[w]);
                });
            }
            for (auto& t : workers) t.join();
        }
        if (config.log_progress) {
            double loss = 0.0;
            std::uint64_t targets = 0;
            for (const EpochStats& s : stats) {
                loss += s.loss_sum;
                targets += s.targets;
            }
            const double lr = config.initial_lr *
                              (1.0 - 0.9 * static_cast<double>(step.load()) /
                                         static_cast<double>(total_steps));
            std::fprintf(stderr, "epoch %zu/%zu  mean loss %.6f  lr %.6f\n", epoch,
                         config.epochs, targets ? loss / static_cast<double>(targets) : 0.0,
                         lr);
        }
    }
    return model;
}

double log_likelihood(const EmbeddingModel& model, const PairCorpus& corpus,
                      const TrainConfig& config) {
    const std::vector<EncodedPair> pairs = encode_corpus(model.vocab, corpus);
    std::vector<double> ctx(model.dim);
    double sum = 0.0;
    std::uint64_t targets = 0;
    for (const EncodedPair& pair : pairs) {
        for (std::size_t t = 0; t < pair.size(); ++t) {
            std::size_t lo, hi;
            context_bounds(pair, config.strategy, config.window_tau, t, lo, hi);
            if (hi - lo <= (t >= lo && t < hi ? 1u : 0u)) continue;
            std::fill(ctx.begin(), ctx.end(), 0.0);
            for (std::size_t i = lo; i < hi; ++i) {
                if (i == t) continue;
                const auto u = model.input_vector(pair.id_at(i));
                for (std::size_t d = 0; d < model.dim; ++d) ctx[d] += u[d];
            }
            const std::size_t w = pair.id_at(t);
            const auto& path = model.tree.paths[w];
            const auto& code = model.tree.codes[w];
            for (std::size_t k = 0; k < path.size(); ++k) {
                const double x = dot(model.node_vector(path[k]), ctx);
                sum += log_sigmoid(code[k] ? x : -x);
            }
            ++targets;
        }
    }
    if (targets == 0) throw NoTrainableTokens();
    return sum / static_cast<double>(targets);
}

void save_model(const EmbeddingModel& model, std::ostream& out) {
    out << model.vocab.size() << ' ' << model.dim << '\n';
    char buf[64];
    for (std::size_t w = 0; w < model.vocab.size(); ++w) {
        out << model.vocab.word(w);
        const auto u = model.input_vector(w);
        for (std::size_t d = 0; d < model.dim; ++d) {
            std::snprintf(buf, sizeof buf, "%.6g", u[d]);
            out << ' ' << buf;
        }
        out << '\n';
    }
}

void save_model(const EmbeddingModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    save_model(model, out);
    if (!out.good()) throw Error("write failed: " + path);
}

EmbeddingModel load_model(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    std::istringstream header(line);
    long long v = 0, dim = 0;
    std::string extra;
    if (!(header >> v >> dim) || v < 1 || dim < 1 || (header >> extra))
        throw ParseError(1, "header must be `V dim`");

    EmbeddingModel model;
    model.dim = static_cast<std::size_t>(dim);
    model.input_vectors.resize(static_cast<std::size_t>(v) * model.dim);
    std::vector<Vocabulary::Entry> entries;
    entries.reserve(static_cast<std::size_t>(v));
    std::unordered_set<std::string> seen;

    for (long long w = 0; w < v; ++w) {
        ++line_no;
        if (!std::getline(in, line))
            throw ParseError(line_no, "expected " + std::to_string(v) + " word lines");
        std::istringstream fields(line);
        std::string word;
        if (!(fields >> word)) throw ParseError(line_no, "empty word line");
        if (!seen.insert(word).second)
            throw ParseError(line_no, "duplicate word: " + word);
        // Synthetic strictly-descending counts: the file stores no frequencies.
        entries.push_back({word, static_cast<std::uint64_t>(v - w)});
        double* row = model.input_vectors.data() + static_cast<std::size_t>(w) * model.dim;
        for (long long d = 0; d < dim; ++d) {
            std::string tok;
            if (!(fields >> tok)) throw ParseError(line_no, "expected " +
                                                                std::to_string(dim) +
                                                                " components");
            char* end = nullptr;
            row[d] = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw ParseError(line_no, "bad number: " + tok);
        }
        std::string extra;
        if (fields >> extra) throw ParseError(line_no, "trailing fields");
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty()) throw ParseError(line_no, "unexpected trailing line");
    }

    model.vocab = Vocabulary(std::move(entries), 1);
    if (model.vocab.size() >= 2) {
        model.tree = build_huffman(model.vocab);
        model.node_vectors.assign((model.vocab.size() - 1) * model.dim, 0.0);
    } else {
        // single word: empty path, p(w|c) = 1 for any context
        model.tree.paths = {{}};
        model.tree.codes = {{}};
        model.tree.inner_count = 0;
    }
    return model;
}

EmbeddingModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    return load_model(in);
}

}  // namespace dialogseg
