#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dialogseg/corpus.hpp"
#include "dialogseg/huffman.hpp"

namespace dialogseg {

/// How the context of a target word is assembled.
enum class ContextStrategy {
    virtual_sentence,  // every other word of the concatenated query+reply
    within_sentence,   // every other word of the sentence holding the target
    window,            // in-sentence neighbors within +-tau of the target
};

struct TrainConfig {
    ContextStrategy strategy = ContextStrategy::virtual_sentence;
    std::size_t window_tau = 2;
    std::size_t dim = 100;
    std::size_t epochs = 5;
    double initial_lr = 0.025;
    std::uint64_t min_count = 5;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    bool log_progress = false;  // per-epoch stats on stderr

    void validate() const;
};

/// A pair reduced to in-vocabulary word ids. Out-of-vocabulary tokens are
/// dropped before positions are assigned; a target position t indexes the
/// concatenation query+reply.
struct EncodedPair {
    std::vector<std::size_t> query;
    std::vector<std::size_t> reply;

    std::size_t size() const { return query.size() + reply.size(); }
    std::size_t id_at(std::size_t t) const {
        return t < query.size() ? query[t] : reply[t - query.size()];
    }
};

EncodedPair encode_pair(const Vocabulary& vocab, const TokenPair& pair);

/// CBOW model with hierarchical softmax. input_vectors holds the vectors
/// summed into contexts; node_vectors parametrize the V-1 inner nodes of the
/// Huffman tree and play the output role of the softmax.
struct EmbeddingModel {
    Vocabulary vocab;
    std::size_t dim = 0;
    std::vector<double> input_vectors;  // V x dim, row-major
    std::vector<double> node_vectors;   // (V-1) x dim, row-major
    HuffmanTree tree;

    std::span<double> input_vector(std::size_t word_id) {
        return {input_vectors.data() + word_id * dim, dim};
    }
    std::span<const double> input_vector(std::size_t word_id) const {
        return {input_vectors.data() + word_id * dim, dim};
    }
    std::span<double> node_vector(std::size_t node_id) {
        return {node_vectors.data() + node_id * dim, dim};
    }
    std::span<const double> node_vector(std::size_t node_id) const {
        return {node_vectors.data() + node_id * dim, dim};
    }
};

/// Builds vocabulary, Huffman tree and seeded initial parameters: input
/// vectors uniform in [-0.5/dim, +0.5/dim], node vectors zero.
EmbeddingModel init_model(const PairCorpus& corpus, const TrainConfig& config);

/// Context vector of the target at position t: the sum of the input vectors
/// selected by the strategy. Throws EmptyContext when no context word exists.
std::vector<double> context_vector(const EmbeddingModel& model, const TrainConfig& config,
                                   const EncodedPair& pair, std::size_t t);

/// p(word|context) via the product of per-node sigmoids along the word's
/// Huffman path. Probabilities over the whole vocabulary sum to 1.
double predict_prob(const EmbeddingModel& model, std::size_t word_id,
                    std::span<const double> context);
double predict_prob(const EmbeddingModel& model, const std::string& word,
                    std::span<const double> context);

/// Analytic gradients of log p(word|context).  context_grad is d log p / d c;
/// each context word's input vector receives it once per occurrence.
struct PredictionGradient {
    double log_prob = 0.0;
    std::vector<double> context_grad;
    std::vector<std::pair<std::size_t, std::vector<double>>> node_grads;
};

PredictionGradient hs_gradient(const EmbeddingModel& model, std::size_t word_id,
                               std::span<const double> context);

/// Stochastic gradient ascent on the mean log-probability of all targets.
/// The learning rate decays linearly from initial_lr to initial_lr/10 over
/// all epoch-token steps. threads=1 is bit-reproducible for a fixed seed;
/// multi-threaded training updates shared parameters without locks.
EmbeddingModel train(const PairCorpus& corpus, const TrainConfig& config);

/// Mean log p(w_t|c_t) over targets with a non-empty context. Throws
/// NoTrainableTokens when no such target exists.
double log_likelihood(const EmbeddingModel& model, const PairCorpus& corpus,
                      const TrainConfig& config);

/// Text format: header `V dim`, then one `word v1 .. v_dim` line per word in
/// id order, 6 significant digits. Input vectors only.
void save_model(const EmbeddingModel& model, std::ostream& out);
void save_model(const EmbeddingModel& model, const std::string& path);

/// Rebuilds a model from the text format. Counts are not stored, so the
/// vocabulary gets synthetic descending counts and a tree rebuilt from them;
/// node vectors start at zero. Throws ParseError with the offending line.
EmbeddingModel load_model(std::istream& in);
EmbeddingModel load_model(const std::string& path);

}  // namespace dialogseg
