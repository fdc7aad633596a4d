#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dialogseg/corpus.hpp"
#include "dialogseg/embeddings.hpp"

namespace dialogseg {

/// Smoothed document frequencies; documents are utterances of the reference
/// corpus. idf(w) = ln((N+1)/(df(w)+1)) + 1, positive for every word.
class IdfStats {
public:
    IdfStats() = default;
    IdfStats(std::unordered_map<std::string, std::uint64_t> df, std::uint64_t doc_count)
        : df_(std::move(df)), doc_count_(doc_count) {}

    double idf(const std::string& word) const;
    std::uint64_t doc_count() const { return doc_count_; }
    const std::unordered_map<std::string, std::uint64_t>& df() const { return df_; }

private:
    std::unordered_map<std::string, std::uint64_t> df_;
    std::uint64_t doc_count_ = 0;
};

IdfStats build_idf(std::span<const Session> sessions);
IdfStats build_idf(const PairCorpus& corpus);

/// `N` header then `word<TAB>df` lines.
void save_idf(const IdfStats& stats, std::ostream& out);
IdfStats load_idf(std::istream& in);

/// Cosine of two dense vectors; 0 when either norm is 0 (keeps depth
/// profiles NaN-free on degenerate utterances). Throws DimensionMismatch.
double cosine(std::span<const double> a, std::span<const double> b);

/// Sum of the input vectors of in-vocabulary tokens, with multiplicity.
/// Empty or all-OOV input gives the zero vector.
std::vector<double> sentence_vector(const std::vector<std::string>& tokens,
                                    const EmbeddingModel& model);

/// Cosine of the two sum-pooled sentence vectors; symmetric.
double sim_sum_pool(const std::vector<std::string>& s1, const std::vector<std::string>& s2,
                    const EmbeddingModel& model);

/// Mean over words of s1 of the best cosine against any word of s2.
/// Asymmetric in general; 0 when either side has no in-vocab token.
double sim_heuristic_max(const std::vector<std::string>& s1,
                         const std::vector<std::string>& s2, const EmbeddingModel& model);

/// Mean of all word-by-word cosines; symmetric; 0 on an empty side.
double sim_heuristic_avg(const std::vector<std::string>& s1,
                         const std::vector<std::string>& s2, const EmbeddingModel& model);

/// Cosine of sparse tf*idf vectors; in [0,1].
double sim_tfidf(const std::vector<std::string>& s1, const std::vector<std::string>& s2,
                 const IdfStats& stats);

enum class ScorerKind { tfidf, sum_pool, heuristic_max, heuristic_avg };

/// Immutable similarity strategy: maps two token lists to a real score.
/// For heuristic_max the first argument is the earlier utterance.
class SimilarityScorer {
public:
    static SimilarityScorer tfidf(std::shared_ptr<const IdfStats> stats);
    static SimilarityScorer sum_pool(std::shared_ptr<const EmbeddingModel> model);
    static SimilarityScorer heuristic_max(std::shared_ptr<const EmbeddingModel> model);
    static SimilarityScorer heuristic_avg(std::shared_ptr<const EmbeddingModel> model);

    double score(const std::vector<std::string>& first,
                 const std::vector<std::string>& second) const;
    ScorerKind kind() const { return kind_; }

private:
    SimilarityScorer(ScorerKind kind, std::shared_ptr<const IdfStats> stats,
                     std::shared_ptr<const EmbeddingModel> model)
        : kind_(kind), stats_(std::move(stats)), model_(std::move(model)) {}

    ScorerKind kind_;
    std::shared_ptr<const IdfStats> stats_;
    std::shared_ptr<const EmbeddingModel> model_;
};

}  // namespace dialogseg
