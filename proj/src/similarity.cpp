#include "dialogseg/similarity.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace dialogseg {

namespace {

std::vector<std::size_t> in_vocab_ids(const std::vector<std::string>& tokens,
                                      const Vocabulary& vocab) {
    std::vector<std::size_t> ids;
    ids.reserve(tokens.size());
    for (const std::string& tok : tokens)
        if (auto id = vocab.lookup(tok)) ids.push_back(*id);
    return ids;
}

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double IdfStats::idf(const std::string& word) const {
    auto it = df_.find(word);
    const std::uint64_t df = it == df_.end() ? 0 : it->second;
    return std::log(static_cast<double>(doc_count_ + 1) / static_cast<double>(df + 1)) + 1.0;
}

namespace {

void count_document(const std::vector<std::string>& tokens,
                    std::unordered_map<std::string, std::uint64_t>& df) {
    std::unordered_map<std::string, bool> seen;
    for (const std::string& tok : tokens) {
        if (!seen.emplace(tok, true).second) continue;
        ++df[tok];
    }
}

}  // namespace

IdfStats build_idf(std::span<const Session> sessions) {
    std::unordered_map<std::string, std::uint64_t> df;
    std::uint64_t docs = 0;
    for (const Session& session : sessions) {
        for (const Utterance& utt : session.utterances) {
            count_document(utt.tokens, df);
            ++docs;
        }
    }
    return IdfStats(std::move(df), docs);
}

IdfStats build_idf(const PairCorpus& corpus) {
    std::unordered_map<std::string, std::uint64_t> df;
    std::uint64_t docs = 0;
    for (const TokenPair& pair : corpus.pairs) {
        count_document(pair.query, df);
        count_document(pair.reply, df);
        docs += 2;
    }
    return IdfStats(std::move(df), docs);
}

void save_idf(const IdfStats& stats, std::ostream& out) {
    out << stats.doc_count() << '\n';
    for (const auto& [word, df] : stats.df()) out << word << '\t' << df << '\n';
}

IdfStats load_idf(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing N header");
    std::uint64_t docs = 0;
    try {
        docs = std::stoull(line);
    } catch (const std::exception&) {
        throw ParseError(1, "bad document count: " + line);
    }
    std::unordered_map<std::string, std::uint64_t> df;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(line_no, "expected word<TAB>df");
        try {
            df[line.substr(0, tab)] = std::stoull(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw ParseError(line_no, "bad df: " + line.substr(tab + 1));
        }
    }
    return IdfStats(std::move(df), docs);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (na * nb);
}

std::vector<double> sentence_vector(const std::vector<std::string>& tokens,
                                    const EmbeddingModel& model) {
    std::vector<double> s(model.dim, 0.0);
    for (const std::string& tok : tokens) {
        if (auto id = model.vocab.lookup(tok)) {
            const auto u = model.input_vector(*id);
            for (std::size_t d = 0; d < model.dim; ++d) s[d] += u[d];
        }
    }
    return s;
}

double sim_sum_pool(const std::vector<std::string>& s1, const std::vector<std::string>& s2,
                    const EmbeddingModel& model) {
    return cosine(sentence_vector(s1, model), sentence_vector(s2, model));
}

double sim_heuristic_max(const std::vector<std::string>& s1,
                         const std::vector<std::string>& s2, const EmbeddingModel& model) {
    const auto ids1 = in_vocab_ids(s1, model.vocab);
    const auto ids2 = in_vocab_ids(s2, model.vocab);
    if (ids1.empty() || ids2.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i : ids1) {
        double best = -2.0;
        for (std::size_t j : ids2) {
            const double c = cosine(model.input_vector(i), model.input_vector(j));
            if (c > best) best = c;
        }
        sum += best;
    }
    return sum / static_cast<double>(ids1.size());
}

double sim_heuristic_avg(const std::vector<std::string>& s1,
                         const std::vector<std::string>& s2, const EmbeddingModel& model) {
    const auto ids1 = in_vocab_ids(s1, model.vocab);
    const auto ids2 = in_vocab_ids(s2, model.vocab);
    if (ids1.empty() || ids2.empty()) return 0.0;
    // Sum_ij cos(w_i, v_j) factors into dot(Sum_i w_i/|w_i|, Sum_j v_j/|v_j|),
    // which also makes the score exactly symmetric under argument swap.
    auto unit_sum = [&](const std::vector<std::size_t>& ids) {
        std::vector<double> s(model.dim, 0.0);
        for (std::size_t id : ids) {
            const auto u = model.input_vector(id);
            double norm = 0.0;
            for (double x : u) norm += x * x;
            if (norm == 0.0) continue;  // a zero vector scores 0 against everything
            norm = std::sqrt(norm);
            for (std::size_t d = 0; d < model.dim; ++d) s[d] += u[d] / norm;
        }
        return s;
    };
    const auto a = unit_sum(ids1);
    const auto b = unit_sum(ids2);
    double sum = 0.0;
    for (std::size_t d = 0; d < model.dim; ++d) sum += a[d] * b[d];
    return sum / static_cast<double>(ids1.size() * ids2.size());
}

double sim_tfidf(const std::vector<std::string>& s1, const std::vector<std::string>& s2,
                 const IdfStats& stats) {
    std::unordered_map<std::string, double> v1;
    std::unordered_map<std::string, double> v2;
    for (const std::string& tok : s1) v1[tok] += stats.idf(tok);
    for (const std::string& tok : s2) v2[tok] += stats.idf(tok);
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (const auto& [word, weight] : v1) {
        n1 += weight * weight;
        auto it = v2.find(word);
        if (it != v2.end()) dot += weight * it->second;
    }
    for (const auto& [word, weight] : v2) n2 += weight * weight;
    if (n1 == 0.0 || n2 == 0.0) return 0.0;
    return dot / (std::sqrt(n1) * std::sqrt(n2));
}

SimilarityScorer SimilarityScorer::tfidf(std::shared_ptr<const IdfStats> stats) {
    return SimilarityScorer(ScorerKind::tfidf, std::move(stats), nullptr);
}
SimilarityScorer SimilarityScorer::sum_pool(std::shared_ptr<const EmbeddingModel> model) {
    return SimilarityScorer(ScorerKind::sum_pool, nullptr, std::move(model));
}
SimilarityScorer SimilarityScorer::heuristic_max(std::shared_ptr<const EmbeddingModel> model) {
    return SimilarityScorer(ScorerKind::heuristic_max, nullptr, std::move(model));
}
SimilarityScorer SimilarityScorer::heuristic_avg(std::shared_ptr<const EmbeddingModel> model) {
    return SimilarityScorer(ScorerKind::heuristic_avg, nullptr, std::move(model));
}

double SimilarityScorer::score(const std::vector<std::string>& first,
                               const std::vector<std::string>& second) const {
    switch (kind_) {
        case ScorerKind::tfidf:
            return sim_tfidf(first, second, *stats_);
        case ScorerKind::sum_pool:
            return sim_sum_pool(first, second, *model_);
        case ScorerKind::heuristic_max:
            return sim_heuristic_max(first, second, *model_);
        case ScorerKind::heuristic_avg:
            return sim_heuristic_avg(first, second, *model_);
    }
    return 0.0;
}

}  // namespace dialogseg
