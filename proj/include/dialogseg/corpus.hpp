#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dialogseg/errors.hpp"

namespace dialogseg {

enum class Role { query, reply };

/// One conversation turn. `tokens` is always tokenize(raw).
struct Utterance {
    std::size_t index = 0;
    Role role = Role::query;
    std::string raw;
    std::vector<std::string> tokens;
};

/// A maximal run of consecutive utterances in one conversation. Gold
/// boundaries are gap indices: gap i separates utterance i from i+1.
struct Session {
    std::vector<Utterance> utterances;
    std::set<std::size_t> gold_boundaries;

    std::size_t gap_count() const {
        return utterances.size() < 2 ? 0 : utterances.size() - 1;
    }
};

struct TokenPair {
    std::vector<std::string> query;
    std::vector<std::string> reply;
};

/// Query/reply training pairs with the total running-word count.
struct PairCorpus {
    std::vector<TokenPair> pairs;
    std::uint64_t token_count = 0;
};

/// Frequency-thresholded word list. Ids are dense 0..V-1, assigned in
/// descending frequency order (ties lexicographic).
class Vocabulary {
public:
    struct Entry {
        std::string word;
        std::uint64_t count;
    };

    Vocabulary() = default;
    Vocabulary(std::vector<Entry> entries, std::uint64_t min_count);

    std::size_t size() const { return entries_.size(); }
    std::optional<std::size_t> lookup(const std::string& word) const;
    const std::string& word(std::size_t id) const { return entries_[id].word; }
    std::uint64_t count(std::size_t id) const { return entries_[id].count; }
    std::uint64_t min_count() const { return min_count_; }
    std::uint64_t total_kept_tokens() const { return total_kept_tokens_; }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    std::uint64_t min_count_ = 1;
    std::uint64_t total_kept_tokens_ = 0;
};

/// Splits on Unicode whitespace, breaks each CJK codepoint into its own
/// token, peels leading/trailing punctuation into separate tokens and
/// lowercases Latin script. Deterministic; empty input gives an empty list.
std::vector<std::string> tokenize(const std::string& raw);

/// Parses `query<TAB>reply` lines. Empty lines are skipped. Throws
/// MalformedLine when the TAB is missing or either side has no tokens.
PairCorpus parse_pair_corpus(const std::string& text);

/// Session file format: one utterance per line, `====` marks a gold boundary
/// at the preceding gap, a blank line ends a session. Roles alternate
/// starting with query; a `Q:`/`R:` prefix overrides and is stripped.
/// Throws BoundaryAtEdge for a `====` with no utterance on both sides.
std::vector<Session> parse_sessions(const std::string& text);

/// Inverse of parse_sessions: explicit `Q: `/`R: ` prefixes, `====` boundary
/// lines, one blank line after each session.
std::string serialize_sessions(std::span<const Session> sessions);

/// Keeps words with frequency >= min_count. Throws EmptyVocabulary when
/// nothing survives.
Vocabulary build_vocab(const PairCorpus& corpus, std::uint64_t min_count);

}  // namespace dialogseg
