#include "dialogseg/corpus.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

namespace dialogseg {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one codepoint starting at `i`, advancing `i` past it. Invalid
// sequences consume a single byte and yield U+FFFD.
char32_t decode_utf8(const std::string& s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacement;
    }
    if (i + len > s.size()) {
        ++i;
        return kReplacement;
    }
    for (int k = 1; k < len; ++k) {
        unsigned char bk = byte(i + k);
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return kReplacement;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
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

bool is_space(char32_t cp) {
    switch (cp) {
        case U'\t':
        case U'\n':
        case U'\v':
        case U'\f':
        case U'\r':
        case U' ':
        case 0x85:
        case 0xA0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_cjk(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // unified ideographs
           (cp >= 0x3400 && cp <= 0x4DBF) ||    // extension A
           (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
           (cp >= 0x20000 && cp <= 0x2FFFF);    // extensions B..F
}

bool is_punct(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
               (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
    }
    return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
           (cp >= 0x3001 && cp <= 0x303F) ||    // CJK punctuation (U+3000 is space)
           (cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
           (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65) ||
           (cp >= 0x2E00 && cp <= 0x2E7F);
}

char32_t to_lower(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    // Latin-1 uppercase block, skipping the multiplication sign.
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    return cp;
}

std::string encode_one(char32_t cp) {
    std::string s;
    encode_utf8(cp, s);
    return s;
}

// Emits a whitespace-free, CJK-free chunk: leading and trailing punctuation
// become their own tokens, the core keeps internal punctuation.
void emit_chunk(const std::u32string& chunk, std::vector<std::string>& out) {
    std::size_t b = 0;
    std::size_t e = chunk.size();
    std::vector<char32_t> trailing;
    while (b < e && is_punct(chunk[b])) {
        out.push_back(encode_one(chunk[b]));
        ++b;
    }
    while (e > b && is_punct(chunk[e - 1])) {
        trailing.push_back(chunk[e - 1]);
        --e;
    }
    if (e > b) {
        std::string core;
        for (std::size_t k = b; k < e; ++k) encode_utf8(to_lower(chunk[k]), core);
        out.push_back(std::move(core));
    }
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it)
        out.push_back(encode_one(*it));
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        if (start == text.size()) {
            break;
        }
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    for (auto& line : lines) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
    }
    return lines;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& raw) {
    std::vector<std::string> tokens;
    std::u32string chunk;
    const auto flush = [&] {
        if (!chunk.empty()) {
            emit_chunk(chunk, tokens);
            chunk.clear();
        }
    };
    std::size_t i = 0;
    while (i < raw.size()) {
        char32_t cp = decode_utf8(raw, i);
        if (is_space(cp)) {
            flush();
        } else if (is_cjk(cp)) {
            flush();
            tokens.push_back(encode_one(cp));
        } else {
            chunk.push_back(cp);
        }
    }
    flush();
    return tokens;
}

PairCorpus parse_pair_corpus(const std::string& text) {
    PairCorpus corpus;
    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string& line = lines[n];
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw MalformedLine(n + 1, "expected query<TAB>reply");
        TokenPair pair;
        pair.query = tokenize(line.substr(0, tab));
        pair.reply = tokenize(line.substr(tab + 1));
        if (pair.query.empty() || pair.reply.empty())
            throw MalformedLine(n + 1, "query or reply has no tokens");
        corpus.token_count += pair.query.size() + pair.reply.size();
        corpus.pairs.push_back(std::move(pair));
    }
    return corpus;
}

std::vector<Session> parse_sessions(const std::string& text) {
    std::vector<Session> sessions;
    Session current;
    Role next_role = Role::query;
    bool pending_boundary = false;
    std::size_t pending_line = 0;

    const auto close_session = [&] {
        if (pending_boundary) throw BoundaryAtEdge(pending_line);
        if (!current.utterances.empty()) {
            sessions.push_back(std::move(current));
            current = Session{};
        }
        next_role = Role::query;
    };

    const auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string& line = lines[n];
        if (line.empty()) {
            close_session();
            continue;
        }
        if (line == "====") {
            if (current.utterances.empty()) throw BoundaryAtEdge(n + 1);
            pending_boundary = true;
            pending_line = n + 1;
            continue;
        }
        Utterance utt;
        utt.role = next_role;
        std::string raw = line;
        if (line.rfind("Q:", 0) == 0 || line.rfind("R:", 0) == 0) {
            utt.role = line[0] == 'Q' ? Role::query : Role::reply;
            raw = line.substr(2);
            if (!raw.empty() && raw.front() == ' ') raw.erase(0, 1);
        }
        utt.index = current.utterances.size();
        utt.raw = std::move(raw);
        utt.tokens = tokenize(utt.raw);
        next_role = utt.role == Role::query ? Role::reply : Role::query;
        if (pending_boundary) {
            current.gold_boundaries.insert(utt.index - 1);
            pending_boundary = false;
        }
        current.utterances.push_back(std::move(utt));
    }
    close_session();
    return sessions;
}

std::string serialize_sessions(std::span<const Session> sessions) {
    std::string out;
    for (const Session& session : sessions) {
        for (const Utterance& utt : session.utterances) {
            if (utt.index > 0 && session.gold_boundaries.count(utt.index - 1))
                out += "====\n";
            out += utt.role == Role::query ? "Q: " : "R: ";
            out += utt.raw;
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

Vocabulary::Vocabulary(std::vector<Entry> entries, std::uint64_t min_count)
    : entries_(std::move(entries)), min_count_(min_count) {
    index_.reserve(entries_.size());
    for (std::size_t id = 0; id < entries_.size(); ++id) {
        index_.emplace(entries_[id].word, id);
        total_kept_tokens_ += entries_[id].count;
    }
}

std::optional<std::size_t> Vocabulary::lookup(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Vocabulary build_vocab(const PairCorpus& corpus, std::uint64_t min_count) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const TokenPair& pair : corpus.pairs) {
        for (const std::string& tok : pair.query) ++counts[tok];
        for (const std::string& tok : pair.reply) ++counts[tok];
    }
    std::vector<Vocabulary::Entry> entries;
    entries.reserve(counts.size());
    for (auto& [word, count] : counts) {
        if (count >= min_count) entries.push_back({word, count});
    }
    if (entries.empty())
        throw EmptyVocabulary("no word reaches min_count=" + std::to_string(min_count));
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.word < b.word;
    });
    return Vocabulary(std::move(entries), min_count);
}

}  // namespace dialogseg
