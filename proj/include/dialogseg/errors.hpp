#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dialogseg {

// Base class for every data/domain error raised by the library. The CLI maps
// these to exit code 2; anything else is a usage or programming error.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class MalformedLine : public Error {
public:
    MalformedLine(std::size_t line, const std::string& detail)
        : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class BoundaryAtEdge : public Error {
public:
    explicit BoundaryAtEdge(std::size_t line)
        : Error("line " + std::to_string(line) +
                ": boundary marker with no utterance on both sides"),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class EmptyVocabulary : public Error {
public:
    explicit EmptyVocabulary(const std::string& detail) : Error(detail) {}
};

class EmptyContext : public Error {
public:
    EmptyContext() : Error("no context token for target position") {}
};

class NoTrainableTokens : public Error {
public:
    NoTrainableTokens() : Error("corpus has no target with a non-empty context") {}
};

class UnknownWord : public Error {
public:
    explicit UnknownWord(const std::string& word) : Error("unknown word: " + word) {}
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& detail)
        : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t a, std::size_t b)
        : Error("vector dimensions differ: " + std::to_string(a) + " vs " +
                std::to_string(b)) {}
};

class TooShort : public Error {
public:
    explicit TooShort(std::size_t n)
        : Error("session has " + std::to_string(n) +
                " utterance(s); need at least 2 to segment") {}
};

class SessionCountMismatch : public Error {
public:
    SessionCountMismatch(std::size_t predicted, std::size_t gold)
        : Error("predicted " + std::to_string(predicted) + " sessions vs gold " +
                std::to_string(gold)) {}
};

class NoGoldBoundaries : public Error {
public:
    NoGoldBoundaries() : Error("validation set has no gaps to tune on") {}
};

}  // namespace dialogseg
