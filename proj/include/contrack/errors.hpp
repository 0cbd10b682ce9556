#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace contrack {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Position inside an annotation string or contract file, 1-based.
struct TextPos {
    std::uint32_t line = 1;
    std::uint32_t column = 1;
    friend bool operator==(const TextPos&, const TextPos&) = default;
};

inline std::string to_string(const TextPos& p) {
    return std::to_string(p.line) + ":" + std::to_string(p.column);
}

// Lexical or grammatical error; carries the position and what was expected.
struct SyntaxError : Error {
    SyntaxError(TextPos pos, const std::string& expected, const std::string& got)
        : Error("syntax error at " + to_string(pos) + ": expected " + expected +
                ", got " + got),
          pos(pos), expected(expected) {}
    TextPos pos;
    std::string expected;
};

// Well-formed text that violates a contract-language rule.
struct SemanticError : Error {
    SemanticError(TextPos pos, const std::string& what)
        : Error("semantic error at " + to_string(pos) + ": " + what), pos(pos) {}
    explicit SemanticError(const std::string& what)
        : Error("semantic error: " + what) {}
    TextPos pos;
};

// Database construction or decode failure.
struct DatabaseError : Error {
    using Error::Error;
};

// Malformed trace stream or record.
struct TraceFormatError : Error {
    using Error::Error;
};

// Trace inconsistent with the database or engine misuse.
struct EngineError : Error {
    using Error::Error;
};

// Malformed relevance report or coverage file.
struct SchemaError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace contrack
