// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

// Shared lexical layer of the line-oriented text formats (topology, parameters, dumps, envelopes).

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coverify {

/// Scientific notation with 9 significant digits, e.g. "2.50000000e-01". Negative zero prints as zero.
std::string format_real(double v);
void append_real(std::string& out, double v);

/// The value a real takes after one write/read cycle through format_real.
double canonical_real(double v);

/// Full-token decimal/scientific parse; rejects trailing garbage, NaN and infinities. When the
/// nearest single-precision value formats identically it is returned instead of the nearest double.
std::optional<double> parse_real(std::string_view token);
std::optional<std::size_t> parse_count(std::string_view token);

struct Token {
    std::string text;
    std::size_t line = 0;
};

struct TokenLine {
    std::size_t number = 0;
    std::vector<std::string> tokens;
};

/// Splits a stream into whitespace-separated tokens per line. '#' starts a comment; blank lines
/// are dropped.
std::vector<TokenLine> tokenize_lines(std::istream& in);

/// Forward cursor over the tokens of a whole document, ignoring line breaks.
class TokenReader {
public:
    explicit TokenReader(std::istream& in);

    bool done() const noexcept { return pos_ >= tokens_.size(); }
    /// Line of the next token, or of the last token when exhausted.
    std::size_t line() const noexcept;

    const Token* peek() const noexcept { return done() ? nullptr : &tokens_[pos_]; }
    /// Throws ParseError at end of input; `what` names the expected item.
    const Token& next(std::string_view what);
    void expect(std::string_view keyword);
    std::size_t next_count(std::string_view what);
    double next_real(std::string_view what);

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace coverify
