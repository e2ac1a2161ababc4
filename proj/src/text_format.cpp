// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/text_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>

#include "coverify/error.hpp"

namespace coverify {

void append_real(std::string& out, double v) {
    if (v == 0.0) {
        v = 0.0;
    }
    char buf[32];
    const int n = std::snprintf(buf, sizeof(buf), "%.8e", v);
    out.append(buf, static_cast<std::size_t>(n));
}

std::string format_real(double v) {
    std::string s;
    append_real(s, v);
    return s;
}

double canonical_real(double v) { return *parse_real(format_real(v)); }

std::optional<double> parse_real(std::string_view token) {
    if (token.empty()) {
        return std::nullopt;
    }
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (*first == '+') {
        ++first;
        if (first == last || *first == '-') {
            return std::nullopt;
        }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        return std::nullopt;
    }
    // Nine digits identify a single-precision value uniquely, so prefer it when it prints the
    // same. Float and 24-bit fixed-point data then read back bit-exact.
    float f = 0.0f;
    const auto fr = std::from_chars(first, last, f, std::chars_format::general);
    if (fr.ec == std::errc{} && std::isfinite(f) && static_cast<double>(f) != v &&
        format_real(static_cast<double>(f)) == format_real(v)) {
        return static_cast<double>(f);
    }
    return v;
}

std::optional<std::size_t> parse_count(std::string_view token) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
        return std::nullopt;
    }
    return v;
}

std::vector<TokenLine> tokenize_lines(std::istream& in) {
    std::vector<TokenLine> lines;
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.resize(hash);
        }
        TokenLine line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) {
                ++i;
            }
            const std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) {
                ++i;
            }
            if (i > start) {
                line.tokens.emplace_back(raw.substr(start, i - start));
            }
        }
        if (!line.tokens.empty()) {
            lines.push_back(std::move(line));
        }
    }
    if (in.bad()) {
        throw IoError("read failure after line " + std::to_string(number));
    }
    return lines;
}

TokenReader::TokenReader(std::istream& in) {
    for (auto& line : tokenize_lines(in)) {
        for (auto& t : line.tokens) {
            tokens_.push_back({std::move(t), line.number});
        }
    }
}

std::size_t TokenReader::line() const noexcept {
    if (tokens_.empty()) {
        return 1;
    }
    return done() ? tokens_.back().line : tokens_[pos_].line;
}

const Token& TokenReader::next(std::string_view what) {
    if (done()) {
        throw ParseError(line(), "unexpected end of input, expected " + std::string(what));
    }
    return tokens_[pos_++];
}

void TokenReader::expect(std::string_view keyword) {
    const Token& t = next("'" + std::string(keyword) + "'");
    if (t.text != keyword) {
        throw ParseError(t.line, "expected '" + std::string(keyword) + "', found '" + t.text + "'");
    }
}

std::size_t TokenReader::next_count(std::string_view what) {
    const Token& t = next(what);
    const auto v = parse_count(t.text);
    if (!v) {
        throw ParseError(t.line, "expected " + std::string(what) + " (non-negative integer), found '" +
                                     t.text + "'");
    }
    return *v;
}

double TokenReader::next_real(std::string_view what) {
    const Token& t = next(what);
    const auto v = parse_real(t.text);
    if (!v) {
        throw ParseError(t.line, "expected " + std::string(what) + " (finite real), found '" + t.text + "'");
    }
    return *v;
}

}  // namespace coverify
