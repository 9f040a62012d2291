#include "statement_parser.hpp"

#include <array>
#include <cctype>

namespace horae::parser {

namespace {

constexpr std::array<std::string_view, 7> kKeywords = {"shall",  "should",    "forbid", "object",
                                                       "action", "attribute", "value"};

// Longest match first.
constexpr std::array<std::string_view, 21> kPuncts = {"->", "<=", ">=", "<", ">", "=", "+",
                                                      "-",  "*",  "!",  "&", "|", "(", ")",
                                                      "[",  "]",  "{",  "}", ",", ":", ";"};

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

[[noreturn]] void lex_error(std::string_view src, std::string message, Span span) {
  auto [line, column] = detail::line_column(src, span.begin);
  throw ParseError(std::move(message), span, {}, line, column);
}

} // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
  case TokenKind::Keyword: return "keyword";
  case TokenKind::Ident: return "identifier";
  case TokenKind::Number: return "number";
  case TokenKind::Text: return "quoted text";
  case TokenKind::Punct: return "punctuation";
  case TokenKind::End: return "end of input";
  }
  return "token";
}

namespace {

std::string format_location(std::size_t line, std::size_t column, const std::string& message) {
  return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

} // namespace

ParseError::ParseError(std::string message, Span span, std::vector<TokenKind> expected,
                       std::size_t line, std::size_t column)
    : Error(format_location(line, column, message)), detail_(std::move(message)), span_(span),
      expected_(std::move(expected)), line_(line), column_(column) {}

namespace detail {

std::pair<std::size_t, std::size_t> line_column(std::string_view src, std::size_t offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset && i < src.size(); ++i) {
    if (src[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

} // namespace detail

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < n && src[i] != '\n') {
        ++i;
      }
      continue;
    }
    const std::size_t start = i;
    if (c == '"') {
      std::string value;
      ++i;
      bool closed = false;
      while (i < n) {
        char d = src[i];
        if (d == '"') {
          closed = true;
          ++i;
          break;
        }
        if (d == '\\') {
          if (i + 1 >= n || (src[i + 1] != '"' && src[i + 1] != '\\')) {
            lex_error(src, "unsupported escape in quoted text", {i, std::min(i + 2, n)});
          }
          value.push_back(src[i + 1]);
          i += 2;
          continue;
        }
        if (d == '\n') {
          break;
        }
        value.push_back(d);
        ++i;
      }
      if (!closed) {
        lex_error(src, "unterminated quoted text", {start, i});
      }
      tokens.push_back({TokenKind::Text, std::string(src.substr(start, i - start)), {start, i},
                        std::move(value)});
      continue;
    }
    if (is_digit(c)) {
      while (i < n && is_digit(src[i])) {
        ++i;
      }
      if (i + 1 < n && src[i] == '.' && is_digit(src[i + 1])) {
        ++i;
        while (i < n && is_digit(src[i])) {
          ++i;
        }
      }
      if (i + 1 < n && src[i] == '/' && is_digit(src[i + 1])) {
        ++i;
        while (i < n && is_digit(src[i])) {
          ++i;
        }
      }
      std::string lexeme(src.substr(start, i - start));
      tokens.push_back({TokenKind::Number, lexeme, {start, i}, lexeme});
      continue;
    }
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(src[i])) {
        ++i;
      }
      std::string lexeme(src.substr(start, i - start));
      bool keyword = false;
      for (auto k : kKeywords) {
        keyword = keyword || lexeme == k;
      }
      tokens.push_back(
          {keyword ? TokenKind::Keyword : TokenKind::Ident, lexeme, {start, i}, lexeme});
      continue;
    }
    bool matched = false;
    for (auto p : kPuncts) {
      if (src.substr(i, p.size()) == p) {
        i += p.size();
        tokens.push_back({TokenKind::Punct, std::string(p), {start, i}, std::string(p)});
        matched = true;
        break;
      }
    }
    if (!matched) {
      lex_error(src, "unexpected character '" + std::string(1, c) + "'", {start, start + 1});
    }
  }
  tokens.push_back({TokenKind::End, "", {n, n}, ""});
  return tokens;
}

} // namespace horae::parser
