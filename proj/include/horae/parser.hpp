#pragma once

#include "horae/core.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace horae::parser {

enum class TokenKind { Keyword, Ident, Number, Text, Punct, End };

std::string_view to_string(TokenKind kind);

/// Half-open byte range into the source.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

struct Token {
  TokenKind kind;
  // Exact source slice covered by `span` (quotes and escapes included for
  // Text tokens).
  std::string lexeme;
  Span span;
  // Unescaped contents for Text tokens; equal to lexeme otherwise.
  std::string value;
};

class ParseError : public Error {
public:
  ParseError(std::string message, Span span, std::vector<TokenKind> expected, std::size_t line,
             std::size_t column);

  /// Message without the location prefix.
  const std::string& detail() const noexcept { return detail_; }
  Span span() const noexcept { return span_; }
  const std::vector<TokenKind>& expected() const noexcept { return expected_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::string detail_;
  Span span_;
  std::vector<TokenKind> expected_;
  std::size_t line_;
  std::size_t column_;
};

class DuplicateRuleId : public DuplicateId {
public:
  using DuplicateId::DuplicateId;
};

/// Tokenizes a `.hor` source. `#` comments and whitespace are skipped; the
/// returned stream ends with one End token.
std::vector<Token> tokenize(std::string_view src);

/// Parses a single rule; the trailing `;` is optional. Events get ids e1,
/// e2, ... in first-occurrence order.
Rule parse_rule(std::string_view src);

/// Parses zero or more `[label ':'] type statement ';'` declarations.
/// Identical event bodies share one id; unlabeled rules are named r<k>
/// after their 1-based position.
RuleLibrary parse_library(std::string_view src);

std::string print_event(const BasicEvent& event);
std::string print_linear_expr(const LinearExpr& expr);
std::string print_constraint(const TimeConstraint& constraint);
std::string print_statement(const Statement& statement);

/// Canonical `type statement` text without label or terminator.
std::string print_rule(const Rule& rule);

/// One declaration per line, each terminated by `;`. Labels are printed
/// only when a rule id differs from its positional default.
std::string print_library(const RuleLibrary& library);

} // namespace horae::parser
