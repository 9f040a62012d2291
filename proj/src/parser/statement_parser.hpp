#pragma once

// Recursive-descent statement parser shared by the `.hor` front end and the
// SRR-Eval relation-string parser.

#include "horae/parser.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>

namespace horae::parser::detail {

enum class AtomSyntax {
  // `{kind:"text" ...}` event literals.
  EventLiteral,
  // Single upper-case letters A-Z standing for placeholder events.
  Letter,
};

class StatementParser {
public:
  StatementParser(std::string_view src, AtomSyntax atoms);

  Statement parse_statement();

  /// Parses the declarations of a library until End.
  RuleLibrary parse_library();
  Rule parse_single_rule();

  void expect_end();

  /// Timestamp names in first-mention order.
  const std::vector<std::string>& timestamps() const noexcept { return timestamp_order_; }

  /// Called for each letter atom in Letter mode; may throw.
  std::function<void(const Token&)> on_letter;

  [[noreturn]] void fail(const std::string& message, Span span,
                         std::vector<TokenKind> expected = {}) const;

private:
  const Token& peek(std::size_t ahead = 0) const;
  const Token& advance();
  bool at_punct(std::string_view p, std::size_t ahead = 0) const;
  bool at_keyword(std::string_view k) const;
  const Token& expect_punct(std::string_view p);
  [[noreturn]] void unexpected(const std::string& wanted, std::vector<TokenKind> expected) const;

  Rule parse_rule_decl(std::size_t position, bool require_terminator);
  Statement parse_implication();
  Statement parse_disjunction();
  Statement parse_conjunction();
  Statement parse_negation();
  Statement parse_atom();
  std::shared_ptr<const BasicEvent> parse_event_body();
  TimeConstraint parse_constraint();
  LinearExpr parse_linear_expr();
  void parse_term(LinearExpr& expr, bool negate);
  Comparator parse_comparator();
  std::string parse_timestamp_name();
  void note_timestamp(const std::string& name);

  std::string_view src_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  AtomSyntax atoms_;

  // Deduplication table: canonical body text -> shared event.
  std::map<std::string, std::shared_ptr<const BasicEvent>> events_by_body_;
  std::vector<std::shared_ptr<const BasicEvent>> event_order_;
  std::set<std::string> timestamp_set_;
  std::vector<std::string> timestamp_order_;
};

std::pair<std::size_t, std::size_t> line_column(std::string_view src, std::size_t offset);

} // namespace horae::parser::detail
