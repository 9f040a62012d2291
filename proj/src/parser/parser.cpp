#include "statement_parser.hpp"

namespace horae::parser {

namespace detail {

StatementParser::StatementParser(std::string_view src, AtomSyntax atoms)
    : src_(src), tokens_(tokenize(src)), atoms_(atoms) {}

const Token& StatementParser::peek(std::size_t ahead) const {
  return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

const Token& StatementParser::advance() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) {
    ++pos_;
  }
  return t;
}

bool StatementParser::at_punct(std::string_view p, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::Punct && t.lexeme == p;
}

bool StatementParser::at_keyword(std::string_view k) const {
  return peek().kind == TokenKind::Keyword && peek().lexeme == k;
}

void StatementParser::fail(const std::string& message, Span span,
                           std::vector<TokenKind> expected) const {
  auto [line, column] = line_column(src_, span.begin);
  throw ParseError(message, span, std::move(expected), line, column);
}

void StatementParser::unexpected(const std::string& wanted,
                                 std::vector<TokenKind> expected) const {
  const Token& t = peek();
  std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.lexeme + "'";
  fail("expected " + wanted + ", found " + found, t.span, std::move(expected));
}

const Token& StatementParser::expect_punct(std::string_view p) {
  if (!at_punct(p)) {
    unexpected("'" + std::string(p) + "'", {TokenKind::Punct});
  }
  return advance();
}

void StatementParser::expect_end() {
  if (peek().kind != TokenKind::End) {
    unexpected("end of input", {TokenKind::End});
  }
}

Statement StatementParser::parse_statement() { return parse_implication(); }

Statement StatementParser::parse_implication() {
  Statement lhs = parse_disjunction();
  if (at_punct("->")) {
    advance();
    return Statement::implication(std::move(lhs), parse_implication());
  }
  return lhs;
}

Statement StatementParser::parse_disjunction() {
  Statement lhs = parse_conjunction();
  while (at_punct("|")) {
    advance();
    lhs = Statement::disjunction(std::move(lhs), parse_conjunction());
  }
  return lhs;
}

Statement StatementParser::parse_conjunction() {
  Statement lhs = parse_negation();
  while (at_punct("&")) {
    advance();
    lhs = Statement::conjunction(std::move(lhs), parse_negation());
  }
  return lhs;
}

Statement StatementParser::parse_negation() {
  if (at_punct("!")) {
    advance();
    return Statement::negation(parse_negation());
  }
  return parse_atom();
}

Statement StatementParser::parse_atom() {
  if (at_punct("(")) {
    advance();
    Statement inner = parse_statement();
    expect_punct(")");
    return inner;
  }
  if (at_punct("[")) {
    return Statement::constraint(parse_constraint());
  }
  if (at_punct("<")) {
    advance();
    std::string name = parse_timestamp_name();
    expect_punct(",");
    auto event = parse_event_body();
    expect_punct(">");
    return Statement::atom(EventAtom{std::move(event), std::move(name)});
  }
  if (atoms_ == AtomSyntax::EventLiteral && at_punct("{")) {
    return Statement::atom(EventAtom{parse_event_body(), std::nullopt});
  }
  if (atoms_ == AtomSyntax::Letter && peek().kind == TokenKind::Ident) {
    return Statement::atom(EventAtom{parse_event_body(), std::nullopt});
  }
  if (atoms_ == AtomSyntax::Letter) {
    unexpected("an event letter, '(', '[' or '<'", {TokenKind::Ident, TokenKind::Punct});
  }
  unexpected("an event '{', '(', '[' or '<'", {TokenKind::Punct});
}

std::shared_ptr<const BasicEvent> StatementParser::parse_event_body() {
  if (atoms_ == AtomSyntax::Letter) {
    const Token& t = peek();
    if (t.kind != TokenKind::Ident || t.lexeme.size() != 1 || t.lexeme[0] < 'A' ||
        t.lexeme[0] > 'Z') {
      unexpected("an event letter A-Z", {TokenKind::Ident});
    }
    if (on_letter) {
      on_letter(t);
    }
    advance();
    auto& slot = events_by_body_[t.lexeme];
    if (!slot) {
      slot = std::make_shared<const BasicEvent>(BasicEvent::make(t.lexeme, {}));
      event_order_.push_back(slot);
    }
    return slot;
  }

  expect_punct("{");
  std::vector<EventComponent> components;
  std::optional<Comparator> comparator;
  while (true) {
    if (peek().kind == TokenKind::Keyword) {
      auto kind = component_kind_from_string(peek().lexeme);
      if (!kind) {
        unexpected("a component kind (object, action, attribute, value)", {TokenKind::Keyword});
      }
      advance();
      expect_punct(":");
      const Token& text = peek();
      if (text.kind != TokenKind::Text) {
        unexpected("quoted component text", {TokenKind::Text});
      }
      advance();
      try {
        components.push_back(EventComponent::make(*kind, text.value));
      } catch (const InvalidArgument&) {
        fail("event component text is empty", text.span, {TokenKind::Text});
      }
      if (comparator) {
        // Exactly one component follows the comparator.
        break;
      }
      continue;
    }
    if (!comparator && !components.empty() &&
        (at_punct("<") || at_punct(">") || at_punct("<=") || at_punct(">=") || at_punct("="))) {
      comparator = parse_comparator();
      if (peek().kind != TokenKind::Keyword) {
        unexpected("a component after the comparator", {TokenKind::Keyword});
      }
      continue;
    }
    break;
  }
  if (components.empty()) {
    unexpected("at least one event component", {TokenKind::Keyword});
  }
  if (!at_punct("}")) {
    unexpected("'}' closing the event",
               comparator ? std::vector{TokenKind::Punct}
                          : std::vector{TokenKind::Keyword, TokenKind::Punct});
  }
  advance();

  BasicEvent body = BasicEvent::make("", std::move(components), comparator);
  std::string key = print_event(body);
  auto& slot = events_by_body_[key];
  if (!slot) {
    body.id = "e" + std::to_string(event_order_.size() + 1);
    slot = std::make_shared<const BasicEvent>(std::move(body));
    event_order_.push_back(slot);
  }
  return slot;
}

Comparator StatementParser::parse_comparator() {
  const Token& t = peek();
  std::optional<Comparator> cmp;
  if (t.kind == TokenKind::Punct) {
    cmp = comparator_from_string(t.lexeme);
  }
  if (!cmp) {
    unexpected("a comparator (<, >, <=, >=, =)", {TokenKind::Punct});
  }
  advance();
  return *cmp;
}

std::string StatementParser::parse_timestamp_name() {
  const Token& t = peek();
  if (t.kind != TokenKind::Ident) {
    unexpected("a timestamp identifier", {TokenKind::Ident});
  }
  advance();
  note_timestamp(t.lexeme);
  return t.lexeme;
}

void StatementParser::note_timestamp(const std::string& name) {
  if (timestamp_set_.insert(name).second) {
    timestamp_order_.push_back(name);
  }
}

TimeConstraint StatementParser::parse_constraint() {
  expect_punct("[");
  LinearExpr lhs = parse_linear_expr();
  Comparator cmp = parse_comparator();
  LinearExpr rhs = parse_linear_expr();
  expect_punct("]");
  return TimeConstraint{std::move(lhs), cmp, std::move(rhs)};
}

LinearExpr StatementParser::parse_linear_expr() {
  LinearExpr expr;
  parse_term(expr, false);
  while (at_punct("+") || at_punct("-")) {
    bool negate = advance().lexeme == "-";
    parse_term(expr, negate);
  }
  return expr;
}

void StatementParser::parse_term(LinearExpr& expr, bool negate) {
  const Token& t = peek();
  if (t.kind == TokenKind::Number) {
    advance();
    Rational value = parse_rational(t.lexeme);
    if (negate) {
      value = -value;
    }
    if (at_punct("*")) {
      advance();
      expr.add_term(value, parse_timestamp_name());
    } else {
      expr.add_constant(value);
    }
    return;
  }
  if (t.kind == TokenKind::Ident) {
    expr.add_term(Rational(negate ? -1 : 1), parse_timestamp_name());
    return;
  }
  unexpected("a number or timestamp identifier", {TokenKind::Number, TokenKind::Ident});
}

Rule StatementParser::parse_rule_decl(std::size_t position, bool require_terminator) {
  std::string id = "r" + std::to_string(position);
  if (peek().kind == TokenKind::Ident && at_punct(":", 1)) {
    id = advance().lexeme;
    advance();
  }
  const Token& type_token = peek();
  std::optional<RuleType> type;
  if (type_token.kind == TokenKind::Keyword) {
    type = rule_type_from_string(type_token.lexeme);
  }
  if (!type) {
    unexpected("a rule type (shall, should, forbid)", {TokenKind::Keyword});
  }
  advance();
  Statement statement = parse_statement();
  if (require_terminator) {
    expect_punct(";");
  } else if (at_punct(";")) {
    advance();
  }
  return Rule{std::move(id), *type, std::move(statement)};
}

Rule StatementParser::parse_single_rule() {
  Rule rule = parse_rule_decl(1, false);
  expect_end();
  return rule;
}

RuleLibrary StatementParser::parse_library() {
  std::vector<Rule> rules;
  std::set<std::string> ids;
  while (peek().kind != TokenKind::End) {
    Rule rule = parse_rule_decl(rules.size() + 1, true);
    if (!ids.insert(rule.id).second) {
      throw DuplicateRuleId(rule.id);
    }
    rules.push_back(std::move(rule));
  }
  std::vector<BasicEvent> events;
  events.reserve(event_order_.size());
  for (const auto& e : event_order_) {
    events.push_back(*e);
  }
  std::vector<TimestampVar> timestamps;
  for (const auto& name : timestamp_order_) {
    timestamps.push_back(TimestampVar{name});
  }
  return RuleLibrary(std::move(rules), std::move(events), std::move(timestamps));
}

} // namespace detail

Rule parse_rule(std::string_view src) {
  detail::StatementParser parser(src, detail::AtomSyntax::EventLiteral);
  return parser.parse_single_rule();
}

RuleLibrary parse_library(std::string_view src) {
  detail::StatementParser parser(src, detail::AtomSyntax::EventLiteral);
  return parser.parse_library();
}

} // namespace horae::parser
