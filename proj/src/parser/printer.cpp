#include "horae/parser.hpp"

namespace horae::parser {

namespace {

// Binding strength; higher binds tighter.
enum Precedence { kImplies = 1, kOr = 2, kAnd = 3, kNot = 4, kAtom = 5 };

int precedence(const Statement& s) {
  switch (s.kind()) {
  case Statement::Kind::Implies: return kImplies;
  case Statement::Kind::Or: return kOr;
  case Statement::Kind::And: return kAnd;
  case Statement::Kind::Not: return kNot;
  default: return kAtom;
  }
}

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void print_term(std::string& out, const Rational& magnitude, const std::string& var) {
  if (magnitude != 1) {
    out += format_rational(magnitude) + "*";
  }
  out += var;
}

void print(std::string& out, const Statement& s);

void print_child(std::string& out, const Statement& s, int min_precedence) {
  if (precedence(s) < min_precedence) {
    out += '(';
    print(out, s);
    out += ')';
  } else {
    print(out, s);
  }
}

void print(std::string& out, const Statement& s) {
  switch (s.kind()) {
  case Statement::Kind::Event: {
    const EventAtom& a = s.event();
    if (a.timestamp) {
      out += "<" + *a.timestamp + ", " + print_event(*a.event) + ">";
    } else {
      out += print_event(*a.event);
    }
    return;
  }
  case Statement::Kind::Constraint: out += print_constraint(s.time_constraint()); return;
  case Statement::Kind::Not:
    out += '!';
    print_child(out, s.operand(), kNot);
    return;
  case Statement::Kind::And:
    // Left-associative: a right operand of equal strength needs parentheses.
    print_child(out, s.lhs(), kAnd);
    out += " & ";
    print_child(out, s.rhs(), kAnd + 1);
    return;
  case Statement::Kind::Or:
    print_child(out, s.lhs(), kOr);
    out += " | ";
    print_child(out, s.rhs(), kOr + 1);
    return;
  case Statement::Kind::Implies:
    // Right-associative.
    print_child(out, s.lhs(), kImplies + 1);
    out += " -> ";
    print_child(out, s.rhs(), kImplies);
    return;
  }
}

} // namespace

std::string print_event(const BasicEvent& event) {
  if (event.components.empty()) {
    // Placeholder events from relation strings print as their letter.
    return event.id;
  }
  std::string out = "{";
  for (std::size_t i = 0; i < event.components.size(); ++i) {
    if (i > 0) {
      out += ' ';
    }
    if (event.comparator && i + 1 == event.components.size()) {
      out += std::string(to_string(*event.comparator)) + " ";
    }
    const auto& c = event.components[i];
    out += std::string(to_string(c.kind)) + ":" + quote(c.text);
  }
  out += '}';
  return out;
}

std::string print_linear_expr(const LinearExpr& expr) {
  std::string out;
  bool first = true;
  for (const auto& t : expr.terms) {
    if (first) {
      if (t.coefficient < 0) {
        // The grammar has no unary minus.
        out += "0 - ";
        print_term(out, -t.coefficient, t.var);
      } else {
        print_term(out, t.coefficient, t.var);
      }
      first = false;
      continue;
    }
    out += t.coefficient < 0 ? " - " : " + ";
    print_term(out, abs(t.coefficient), t.var);
  }
  if (first) {
    return expr.constant < 0 ? "0 - " + format_rational(-expr.constant)
                             : format_rational(expr.constant);
  }
  if (expr.constant > 0) {
    out += " + " + format_rational(expr.constant);
  } else if (expr.constant < 0) {
    out += " - " + format_rational(-expr.constant);
  }
  return out;
}

std::string print_constraint(const TimeConstraint& constraint) {
  return "[" + print_linear_expr(constraint.lhs) + " " + std::string(to_string(constraint.cmp)) +
         " " + print_linear_expr(constraint.rhs) + "]";
}

std::string print_statement(const Statement& statement) {
  std::string out;
  print(out, statement);
  return out;
}

std::string print_rule(const Rule& rule) {
  return std::string(to_string(rule.type)) + " " + print_statement(rule.statement);
}

std::string print_library(const RuleLibrary& library) {
  std::string out;
  std::size_t position = 0;
  for (const auto& rule : library.rules()) {
    ++position;
    if (rule.id != "r" + std::to_string(position)) {
      out += rule.id + ": ";
    }
    out += print_rule(rule) + ";\n";
  }
  return out;
}

} // namespace horae::parser
