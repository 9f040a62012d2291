#include "horae/consistency.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace horae::consistency {

namespace {

// Simple SMT-LIB symbols are kept bare, anything else is quoted.
std::string symbol(const std::string& prefix, const std::string& name) {
  std::string full = prefix + name;
  bool simple = std::all_of(full.begin(), full.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
  });
  if (simple) {
    return full;
  }
  std::string quoted = "|";
  for (char c : full) {
    quoted += (c == '|' || c == '\\') ? '_' : c;
  }
  return quoted + "|";
}

std::string decimal(const boost::multiprecision::cpp_int& v) { return v.str() + ".0"; }

std::string real(const Rational& value) {
  Rational magnitude = abs(value);
  std::string body = denominator(magnitude) == 1
                         ? decimal(numerator(magnitude))
                         : "(/ " + decimal(numerator(magnitude)) + " " +
                               decimal(denominator(magnitude)) + ")";
  return value < 0 ? "(- " + body + ")" : body;
}

std::string linear(const LinearExpr& e) {
  std::vector<std::string> parts;
  for (const auto& t : e.terms) {
    std::string var = symbol("ts_", t.var);
    parts.push_back(t.coefficient == 1 ? var : "(* " + real(t.coefficient) + " " + var + ")");
  }
  if (e.constant != 0 || parts.empty()) {
    parts.push_back(real(e.constant));
  }
  if (parts.size() == 1) {
    return parts.front();
  }
  std::string out = "(+";
  for (const auto& p : parts) {
    out += " " + p;
  }
  return out + ")";
}

std::string op(Comparator cmp) {
  switch (cmp) {
  case Comparator::Lt: return "<";
  case Comparator::Gt: return ">";
  case Comparator::Le: return "<=";
  case Comparator::Ge: return ">=";
  case Comparator::Eq: return "=";
  }
  return "=";
}

std::string term(const Statement& s) {
  switch (s.kind()) {
  case Statement::Kind::Event: return symbol("ev_", s.event().id());
  case Statement::Kind::Constraint: {
    const TimeConstraint& c = s.time_constraint();
    return "(" + op(c.cmp) + " " + linear(c.lhs) + " " + linear(c.rhs) + ")";
  }
  case Statement::Kind::Not: return "(not " + term(s.operand()) + ")";
  case Statement::Kind::And: return "(and " + term(s.lhs()) + " " + term(s.rhs()) + ")";
  case Statement::Kind::Or: return "(or " + term(s.lhs()) + " " + term(s.rhs()) + ")";
  case Statement::Kind::Implies: return "(=> " + term(s.lhs()) + " " + term(s.rhs()) + ")";
  }
  return "true";
}

} // namespace

std::string emit_smtlib(const RuleLibrary& lib, const abstraction::AbstractionResult* abstraction) {
  RuleLibrary work = abstraction ? abstraction::apply_abstraction(lib, *abstraction) : lib;
  std::set<std::string> events;
  std::set<std::string> timestamps;
  for (const auto& rule : work.rules()) {
    for (const auto& id : event_ids(rule.statement)) {
      events.insert(id);
    }
  }
  for (const auto& t : work.timestamps()) {
    timestamps.insert(t.name);
  }
  std::string out = "(set-logic QF_LRA)\n";
  for (const auto& id : events) {
    out += "(declare-const " + symbol("ev_", id) + " Bool)\n";
  }
  for (const auto& name : timestamps) {
    out += "(declare-const " + symbol("ts_", name) + " Real)\n";
  }
  for (const auto& name : timestamps) {
    out += "(assert (>= " + symbol("ts_", name) + " 0.0))\n";
  }
  for (const auto& rule : work.rules()) {
    out += "(assert " + term(rule.statement) + ")\n";
  }
  out += "(check-sat)\n";
  if (!events.empty() || !timestamps.empty()) {
    out += "(get-model)\n";
  }
  return out;
}

} // namespace horae::consistency
