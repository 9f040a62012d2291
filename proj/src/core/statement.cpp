#include "horae/core.hpp"

#include <algorithm>
#include <cassert>

namespace horae {

struct Statement::Node {
  Kind kind;
  std::vector<Statement> children;
  std::variant<std::monostate, EventAtom, TimeConstraint> payload;
  std::size_t size = 1;
};

Statement Statement::atom(EventAtom a) {
  if (!a.event) {
    throw InvalidArgument("event atom without an event");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Event;
  node->payload = std::move(a);
  return Statement(std::move(node));
}

Statement Statement::atom(const BasicEvent& event, std::optional<std::string> timestamp) {
  return atom(EventAtom{std::make_shared<const BasicEvent>(event), std::move(timestamp)});
}

Statement Statement::constraint(TimeConstraint c) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Constraint;
  node->payload = std::move(c);
  return Statement(std::move(node));
}

Statement Statement::negation(Statement operand) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Not;
  node->size = 1 + operand.size();
  node->children.push_back(std::move(operand));
  return Statement(std::move(node));
}

Statement Statement::conjunction(Statement lhs, Statement rhs) {
  return binary(Kind::And, std::move(lhs), std::move(rhs));
}

Statement Statement::disjunction(Statement lhs, Statement rhs) {
  return binary(Kind::Or, std::move(lhs), std::move(rhs));
}

Statement Statement::implication(Statement lhs, Statement rhs) {
  return binary(Kind::Implies, std::move(lhs), std::move(rhs));
}

Statement Statement::binary(Kind kind, Statement lhs, Statement rhs) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->size = 1 + lhs.size() + rhs.size();
  node->children.push_back(std::move(lhs));
  node->children.push_back(std::move(rhs));
  return Statement(std::move(node));
}

Statement::Kind Statement::kind() const { return node_->kind; }

const Statement& Statement::operand() const {
  assert(node_->kind == Kind::Not);
  return node_->children.front();
}

const Statement& Statement::lhs() const {
  assert(node_->children.size() == 2);
  return node_->children[0];
}

const Statement& Statement::rhs() const {
  assert(node_->children.size() == 2);
  return node_->children[1];
}

const EventAtom& Statement::event() const { return std::get<EventAtom>(node_->payload); }

const TimeConstraint& Statement::time_constraint() const {
  return std::get<TimeConstraint>(node_->payload);
}

std::size_t Statement::size() const { return node_->size; }

bool operator==(const Statement& a, const Statement& b) {
  if (a.node_ == b.node_) {
    return true;
  }
  if (a.kind() != b.kind()) {
    return false;
  }
  switch (a.kind()) {
  case Statement::Kind::Event: return a.event() == b.event();
  case Statement::Kind::Constraint: return a.time_constraint() == b.time_constraint();
  case Statement::Kind::Not: return a.operand() == b.operand();
  default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

void for_each_event(const Statement& s, const std::function<void(const EventAtom&)>& fn) {
  switch (s.kind()) {
  case Statement::Kind::Event: fn(s.event()); return;
  case Statement::Kind::Constraint: return;
  case Statement::Kind::Not: for_each_event(s.operand(), fn); return;
  default:
    for_each_event(s.lhs(), fn);
    for_each_event(s.rhs(), fn);
  }
}

void for_each_constraint(const Statement& s,
                         const std::function<void(const TimeConstraint&)>& fn) {
  switch (s.kind()) {
  case Statement::Kind::Event: return;
  case Statement::Kind::Constraint: fn(s.time_constraint()); return;
  case Statement::Kind::Not: for_each_constraint(s.operand(), fn); return;
  default:
    for_each_constraint(s.lhs(), fn);
    for_each_constraint(s.rhs(), fn);
  }
}

namespace {

void push_unique(std::vector<std::string>& out, const std::string& name) {
  if (std::find(out.begin(), out.end(), name) == out.end()) {
    out.push_back(name);
  }
}

void collect_timestamps(const Statement& s, std::vector<std::string>& out) {
  switch (s.kind()) {
  case Statement::Kind::Event:
    if (s.event().timestamp) {
      push_unique(out, *s.event().timestamp);
    }
    return;
  case Statement::Kind::Constraint:
    for (const auto& v : s.time_constraint().variables()) {
      push_unique(out, v);
    }
    return;
  case Statement::Kind::Not: collect_timestamps(s.operand(), out); return;
  default:
    collect_timestamps(s.lhs(), out);
    collect_timestamps(s.rhs(), out);
  }
}

} // namespace

std::vector<std::string> event_ids(const Statement& s) {
  std::vector<std::string> ids;
  for_each_event(s, [&](const EventAtom& a) { push_unique(ids, a.id()); });
  return ids;
}

std::vector<std::string> timestamp_names(const Statement& s) {
  std::vector<std::string> names;
  collect_timestamps(s, names);
  return names;
}

Statement map_events(const Statement& s, const std::function<Statement(const EventAtom&)>& fn) {
  switch (s.kind()) {
  case Statement::Kind::Event: return fn(s.event());
  case Statement::Kind::Constraint: return s;
  case Statement::Kind::Not: return Statement::negation(map_events(s.operand(), fn));
  case Statement::Kind::And:
    return Statement::conjunction(map_events(s.lhs(), fn), map_events(s.rhs(), fn));
  case Statement::Kind::Or:
    return Statement::disjunction(map_events(s.lhs(), fn), map_events(s.rhs(), fn));
  case Statement::Kind::Implies:
    return Statement::implication(map_events(s.lhs(), fn), map_events(s.rhs(), fn));
  }
  return s;
}

} // namespace horae
