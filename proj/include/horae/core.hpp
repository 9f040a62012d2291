#pragma once

#include "horae/error.hpp"
#include "horae/rational.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace horae {

enum class RuleType { Shall, Should, Forbid };

std::string_view to_string(RuleType type);
std::optional<RuleType> rule_type_from_string(std::string_view keyword);

enum class ComponentKind { Object, Action, Attribute, Value };

std::string_view to_string(ComponentKind kind);
std::optional<ComponentKind> component_kind_from_string(std::string_view keyword);

/// Comparison operators shared by event comparisons and timing constraints.
enum class Comparator { Lt, Gt, Le, Ge, Eq };

std::string_view to_string(Comparator cmp);
std::optional<Comparator> comparator_from_string(std::string_view text);

struct EventComponent {
  ComponentKind kind;
  std::string text;

  /// Trims and collapses internal whitespace; throws InvalidArgument when
  /// nothing remains.
  static EventComponent make(ComponentKind kind, std::string_view text);

  friend bool operator==(const EventComponent&, const EventComponent&) = default;
};

enum class PatternKind { ObjAct, ObjActObj, ObjAttrCmpVal, ActObj, ActAttrCmpVal, Other };

/// Canonical names: obj-act, obj-act-obj, obj-attr-cmp-val, act-obj,
/// act-attr-cmp-val, other.
std::string_view to_string(PatternKind kind);
std::optional<PatternKind> pattern_kind_from_string(std::string_view name);

struct EventPattern {
  PatternKind kind = PatternKind::Other;
  // Present iff kind is one of the two attribute-comparison patterns.
  std::optional<Comparator> comparator;

  friend bool operator==(const EventPattern&, const EventPattern&) = default;
};

/// One element of a component sequence as seen by the pattern classifier.
using PatternToken = std::variant<ComponentKind, Comparator>;

/// Total classifier over component sequences: the five patterned shapes
/// map to their pattern, everything else to Other.
EventPattern classify_pattern(std::span<const PatternToken> tokens);

/// A natural-language event decomposed into typed components. When
/// `comparator` is set it sits between the last two components.
struct BasicEvent {
  std::string id;
  std::vector<EventComponent> components;
  std::optional<Comparator> comparator;
  EventPattern pattern;
  std::optional<std::string> raw_text;

  /// Builds an event and classifies its pattern from the components.
  static BasicEvent make(std::string id, std::vector<EventComponent> components,
                         std::optional<Comparator> comparator = std::nullopt,
                         std::optional<std::string> raw_text = std::nullopt);

  std::vector<PatternToken> pattern_tokens() const;

  /// Component texts joined with single spaces, or the raw text when the
  /// event has no components.
  std::string text() const;

  /// Same components and comparator; ids and raw text are ignored.
  bool same_body(const BasicEvent& other) const;

  friend bool operator==(const BasicEvent&, const BasicEvent&) = default;
};

struct TimestampVar {
  std::string name;

  friend bool operator==(const TimestampVar&, const TimestampVar&) = default;
};

bool is_identifier(std::string_view text);

struct Term {
  Rational coefficient;
  std::string var;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Sum of coefficient*variable terms plus a constant. Terms keep first-
/// mention order and never repeat a variable.
struct LinearExpr {
  std::vector<Term> terms;
  Rational constant{0};

  /// Adds coefficient*var, merging into an existing term for var.
  void add_term(const Rational& coefficient, const std::string& var);
  void add_constant(const Rational& value) { constant += value; }

  using Valuation = std::function<Rational(const std::string&)>;
  Rational evaluate(const Valuation& value_of) const;

  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;
};

struct TimeConstraint {
  LinearExpr lhs;
  Comparator cmp;
  LinearExpr rhs;

  bool holds(const LinearExpr::Valuation& value_of) const;
  std::vector<std::string> variables() const;

  friend bool operator==(const TimeConstraint&, const TimeConstraint&) = default;
};

bool compare(const Rational& lhs, Comparator cmp, const Rational& rhs);

struct EventAtom {
  std::shared_ptr<const BasicEvent> event;
  std::optional<std::string> timestamp;

  const std::string& id() const { return event->id; }

  friend bool operator==(const EventAtom& a, const EventAtom& b);
};

/// Immutable statement tree. Copies share structure.
class Statement {
public:
  enum class Kind { Not, And, Or, Implies, Event, Constraint };

  static Statement atom(EventAtom atom);
  static Statement atom(const BasicEvent& event, std::optional<std::string> timestamp = std::nullopt);
  static Statement constraint(TimeConstraint c);
  static Statement negation(Statement operand);
  static Statement conjunction(Statement lhs, Statement rhs);
  static Statement disjunction(Statement lhs, Statement rhs);
  static Statement implication(Statement lhs, Statement rhs);

  Kind kind() const;
  bool is_atom() const { return kind() == Kind::Event || kind() == Kind::Constraint; }

  /// Operand of Not.
  const Statement& operand() const;
  /// Children of And/Or/Implies.
  const Statement& lhs() const;
  const Statement& rhs() const;
  const EventAtom& event() const;
  const TimeConstraint& time_constraint() const;

  /// Number of nodes in the tree.
  std::size_t size() const;

  friend bool operator==(const Statement& a, const Statement& b);

private:
  struct Node;
  static Statement binary(Kind kind, Statement lhs, Statement rhs);
  explicit Statement(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Visits every event atom in left-to-right order.
void for_each_event(const Statement& s, const std::function<void(const EventAtom&)>& fn);
/// Visits every constraint atom in left-to-right order.
void for_each_constraint(const Statement& s, const std::function<void(const TimeConstraint&)>& fn);

/// Distinct event ids in first-occurrence order.
std::vector<std::string> event_ids(const Statement& s);
/// Distinct timestamp names (atom timestamps and constraint variables) in
/// first-occurrence order.
std::vector<std::string> timestamp_names(const Statement& s);

/// Rewrites every event atom through `fn`, keeping the rest of the tree.
Statement map_events(const Statement& s, const std::function<Statement(const EventAtom&)>& fn);

struct Rule {
  std::string id;
  RuleType type = RuleType::Shall;
  Statement statement;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Validated, immutable collection of rules with their event and timestamp
/// tables. Event and timestamp tables keep insertion order.
class RuleLibrary {
public:
  RuleLibrary() = default;

  /// Throws DanglingReference for an unresolved event id or timestamp and
  /// DuplicateId for repeated rule, event, or timestamp ids.
  RuleLibrary(std::vector<Rule> rules, std::vector<BasicEvent> events,
              std::vector<TimestampVar> timestamps);

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  const std::vector<BasicEvent>& events() const noexcept { return events_; }
  const std::vector<TimestampVar>& timestamps() const noexcept { return timestamps_; }

  const BasicEvent* find_event(std::string_view id) const;
  bool has_timestamp(std::string_view name) const;
  const Rule* find_rule(std::string_view id) const;

  bool empty() const noexcept { return rules_.empty(); }
  std::size_t size() const noexcept { return rules_.size(); }

  /// Library holding only the rules at `indices` (in the given order), with
  /// tables trimmed to what they reference.
  RuleLibrary subset(std::span<const std::size_t> indices) const;

  /// Builds a library from rules alone, deriving the tables from the
  /// statements in first-occurrence order.
  static RuleLibrary from_rules(std::vector<Rule> rules);

  /// Same rules and tables in the same order.
  friend bool operator==(const RuleLibrary& a, const RuleLibrary& b) {
    return a.rules_ == b.rules_ && a.events_ == b.events_ && a.timestamps_ == b.timestamps_;
  }

private:
  std::vector<Rule> rules_;
  std::vector<BasicEvent> events_;
  std::vector<TimestampVar> timestamps_;
  std::unordered_map<std::string, std::size_t> event_index_;
  std::unordered_map<std::string, std::size_t> timestamp_index_;
};

RuleLibrary new_library(std::vector<Rule> rules, std::vector<BasicEvent> events,
                        std::vector<TimestampVar> timestamps);

/// Boolean values for events plus non-negative reals for timestamps.
class QualInterpretation {
public:
  QualInterpretation() = default;
  QualInterpretation(std::map<std::string, bool> events, std::map<std::string, Rational> timestamps);

  void set_event(const std::string& id, bool value) { events_[id] = value; }
  void set_timestamp(const std::string& name, Rational value);

  const std::map<std::string, bool>& events() const noexcept { return events_; }
  const std::map<std::string, Rational>& timestamps() const noexcept { return timestamps_; }

  std::optional<bool> event(const std::string& id) const;
  std::optional<Rational> timestamp(const std::string& name) const;

  friend bool operator==(const QualInterpretation&, const QualInterpretation&) = default;

private:
  std::map<std::string, bool> events_;
  std::map<std::string, Rational> timestamps_;
};

/// Probabilities in [0,1] for events plus non-negative reals for timestamps.
class QuantInterpretation {
public:
  QuantInterpretation() = default;
  QuantInterpretation(std::map<std::string, double> events, std::map<std::string, Rational> timestamps);

  void set_event(const std::string& id, double probability);
  void set_timestamp(const std::string& name, Rational value);

  const std::map<std::string, double>& events() const noexcept { return events_; }
  const std::map<std::string, Rational>& timestamps() const noexcept { return timestamps_; }

  std::optional<double> event(const std::string& id) const;
  std::optional<Rational> timestamp(const std::string& name) const;

private:
  std::map<std::string, double> events_;
  std::map<std::string, Rational> timestamps_;
};

} // namespace horae
