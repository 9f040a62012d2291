#include "horae/core.hpp"

#include <algorithm>
#include <cctype>

namespace horae {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

} // namespace

PartialInterpretation::PartialInterpretation(std::vector<std::string> missing)
    : Error([&] {
        std::string msg = "interpretation is missing:";
        for (const auto& m : missing) {
          msg += " " + m;
        }
        return msg;
      }()),
      missing_(std::move(missing)) {}

std::string_view to_string(RuleType type) {
  switch (type) {
  case RuleType::Shall: return "shall";
  case RuleType::Should: return "should";
  case RuleType::Forbid: return "forbid";
  }
  return "shall";
}

std::optional<RuleType> rule_type_from_string(std::string_view keyword) {
  if (keyword == "shall") return RuleType::Shall;
  if (keyword == "should") return RuleType::Should;
  if (keyword == "forbid") return RuleType::Forbid;
  return std::nullopt;
}

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
  case ComponentKind::Object: return "object";
  case ComponentKind::Action: return "action";
  case ComponentKind::Attribute: return "attribute";
  case ComponentKind::Value: return "value";
  }
  return "object";
}

std::optional<ComponentKind> component_kind_from_string(std::string_view keyword) {
  if (keyword == "object") return ComponentKind::Object;
  if (keyword == "action") return ComponentKind::Action;
  if (keyword == "attribute") return ComponentKind::Attribute;
  if (keyword == "value") return ComponentKind::Value;
  return std::nullopt;
}

std::string_view to_string(Comparator cmp) {
  switch (cmp) {
  case Comparator::Lt: return "<";
  case Comparator::Gt: return ">";
  case Comparator::Le: return "<=";
  case Comparator::Ge: return ">=";
  case Comparator::Eq: return "=";
  }
  return "=";
}

std::optional<Comparator> comparator_from_string(std::string_view text) {
  if (text == "<") return Comparator::Lt;
  if (text == ">") return Comparator::Gt;
  if (text == "<=" || text == "≤") return Comparator::Le;
  if (text == ">=" || text == "≥") return Comparator::Ge;
  if (text == "=") return Comparator::Eq;
  return std::nullopt;
}

std::string_view to_string(PatternKind kind) {
  switch (kind) {
  case PatternKind::ObjAct: return "obj-act";
  case PatternKind::ObjActObj: return "obj-act-obj";
  case PatternKind::ObjAttrCmpVal: return "obj-attr-cmp-val";
  case PatternKind::ActObj: return "act-obj";
  case PatternKind::ActAttrCmpVal: return "act-attr-cmp-val";
  case PatternKind::Other: return "other";
  }
  return "other";
}

std::optional<PatternKind> pattern_kind_from_string(std::string_view name) {
  std::string key = normalize_whitespace(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto kind : {PatternKind::ObjAct, PatternKind::ObjActObj, PatternKind::ObjAttrCmpVal,
                    PatternKind::ActObj, PatternKind::ActAttrCmpVal, PatternKind::Other}) {
    if (key == to_string(kind)) {
      return kind;
    }
  }
  return std::nullopt;
}

EventComponent EventComponent::make(ComponentKind kind, std::string_view text) {
  std::string normalized = normalize_whitespace(text);
  if (normalized.empty()) {
    throw InvalidArgument("event component text is empty");
  }
  return EventComponent{kind, std::move(normalized)};
}

BasicEvent BasicEvent::make(std::string id, std::vector<EventComponent> components,
                            std::optional<Comparator> comparator,
                            std::optional<std::string> raw_text) {
  if (comparator && components.size() < 2) {
    throw InvalidArgument("an event comparator needs components on both sides");
  }
  BasicEvent event{std::move(id), std::move(components), comparator, {}, std::move(raw_text)};
  auto tokens = event.pattern_tokens();
  event.pattern = classify_pattern(tokens);
  return event;
}

std::vector<PatternToken> BasicEvent::pattern_tokens() const {
  std::vector<PatternToken> tokens;
  tokens.reserve(components.size() + 1);
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (comparator && i + 1 == components.size()) {
      tokens.emplace_back(*comparator);
    }
    tokens.emplace_back(components[i].kind);
  }
  return tokens;
}

std::string BasicEvent::text() const {
  if (components.empty()) {
    return raw_text.value_or("");
  }
  std::string out;
  for (const auto& c : components) {
    if (!out.empty()) {
      out += ' ';
    }
    out += c.text;
  }
  return out;
}

bool BasicEvent::same_body(const BasicEvent& other) const {
  return components == other.components && comparator == other.comparator;
}

bool is_identifier(std::string_view text) {
  if (text.empty()) {
    return false;
  }
  auto head = static_cast<unsigned char>(text.front());
  if (!std::isalpha(head) && head != '_') {
    return false;
  }
  return std::all_of(text.begin() + 1, text.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

void LinearExpr::add_term(const Rational& coefficient, const std::string& var) {
  for (auto& t : terms) {
    if (t.var == var) {
      t.coefficient += coefficient;
      return;
    }
  }
  terms.push_back(Term{coefficient, var});
}

Rational LinearExpr::evaluate(const Valuation& value_of) const {
  Rational sum = constant;
  for (const auto& t : terms) {
    sum += t.coefficient * value_of(t.var);
  }
  return sum;
}

bool compare(const Rational& lhs, Comparator cmp, const Rational& rhs) {
  switch (cmp) {
  case Comparator::Lt: return lhs < rhs;
  case Comparator::Gt: return lhs > rhs;
  case Comparator::Le: return lhs <= rhs;
  case Comparator::Ge: return lhs >= rhs;
  case Comparator::Eq: return lhs == rhs;
  }
  return false;
}

bool TimeConstraint::holds(const LinearExpr::Valuation& value_of) const {
  return compare(lhs.evaluate(value_of), cmp, rhs.evaluate(value_of));
}

std::vector<std::string> TimeConstraint::variables() const {
  std::vector<std::string> vars;
  for (const auto* side : {&lhs, &rhs}) {
    for (const auto& t : side->terms) {
      if (std::find(vars.begin(), vars.end(), t.var) == vars.end()) {
        vars.push_back(t.var);
      }
    }
  }
  return vars;
}

bool operator==(const EventAtom& a, const EventAtom& b) {
  if (a.timestamp != b.timestamp) {
    return false;
  }
  if (a.event == b.event) {
    return true;
  }
  if (!a.event || !b.event) {
    return false;
  }
  return a.event->id == b.event->id && a.event->same_body(*b.event);
}

QualInterpretation::QualInterpretation(std::map<std::string, bool> events,
                                       std::map<std::string, Rational> timestamps)
    : events_(std::move(events)) {
  for (auto& [name, value] : timestamps) {
    set_timestamp(name, std::move(value));
  }
}

void QualInterpretation::set_timestamp(const std::string& name, Rational value) {
  if (value < 0) {
    throw InvalidInterpretation("timestamp " + name + " is negative");
  }
  timestamps_[name] = std::move(value);
}

std::optional<bool> QualInterpretation::event(const std::string& id) const {
  if (auto it = events_.find(id); it != events_.end()) {
    return it->second;
  }
  return std::nullopt;
}

std::optional<Rational> QualInterpretation::timestamp(const std::string& name) const {
  if (auto it = timestamps_.find(name); it != timestamps_.end()) {
    return it->second;
  }
  return std::nullopt;
}

QuantInterpretation::QuantInterpretation(std::map<std::string, double> events,
                                         std::map<std::string, Rational> timestamps) {
  for (const auto& [id, p] : events) {
    set_event(id, p);
  }
  for (auto& [name, value] : timestamps) {
    set_timestamp(name, std::move(value));
  }
}

void QuantInterpretation::set_event(const std::string& id, double probability) {
  // Written so that NaN fails the check as well.
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw InvalidInterpretation("probability of " + id + " is outside [0,1]");
  }
  events_[id] = probability;
}

void QuantInterpretation::set_timestamp(const std::string& name, Rational value) {
  if (value < 0) {
    throw InvalidInterpretation("timestamp " + name + " is negative");
  }
  timestamps_[name] = std::move(value);
}

std::optional<double> QuantInterpretation::event(const std::string& id) const {
  if (auto it = events_.find(id); it != events_.end()) {
    return it->second;
  }
  return std::nullopt;
}

std::optional<Rational> QuantInterpretation::timestamp(const std::string& name) const {
  if (auto it = timestamps_.find(name); it != timestamps_.end()) {
    return it->second;
  }
  return std::nullopt;
}

} // namespace horae
