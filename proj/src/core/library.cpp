#include "horae/core.hpp"

#include <set>

namespace horae {

RuleLibrary::RuleLibrary(std::vector<Rule> rules, std::vector<BasicEvent> events,
                         std::vector<TimestampVar> timestamps)
    : rules_(std::move(rules)), events_(std::move(events)), timestamps_(std::move(timestamps)) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (!event_index_.emplace(events_[i].id, i).second) {
      throw DuplicateId(events_[i].id);
    }
  }
  for (std::size_t i = 0; i < timestamps_.size(); ++i) {
    if (!is_identifier(timestamps_[i].name)) {
      throw InvalidArgument("timestamp name is not an identifier: " + timestamps_[i].name);
    }
    if (!timestamp_index_.emplace(timestamps_[i].name, i).second) {
      throw DuplicateId(timestamps_[i].name);
    }
  }
  std::set<std::string, std::less<>> rule_ids;
  for (const auto& rule : rules_) {
    if (!is_identifier(rule.id)) {
      throw InvalidArgument("rule id is not an identifier: " + rule.id);
    }
    if (!rule_ids.insert(rule.id).second) {
      throw DuplicateId(rule.id);
    }
    for_each_event(rule.statement, [&](const EventAtom& atom) {
      const BasicEvent* known = find_event(atom.id());
      if (known == nullptr) {
        throw DanglingReference(atom.id());
      }
      if (!known->same_body(*atom.event)) {
        throw DuplicateId(atom.id());
      }
    });
    for (const auto& name : timestamp_names(rule.statement)) {
      if (!has_timestamp(name)) {
        throw DanglingReference(name);
      }
    }
  }
}

const BasicEvent* RuleLibrary::find_event(std::string_view id) const {
  if (auto it = event_index_.find(std::string(id)); it != event_index_.end()) {
    return &events_[it->second];
  }
  return nullptr;
}

bool RuleLibrary::has_timestamp(std::string_view name) const {
  return timestamp_index_.contains(std::string(name));
}

const Rule* RuleLibrary::find_rule(std::string_view id) const {
  for (const auto& rule : rules_) {
    if (rule.id == id) {
      return &rule;
    }
  }
  return nullptr;
}

RuleLibrary RuleLibrary::subset(std::span<const std::size_t> indices) const {
  std::vector<Rule> picked;
  picked.reserve(indices.size());
  for (auto i : indices) {
    picked.push_back(rules_.at(i));
  }
  return from_rules(std::move(picked));
}

RuleLibrary RuleLibrary::from_rules(std::vector<Rule> rules) {
  std::vector<BasicEvent> events;
  std::vector<TimestampVar> timestamps;
  std::set<std::string> seen_events;
  std::set<std::string> seen_timestamps;
  for (const auto& rule : rules) {
    for_each_event(rule.statement, [&](const EventAtom& atom) {
      if (seen_events.insert(atom.id()).second) {
        events.push_back(*atom.event);
      }
    });
    for (auto& name : timestamp_names(rule.statement)) {
      if (seen_timestamps.insert(name).second) {
        timestamps.push_back(TimestampVar{name});
      }
    }
  }
  return RuleLibrary(std::move(rules), std::move(events), std::move(timestamps));
}

RuleLibrary new_library(std::vector<Rule> rules, std::vector<BasicEvent> events,
                        std::vector<TimestampVar> timestamps) {
  return RuleLibrary(std::move(rules), std::move(events), std::move(timestamps));
}

} // namespace horae
