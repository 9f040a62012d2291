#include "horae/pipeline.hpp"

#include "horae/data.hpp"
#include "horae/parser.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <future>

namespace horae::pipeline {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
    ++b;
  }
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
    --e;
  }
  return std::string(s.substr(b, e - b));
}

// "- x", "* x", "1. x", "2) x" -> "x"
std::string strip_bullet(const std::string& item) {
  std::size_t k = 0;
  if (item.starts_with("- ") || item.starts_with("* ")) {
    k = 2;
  } else {
    while (k < item.size() && std::isdigit(static_cast<unsigned char>(item[k]))) {
      ++k;
    }
    if (k == 0 || k + 1 >= item.size() || (item[k] != '.' && item[k] != ')') || item[k + 1] != ' ') {
      return item;
    }
    k += 2;
  }
  return trim(std::string_view(item).substr(k));
}

std::string letter(std::size_t k) { return std::string(1, static_cast<char>('A' + k)); }

} // namespace

std::string_view to_string(RuleTypeSource source) {
  return source == RuleTypeSource::BackendProvided ? "backend" : "keyword-heuristic";
}

std::string event_extraction_prompt(std::string_view rule_text) {
  return "Please extract basic events of the following rule: " + std::string(rule_text);
}

std::string logic_extraction_prompt(std::string_view rule_text, const std::vector<std::string>& events) {
  std::string list;
  for (std::size_t k = 0; k < events.size(); ++k) {
    list += (k ? "; " : "") + letter(k) + ": " + events[k];
  }
  return "Given the rule " + std::string(rule_text) + " with basic events " + list +
         ", provide the logical relation between these basic events";
}

std::string pattern_matching_prompt(std::string_view event) {
  return "Please determine the syntactic pattern of the basic event: " + std::string(event);
}

std::vector<std::string> extract_events(std::string_view rule_text, const TransformerBackend& backend) {
  if (trim(rule_text).empty()) {
    throw InvalidArgument("rule text is empty");
  }
  std::string response = backend.complete({Phase::EventExtraction, event_extraction_prompt(rule_text)});
  std::vector<std::string> events;
  std::string item;
  auto flush = [&] {
    std::string cleaned = strip_bullet(trim(item));
    if (!cleaned.empty()) {
      events.push_back(cleaned);
    }
    item.clear();
  };
  for (char c : response) {
    if (c == '\n' || c == ';') {
      flush();
    } else {
      item += c;
    }
  }
  flush();
  if (events.empty()) {
    throw EmptyExtraction("no basic events in the backend response");
  }
  return events;
}

LogicResponse extract_logic(std::string_view rule_text, const std::vector<std::string>& events,
                            const TransformerBackend& backend) {
  if (events.empty()) {
    throw InvalidArgument("logic extraction needs at least one event");
  }
  std::string response =
      trim(backend.complete({Phase::LogicExtraction, logic_extraction_prompt(rule_text, events)}));
  LogicResponse out;
  std::size_t space = response.find_first_of(" \t(");
  std::string head = response.substr(0, space);
  std::transform(head.begin(), head.end(), head.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (auto type = rule_type_from_string(head); type && space != std::string::npos) {
    out.rule_type = type;
    response = trim(std::string_view(response).substr(space));
  }
  data::parse_relation(response, events.size());
  out.relation = response;
  return out;
}

std::vector<PatternLabel> match_patterns(const std::vector<std::string>& events,
                                         const TransformerBackend& backend, std::size_t concurrency) {
  if (events.empty()) {
    throw InvalidArgument("pattern matching needs at least one event");
  }
  std::vector<PatternLabel> labels(events.size());
  auto label_one = [&](std::size_t k) {
    std::string answer = trim(backend.complete({Phase::PatternMatching, pattern_matching_prompt(events[k])}));
    while (!answer.empty() && (answer.back() == '.' || answer.back() == '"')) {
      answer.pop_back();
    }
    if (!answer.empty() && answer.front() == '"') {
      answer.erase(0, 1);
    }
    if (auto kind = pattern_kind_from_string(answer)) {
      labels[k] = PatternLabel{*kind, std::nullopt};
    } else {
      labels[k] = PatternLabel{PatternKind::Other,
                               "unknown pattern '" + answer + "' for '" + events[k] + "', using other"};
    }
  };
  std::size_t workers = std::clamp<std::size_t>(concurrency, 1, events.size());
  // Each worker takes every `workers`-th event; results land by index.
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async, [&, w] {
      for (std::size_t k = w; k < events.size(); k += workers) {
        label_one(k);
      }
    }));
  }
  for (auto& job : jobs) {
    job.get();
  }
  return labels;
}

ConversionResult convert(std::string_view rule_text, const TransformerBackend& backend,
                         const ConvertOptions& options) {
  std::string text = trim(rule_text);
  std::vector<std::string> texts = extract_events(text, backend);
  if (texts.size() > data::kMaxRelationEvents) {
    throw AssemblyError("more than 26 basic events extracted");
  }
  LogicResponse logic = extract_logic(text, texts, backend);
  std::vector<PatternLabel> labels = match_patterns(texts, backend, options.concurrency);

  std::vector<std::string> warnings;
  Statement skeleton = data::parse_relation(logic.relation, texts.size());
  std::vector<std::string> used = event_ids(skeleton);
  for (std::size_t k = 0; k < texts.size(); ++k) {
    if (std::find(used.begin(), used.end(), letter(k)) == used.end()) {
      throw AssemblyError("relation '" + logic.relation + "' does not mention event " + letter(k));
    }
  }

  std::vector<PatternKind> kinds;
  std::vector<BasicEvent> events;
  for (std::size_t k = 0; k < texts.size(); ++k) {
    if (labels[k].warning) {
      warnings.push_back(*labels[k].warning);
    }
    kinds.push_back(labels[k].kind);
    events.push_back(componentize(letter(k), texts[k], labels[k].kind, warnings));
    for (std::size_t j = 0; j < k; ++j) {
      if (events[j].same_body(events[k])) {
        warnings.push_back("events " + letter(j) + " and " + letter(k) + " are identical");
      }
    }
  }

  RuleType type = RuleType::Shall;
  RuleTypeSource source = RuleTypeSource::KeywordHeuristic;
  if (logic.rule_type) {
    type = *logic.rule_type;
    source = RuleTypeSource::BackendProvided;
  } else if (auto guess = detect_rule_type(text)) {
    type = *guess;
  } else {
    warnings.push_back("no rule type keyword found, assuming shall");
  }

  Statement statement = data::bind_relation(skeleton, events);
  std::string assembled = std::string(horae::to_string(type)) + " " + parser::print_statement(statement);
  std::optional<Rule> rule;
  try {
    rule = parser::parse_rule(assembled);
  } catch (const parser::ParseError& err) {
    throw AssemblyError("assembled rule does not parse: " + std::string(err.what()) + "\n" + assembled);
  }
  rule->id = options.rule_id;

  // Report events in list order with the ids the parser gave them.
  std::vector<BasicEvent> parsed;
  for_each_event(rule->statement, [&](const EventAtom& atom) {
    if (std::none_of(parsed.begin(), parsed.end(), [&](const auto& e) { return e.id == atom.id(); })) {
      parsed.push_back(*atom.event);
    }
  });
  ConversionResult result{*rule, {}, logic.relation, kinds, {}, source, warnings, texts};
  for (const auto& e : events) {
    auto it = std::find_if(parsed.begin(), parsed.end(), [&](const auto& p) { return p.same_body(e); });
    result.events.push_back(*it);
    result.patterns.push_back(it->pattern);
  }
  return result;
}

std::string conversion_to_json(const ConversionResult& result) {
  nlohmann::json events = nlohmann::json::array();
  for (std::size_t k = 0; k < result.events.size(); ++k) {
    const auto& e = result.events[k];
    events.push_back({{"id", e.id},
                      {"letter", letter(k)},
                      {"text", e.text()},
                      {"extracted", result.extracted[k]},
                      {"label", to_string(result.labels[k])},
                      {"pattern", to_string(result.patterns[k].kind)}});
  }
  nlohmann::json doc = {{"id", result.rule.id},
                        {"type", horae::to_string(result.rule.type)},
                        {"rule", parser::print_rule(result.rule)},
                        {"relation", result.relation},
                        {"rule_type_source", to_string(result.rule_type_source)},
                        {"events", events},
                        {"warnings", result.warnings}};
  return doc.dump(2) + "\n";
}

} // namespace horae::pipeline
