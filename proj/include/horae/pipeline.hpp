#pragma once

#include "horae/core.hpp"

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace horae::pipeline {

enum class Phase { EventExtraction, LogicExtraction, PatternMatching };

std::string_view to_string(Phase phase);

struct BackendRequest {
  Phase phase = Phase::EventExtraction;
  std::string prompt;
};

class BackendError : public Error {
public:
  using Error::Error;
};

class EmptyExtraction : public Error {
public:
  using Error::Error;
};

/// The assembled rule text did not parse, or the relation does not use
/// every extracted event exactly as listed.
class AssemblyError : public Error {
public:
  using Error::Error;
};

/// Answers one prompt. Implementations must be safe to call concurrently.
class TransformerBackend {
public:
  virtual ~TransformerBackend() = default;
  virtual std::string complete(const BackendRequest& request) const = 0;
};

/// Whitespace runs collapsed to one space, ends trimmed.
std::string normalize_prompt(std::string_view prompt);

/// Looks responses up by normalized prompt.
class MockBackend final : public TransformerBackend {
public:
  explicit MockBackend(std::map<std::string, std::string> responses);

  /// Reads a JSON object mapping prompts to response texts.
  static MockBackend from_json(std::string_view text);
  static MockBackend from_file(const std::string& path);

  std::string complete(const BackendRequest& request) const override;

private:
  std::map<std::string, std::string> responses_;
};

struct HttpBackendConfig {
  std::string base_url;  // http://host[:port]
  std::string token;
  std::chrono::milliseconds timeout{30000};
  int retries = 3;
  std::chrono::milliseconds initial_backoff{250};

  /// HORAE_BACKEND_URL, HORAE_BACKEND_TOKEN and HORAE_BACKEND_TIMEOUT_MS.
  static HttpBackendConfig from_env();
};

/// `POST {base}/v1/complete` with `{"prompt": ...}`, answered by
/// `{"text": ...}`. Transport failures, 429 and 5xx are retried with
/// doubling backoff; other statuses fail at once.
class HttpBackend final : public TransformerBackend {
public:
  explicit HttpBackend(HttpBackendConfig config);
  std::string complete(const BackendRequest& request) const override;

private:
  HttpBackendConfig config_;
};

inline constexpr std::size_t kDefaultConcurrency = 4;

/// HORAE_CONCURRENCY when set to a positive integer, else the default.
std::size_t concurrency_from_env();

std::string event_extraction_prompt(std::string_view rule_text);
/// Events are labelled `A: first; B: second; ...`.
std::string logic_extraction_prompt(std::string_view rule_text, const std::vector<std::string>& events);
std::string pattern_matching_prompt(std::string_view event);

/// Splits the response on newlines and semicolons, trims items, strips
/// list bullets, and drops empty items. Throws EmptyExtraction when nothing
/// is left.
std::vector<std::string> extract_events(std::string_view rule_text, const TransformerBackend& backend);

struct LogicResponse {
  std::string relation;
  // Set when the backend prefixed the relation with a rule type keyword.
  std::optional<RuleType> rule_type;
};

/// Validates the relation with data::parse_relation.
LogicResponse extract_logic(std::string_view rule_text, const std::vector<std::string>& events,
                            const TransformerBackend& backend);

struct PatternLabel {
  PatternKind kind = PatternKind::Other;
  std::optional<std::string> warning;
};

/// One request per event, up to `concurrency` in flight; results keep the
/// input order. Unknown names map to Other with a warning.
std::vector<PatternLabel> match_patterns(const std::vector<std::string>& events,
                                         const TransformerBackend& backend,
                                         std::size_t concurrency = kDefaultConcurrency);

/// Keyword guess: forbid markers win over should markers, which win over
/// shall markers. Comparator phrases such as "not exceed" are ignored.
std::optional<RuleType> detect_rule_type(std::string_view rule_text);

struct ComparatorPhrase {
  Comparator comparator;
  std::size_t begin = 0;         // first leading auxiliary ("shall")
  std::size_t phrase_begin = 0;  // first word of the phrase proper ("not")
  std::size_t end = 0;
};

/// Lowercase word tokens used by the heuristics.
std::vector<std::string> words(std::string_view text);

/// Leftmost comparator phrase in `tokens`, e.g. "shall not exceed" (<=).
std::optional<ComparatorPhrase> find_comparator(const std::vector<std::string>& tokens);

/// Splits plain event text into components for the given pattern. Guessed
/// or failed splits append a warning; a failed split keeps the whole text
/// as a single value component.
BasicEvent componentize(const std::string& id, const std::string& text, PatternKind label,
                        std::vector<std::string>& warnings);

enum class RuleTypeSource { KeywordHeuristic, BackendProvided };

std::string_view to_string(RuleTypeSource source);

struct ConversionResult {
  Rule rule;
  std::vector<BasicEvent> events;
  std::string relation;
  std::vector<PatternKind> labels;     // as answered by the backend
  std::vector<EventPattern> patterns;  // of the componentized events
  RuleTypeSource rule_type_source = RuleTypeSource::KeywordHeuristic;
  std::vector<std::string> warnings;
  std::vector<std::string> extracted;  // event texts as the backend returned them

  friend bool operator==(const ConversionResult&, const ConversionResult&) = default;
};

struct ConvertOptions {
  std::size_t concurrency = kDefaultConcurrency;
  std::string rule_id = "r1";
};

/// Runs the three phases, assembles `type statement` text, and parses it
/// back so the result is always grammar-valid.
ConversionResult convert(std::string_view rule_text, const TransformerBackend& backend,
                         const ConvertOptions& options = {});

std::string conversion_to_json(const ConversionResult& result);

} // namespace horae::pipeline
