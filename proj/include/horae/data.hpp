#pragma once

#include "horae/core.hpp"

#include <cstddef>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace horae::data {

inline constexpr std::size_t kMaxRelationEvents = 26;

/// Rule with its events, their relation, and one syntactic pattern per event.
struct ValidationRecord {
  std::string original_rule;
  std::vector<std::string> basic_events;
  std::string logical_relation;
  std::vector<std::string> syntactic_patterns;

  friend bool operator==(const ValidationRecord&, const ValidationRecord&) = default;
};

struct CompositeRecord {
  std::string original_rule;
  std::vector<std::string> basic_events;
  std::string logical_relation;

  friend bool operator==(const CompositeRecord&, const CompositeRecord&) = default;
};

struct SingleEventRecord {
  std::vector<std::string> basic_events;
  std::vector<std::string> syntactic_patterns;

  friend bool operator==(const SingleEventRecord&, const SingleEventRecord&) = default;
};

using Record = std::variant<ValidationRecord, CompositeRecord, SingleEventRecord>;

std::string_view shape_name(const Record& record);

/// Malformed record at position `index` of the dataset array.
class SchemaError : public Error {
public:
  SchemaError(std::size_t index, const std::string& reason);
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// Events and syntactic patterns differ in length.
class LengthMismatch : public SchemaError {
public:
  LengthMismatch(std::size_t index, std::size_t events, std::size_t patterns);
};

class RelationParseError : public Error {
public:
  RelationParseError(const std::string& message, std::size_t column);
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t column_;
};

class LetterOutOfRange : public Error {
public:
  LetterOutOfRange(char letter, std::size_t event_count);
  char letter() const noexcept { return letter_; }
  std::size_t event_count() const noexcept { return event_count_; }

private:
  char letter_;
  std::size_t event_count_;
};

/// Classifies each object of a JSON array by its key set. Unknown keys,
/// wrong value types, unparsable relations and out-of-range letters raise
/// SchemaError; unequal list lengths raise LengthMismatch.
std::vector<Record> load_dataset(std::string_view json_text);
std::vector<Record> load_dataset(std::istream& in);
std::vector<Record> load_dataset_file(const std::string& path);

/// JSON array using the dataset key names, pretty-printed with two spaces.
std::string serialize_dataset(const std::vector<Record>& records);

/// Parses a relation string over letters A-Z with the statement grammar's
/// connectives and precedence. Letter k stands for the k-th event; the
/// returned statement uses placeholder events whose ids are the letters.
Statement parse_relation(std::string_view relation, std::size_t event_count);

/// Replaces each placeholder letter with the matching event.
Statement bind_relation(const Statement& skeleton, const std::vector<BasicEvent>& events);

/// Pairwise similarity in [0,1].
using Similarity = std::function<double(const std::string&, const std::string&)>;

struct Match {
  std::size_t scope = 0;
  std::size_t generated = 0;
  std::size_t gold = 0;
  double score = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Best gold partner of each generated event, and vice versa.
  std::vector<Match> matched_pairs;
  std::vector<Match> recall_pairs;
  std::size_t generated_count = 0;
  std::size_t gold_count = 0;
  // Set when the corresponding denominator was zero and the score forced to 0.
  bool no_generated = false;
  bool no_gold = false;
};

/// Events of one rule: matching never crosses scopes.
struct EventScope {
  std::vector<std::string> generated;
  std::vector<std::string> gold;
};

/// Precision averages, over generated events, the similarity to the most
/// similar gold event of the same scope (ties to the lowest gold index,
/// reuse allowed); recall is the dual. A missing partner scores 0.
MetricsReport event_metrics(const std::vector<std::string>& generated,
                            const std::vector<std::string>& gold, const Similarity& sim = {});
MetricsReport scoped_event_metrics(const std::vector<EventScope>& scopes, const Similarity& sim = {});

/// Scopes from two datasets paired record by record. Throws InvalidArgument
/// when the datasets differ in length.
std::vector<EventScope> pair_scopes(const std::vector<Record>& generated,
                                    const std::vector<Record>& gold);

std::string metrics_to_json(const MetricsReport& report);

class UnevenRaterCounts : public Error {
public:
  using Error::Error;
};

class DegenerateAgreement : public Error {
public:
  using Error::Error;
};

/// Fleiss' kappa for an items x categories matrix of rater counts. Every
/// row must sum to the same n >= 2. Exactly 1 when every item is unanimous.
double fleiss_kappa(const std::vector<std::vector<unsigned>>& ratings);

} // namespace horae::data
