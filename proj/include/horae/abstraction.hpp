#pragma once

#include "horae/core.hpp"

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace horae::abstraction {

enum class Relation { Equivalent, Negation, Unrelated };

std::string_view to_string(Relation relation);

struct SimilarityJudgment {
  Relation relation = Relation::Unrelated;
  double score = 0.0;  // in [0,1]

  friend bool operator==(const SimilarityJudgment&, const SimilarityJudgment&) = default;
};

/// Judges whether two events say the same thing or opposite things.
/// Implementations must be deterministic, thread-safe, and symmetric in
/// the relation they report.
class SimilarityProvider {
public:
  virtual ~SimilarityProvider() = default;
  virtual SimilarityJudgment judge(const BasicEvent& a, const BasicEvent& b) const = 0;

  /// Called once with every event before judging starts, so providers
  /// backed by a remote service can batch their requests.
  virtual void prepare(const std::vector<BasicEvent>& /*events*/) const {}
};

/// Token-overlap heuristic; see lexical_judge.
class LexicalProvider final : public SimilarityProvider {
public:
  SimilarityJudgment judge(const BasicEvent& a, const BasicEvent& b) const override;
};

/// One row of a table-driven provider file.
struct PairJudgment {
  std::string a;
  std::string b;
  Relation relation = Relation::Equivalent;
  double score = 1.0;
};

/// Answers from an explicit list of event-id pairs; unlisted pairs are
/// Unrelated with score 0.
class TableProvider final : public SimilarityProvider {
public:
  explicit TableProvider(std::vector<PairJudgment> pairs);

  /// Parses `[{"a": id, "b": id, "relation": "equivalent"|"negation",
  /// "score": x}, ...]`. Throws InvalidArgument on malformed input.
  static TableProvider from_json(std::string_view text);
  static TableProvider from_file(const std::string& path);

  SimilarityJudgment judge(const BasicEvent& a, const BasicEvent& b) const override;
  const std::vector<PairJudgment>& pairs() const noexcept { return pairs_; }

private:
  std::vector<PairJudgment> pairs_;
  std::map<std::pair<std::string, std::string>, SimilarityJudgment> index_;
};

struct EmbeddingConfig {
  std::string base_url;  // scheme://host[:port]
  std::string token;     // bearer token, optional
  std::chrono::milliseconds timeout{30000};
};

/// Raised when the embedding service cannot be reached or answers with
/// something other than one vector per text.
class EmbeddingError : public Error {
public:
  using Error::Error;
};

/// Cosine similarity of vectors from `POST {base}/embed`. The relation is
/// Equivalent when the events carry the same negation-marker parity and
/// Negation otherwise.
class EmbeddingProvider final : public SimilarityProvider {
public:
  explicit EmbeddingProvider(EmbeddingConfig config);

  void prepare(const std::vector<BasicEvent>& events) const override;
  SimilarityJudgment judge(const BasicEvent& a, const BasicEvent& b) const override;

  /// Embeds `texts` in one request.
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) const;

private:
  std::vector<double> vector_for(const std::string& text) const;

  EmbeddingConfig config_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::vector<double>> cache_;
};

/// Cosine similarity clamped to [0,1]; 0 when either vector is zero.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// Text of an event as seen by the similarity heuristics: its components
/// joined, or its raw text when it has none.
std::string event_text(const BasicEvent& e);

/// Jaccard overlap of normalized tokens (lowercase, stopwords and negation
/// markers removed, antonyms folded). CJK runs count as character bigrams.
double lexical_similarity(std::string_view a, std::string_view b);

/// Equivalent when the normalized token sets coincide and the negation
/// parities agree, Negation when the sets coincide and the parities differ,
/// Unrelated otherwise. The score is the Jaccard overlap.
SimilarityJudgment lexical_judge(const BasicEvent& a, const BasicEvent& b);

struct ClassRef {
  std::size_t class_id = 0;
  int polarity = 1;  // +1 or -1 relative to the class representative

  friend bool operator==(const ClassRef&, const ClassRef&) = default;
};

/// Signed partition of events into proposition classes.
struct AbstractionResult {
  std::map<std::string, ClassRef> class_of;
  // Representative event id per class id; every representative has
  // polarity +1.
  std::vector<std::string> representatives;

  std::size_t class_count() const noexcept { return representatives.size(); }
  /// Event ids of one class, sorted.
  std::vector<std::string> members(std::size_t class_id) const;

  friend bool operator==(const AbstractionResult&, const AbstractionResult&) = default;
};

inline constexpr double kDefaultThreshold = 0.85;

/// Accepted judgments imply an event equals its own negation. `cycle` lists
/// the events around the offending loop, starting and ending at `a`.
class PolarityConflict : public Error {
public:
  PolarityConflict(std::string a, std::string b, std::vector<std::string> cycle);
  const std::string& event_a() const noexcept { return a_; }
  const std::string& event_b() const noexcept { return b_; }
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
  std::string a_;
  std::string b_;
  std::vector<std::string> cycle_;
};

class IncompleteAbstraction : public Error {
public:
  explicit IncompleteAbstraction(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
  std::vector<std::string> missing_;
};

/// Every event in its own class with polarity +1.
AbstractionResult identity_abstraction(const RuleLibrary& lib);

/// Consults the provider on every unordered event pair (in lexicographic
/// id order) and merges pairs judged Equivalent or Negation with score at
/// least `threshold`. Class ids follow the library's event-table order.
/// Up to `concurrency` judgments run in parallel.
AbstractionResult abstract_events(const RuleLibrary& lib, const SimilarityProvider& provider,
                                  double threshold = kDefaultThreshold,
                                  std::size_t concurrency = 1);

/// Rewrites each event atom to its class representative, negated when the
/// event has polarity -1. Atoms keep their own timestamps.
RuleLibrary apply_abstraction(const RuleLibrary& lib, const AbstractionResult& a);

} // namespace horae::abstraction
