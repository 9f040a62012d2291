#include "horae/abstraction.hpp"

#include "abstraction/text.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace horae::abstraction {

using nlohmann::json;

std::string_view to_string(Relation relation) {
  switch (relation) {
  case Relation::Equivalent: return "equivalent";
  case Relation::Negation: return "negation";
  case Relation::Unrelated: return "unrelated";
  }
  return "unrelated";
}

TableProvider::TableProvider(std::vector<PairJudgment> pairs) : pairs_(std::move(pairs)) {
  for (const auto& p : pairs_) {
    if (!(p.score >= 0.0 && p.score <= 1.0)) {
      throw InvalidArgument("judgment score outside [0,1] for " + p.a + ", " + p.b);
    }
    SimilarityJudgment j{p.relation, p.score};
    index_[{p.a, p.b}] = j;
    index_[{p.b, p.a}] = j;
  }
}

TableProvider TableProvider::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw InvalidArgument(std::string("judgment table is not valid JSON: ") + err.what());
  }
  if (!doc.is_array()) {
    throw InvalidArgument("judgment table must be a JSON array");
  }
  std::vector<PairJudgment> pairs;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& row = doc[i];
    auto where = "judgment " + std::to_string(i) + ": ";
    if (!row.is_object() || !row.contains("a") || !row.contains("b") || !row.contains("relation") ||
        !row["a"].is_string() || !row["b"].is_string() || !row["relation"].is_string()) {
      throw InvalidArgument(where + "expected {\"a\", \"b\", \"relation\", \"score\"}");
    }
    PairJudgment p;
    p.a = row["a"].get<std::string>();
    p.b = row["b"].get<std::string>();
    std::string rel = row["relation"].get<std::string>();
    if (rel == "equivalent") {
      p.relation = Relation::Equivalent;
    } else if (rel == "negation") {
      p.relation = Relation::Negation;
    } else {
      throw InvalidArgument(where + "unknown relation '" + rel + "'");
    }
    if (row.contains("score")) {
      if (!row["score"].is_number()) {
        throw InvalidArgument(where + "score must be a number");
      }
      p.score = row["score"].get<double>();
    }
    pairs.push_back(std::move(p));
  }
  return TableProvider(std::move(pairs));
}

TableProvider TableProvider::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgument("cannot read " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

SimilarityJudgment TableProvider::judge(const BasicEvent& a, const BasicEvent& b) const {
  auto it = index_.find({a.id, b.id});
  return it == index_.end() ? SimilarityJudgment{} : it->second;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("vectors of different dimension");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) {
    return 0.0;
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

EmbeddingProvider::EmbeddingProvider(EmbeddingConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) {
    throw InvalidArgument("embedding provider needs a base URL");
  }
}

std::vector<std::vector<double>> EmbeddingProvider::embed(const std::vector<std::string>& texts) const {
  // httplib rejects https outright when built without TLS.
  std::unique_ptr<httplib::Client> holder;
  try {
    holder = std::make_unique<httplib::Client>(config_.base_url);
  } catch (const std::invalid_argument&) {
  }
  if (!holder || !holder->is_valid()) {
    throw EmbeddingError("unsupported embedding URL " + config_.base_url + " (plain http only)");
  }
  httplib::Client& client = *holder;
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  if (!config_.token.empty()) {
    client.set_bearer_token_auth(config_.token);
  }
  json body = {{"texts", texts}};
  auto res = client.Post("/embed", body.dump(), "application/json");
  if (!res) {
    throw EmbeddingError("embedding request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw EmbeddingError("embedding service answered HTTP " + std::to_string(res->status));
  }
  try {
    json reply = json::parse(res->body);
    auto vectors = reply.at("vectors").get<std::vector<std::vector<double>>>();
    if (vectors.size() != texts.size()) {
      throw EmbeddingError("embedding service returned " + std::to_string(vectors.size()) +
                           " vectors for " + std::to_string(texts.size()) + " texts");
    }
    return vectors;
  } catch (const json::exception& err) {
    throw EmbeddingError(std::string("malformed embedding reply: ") + err.what());
  }
}

void EmbeddingProvider::prepare(const std::vector<BasicEvent>& events) const {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mutex_);
    for (const auto& e : events) {
      std::string text = event_text(e);
      if (!cache_.contains(text) &&
          std::find(missing.begin(), missing.end(), text) == missing.end()) {
        missing.push_back(text);
      }
    }
  }
  if (missing.empty()) {
    return;
  }
  auto vectors = embed(missing);
  std::lock_guard lock(mutex_);
  for (std::size_t k = 0; k < missing.size(); ++k) {
    cache_[missing[k]] = std::move(vectors[k]);
  }
}

std::vector<double> EmbeddingProvider::vector_for(const std::string& text) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(text); it != cache_.end()) {
      return it->second;
    }
  }
  auto vectors = embed({text});
  std::lock_guard lock(mutex_);
  return cache_[text] = std::move(vectors.front());
}

SimilarityJudgment EmbeddingProvider::judge(const BasicEvent& a, const BasicEvent& b) const {
  std::string ta = event_text(a);
  std::string tb = event_text(b);
  double score = cosine_similarity(vector_for(ta), vector_for(tb));
  bool same_parity = normalize(ta).negated == normalize(tb).negated;
  return {same_parity ? Relation::Equivalent : Relation::Negation, score};
}

} // namespace horae::abstraction
