#include "horae/abstraction.hpp"
#include "horae/data.hpp"
#include "horae/rational.hpp"

#include <json.hpp>

namespace horae::data {

namespace {

// Best partner in `to` for each entry of `from`; ties keep the lowest index.
double best_matches(std::size_t scope, const std::vector<std::string>& from,
                    const std::vector<std::string>& to, const Similarity& sim, bool reversed,
                    std::vector<Match>& out) {
  double total = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (to.empty()) {
      continue;
    }
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t j = 0; j < to.size(); ++j) {
      double s = reversed ? sim(to[j], from[i]) : sim(from[i], to[j]);
      if (!(s >= 0.0 && s <= 1.0)) {
        throw InvalidArgument("similarity outside [0,1]");
      }
      if (s > best_score) {
        best = j;
        best_score = s;
      }
    }
    total += best_score;
    out.push_back(reversed ? Match{scope, best, i, best_score} : Match{scope, i, best, best_score});
  }
  return total;
}

std::vector<std::string> events_of(const Record& r) {
  return std::visit([](const auto& x) { return x.basic_events; }, r);
}

} // namespace

MetricsReport scoped_event_metrics(const std::vector<EventScope>& scopes, const Similarity& sim) {
  Similarity score = sim ? sim : Similarity([](const std::string& a, const std::string& b) {
    return abstraction::lexical_similarity(a, b);
  });
  MetricsReport r;
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  for (std::size_t k = 0; k < scopes.size(); ++k) {
    const auto& s = scopes[k];
    r.generated_count += s.generated.size();
    r.gold_count += s.gold.size();
    precision_sum += best_matches(k, s.generated, s.gold, score, false, r.matched_pairs);
    recall_sum += best_matches(k, s.gold, s.generated, score, true, r.recall_pairs);
  }
  r.no_generated = r.generated_count == 0;
  r.no_gold = r.gold_count == 0;
  r.precision = r.no_generated ? 0.0 : precision_sum / static_cast<double>(r.generated_count);
  r.recall = r.no_gold ? 0.0 : recall_sum / static_cast<double>(r.gold_count);
  double pr = r.precision + r.recall;
  r.f1 = pr > 0.0 ? 2.0 * r.precision * r.recall / pr : 0.0;
  return r;
}

MetricsReport event_metrics(const std::vector<std::string>& generated,
                            const std::vector<std::string>& gold, const Similarity& sim) {
  return scoped_event_metrics({EventScope{generated, gold}}, sim);
}

std::vector<EventScope> pair_scopes(const std::vector<Record>& generated,
                                    const std::vector<Record>& gold) {
  if (generated.size() != gold.size()) {
    throw InvalidArgument("datasets hold " + std::to_string(generated.size()) + " and " +
                          std::to_string(gold.size()) + " records");
  }
  std::vector<EventScope> scopes;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    scopes.push_back(EventScope{events_of(generated[k]), events_of(gold[k])});
  }
  return scopes;
}

std::string metrics_to_json(const MetricsReport& report) {
  auto pairs = [](const std::vector<Match>& matches) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& m : matches) {
      out.push_back({{"scope", m.scope}, {"generated", m.generated}, {"gold", m.gold}, {"score", m.score}});
    }
    return out;
  };
  nlohmann::json doc = {{"precision", report.precision},
                        {"recall", report.recall},
                        {"f1", report.f1},
                        {"generated_count", report.generated_count},
                        {"gold_count", report.gold_count},
                        {"no_generated", report.no_generated},
                        {"no_gold", report.no_gold},
                        {"matched_pairs", pairs(report.matched_pairs)},
                        {"recall_pairs", pairs(report.recall_pairs)}};
  return doc.dump(2) + "\n";
}

double fleiss_kappa(const std::vector<std::vector<unsigned>>& ratings) {
  if (ratings.empty() || ratings.front().empty()) {
    throw InvalidArgument("fleiss_kappa needs at least one item and one category");
  }
  const std::size_t categories = ratings.front().size();
  unsigned long long n = 0;
  for (unsigned c : ratings.front()) {
    n += c;
  }
  if (n < 2) {
    throw InvalidArgument("fleiss_kappa needs at least two raters per item");
  }
  const auto items = static_cast<long long>(ratings.size());
  std::vector<unsigned long long> column(categories, 0);
  // Computed exactly so unanimous data gives exactly 1.
  Rational observed = 0;
  bool unanimous = true;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const auto& row = ratings[i];
    if (row.size() != categories) {
      throw InvalidArgument("row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                            " categories, expected " + std::to_string(categories));
    }
    unsigned long long sum = 0;
    unsigned long long squares = 0;
    for (std::size_t j = 0; j < categories; ++j) {
      sum += row[j];
      squares += static_cast<unsigned long long>(row[j]) * row[j];
      column[j] += row[j];
    }
    if (sum != n) {
      throw UnevenRaterCounts("row " + std::to_string(i) + " has " + std::to_string(sum) +
                              " ratings, expected " + std::to_string(n));
    }
    unanimous = unanimous && squares == n * n;
    observed += Rational(static_cast<long long>(squares - n), static_cast<long long>(n * (n - 1)));
  }
  if (unanimous) {
    return 1.0;
  }
  observed /= items;
  Rational expected = 0;
  for (unsigned long long c : column) {
    Rational p(static_cast<long long>(c), items * static_cast<long long>(n));
    expected += p * p;
  }
  if (expected == 1) {
    // All ratings share one category, which forces unanimity above.
    throw DegenerateAgreement("chance agreement is 1");
  }
  return rational_to_double((observed - expected) / (1 - expected));
}

} // namespace horae::data
