#include "horae/abstraction.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <numeric>

namespace horae::abstraction {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    out += (k ? sep : "") + items[k];
  }
  return out;
}

// Union-find where each node stores its parity relative to its parent:
// 0 for "same proposition", 1 for "negation of".
class ParityUnionFind {
public:
  explicit ParityUnionFind(std::size_t n) : parent_(n), parity_(n, 0), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  // Root of x and the parity of x relative to it; compresses the path.
  std::pair<std::size_t, int> find(std::size_t x) {
    if (parent_[x] == x) {
      return {x, 0};
    }
    auto [root, p] = find(parent_[x]);
    parity_[x] ^= p;
    parent_[x] = root;
    return {root, parity_[x]};
  }

  // Records x ^ y == parity. Returns false if that contradicts what is
  // already known.
  bool unite(std::size_t x, std::size_t y, int parity) {
    auto [rx, px] = find(x);
    auto [ry, py] = find(y);
    if (rx == ry) {
      return (px ^ py) == parity;
    }
    if (size_[rx] < size_[ry]) {
      std::swap(rx, ry);
    }
    parent_[ry] = rx;
    parity_[ry] = px ^ py ^ parity;
    size_[rx] += size_[ry];
    return true;
  }

private:
  std::vector<std::size_t> parent_;
  std::vector<int> parity_;
  std::vector<std::size_t> size_;
};

struct Edge {
  std::size_t to;
  int parity;
};

// Path from `from` to `to` over accepted edges, as event indices.
std::vector<std::size_t> bfs_path(const std::vector<std::vector<Edge>>& graph, std::size_t from,
                                  std::size_t to) {
  std::vector<std::size_t> prev(graph.size(), graph.size());
  std::deque<std::size_t> queue{from};
  prev[from] = from;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    if (u == to) {
      break;
    }
    for (const auto& e : graph[u]) {
      if (prev[e.to] == graph.size()) {
        prev[e.to] = u;
        queue.push_back(e.to);
      }
    }
  }
  std::vector<std::size_t> path;
  for (std::size_t v = to; v != from; v = prev[v]) {
    path.push_back(v);
  }
  path.push_back(from);
  std::reverse(path.begin(), path.end());
  return path;
}

struct Candidate {
  std::size_t a;
  std::size_t b;
  SimilarityJudgment judgment;
};

} // namespace

PolarityConflict::PolarityConflict(std::string a, std::string b, std::vector<std::string> cycle)
    : Error("polarity conflict between " + a + " and " + b + ": " + join(cycle, " - ")),
      a_(std::move(a)),
      b_(std::move(b)),
      cycle_(std::move(cycle)) {}

IncompleteAbstraction::IncompleteAbstraction(std::vector<std::string> missing)
    : Error("abstraction does not cover: " + join(missing, ", ")), missing_(std::move(missing)) {}

std::vector<std::string> AbstractionResult::members(std::size_t class_id) const {
  std::vector<std::string> out;
  for (const auto& [id, ref] : class_of) {
    if (ref.class_id == class_id) {
      out.push_back(id);
    }
  }
  return out;
}

AbstractionResult identity_abstraction(const RuleLibrary& lib) {
  AbstractionResult r;
  for (const auto& e : lib.events()) {
    r.class_of[e.id] = ClassRef{r.representatives.size(), 1};
    r.representatives.push_back(e.id);
  }
  return r;
}

AbstractionResult abstract_events(const RuleLibrary& lib, const SimilarityProvider& provider,
                                  double threshold, std::size_t concurrency) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("threshold must lie in [0,1]");
  }
  const auto& events = lib.events();
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return events[x].id < events[y].id; });

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      candidates.push_back(Candidate{order[i], order[j], {}});
    }
  }

  provider.prepare(events);
  auto judge_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      auto& c = candidates[k];
      c.judgment = provider.judge(events[c.a], events[c.b]);
    }
  };
  std::size_t workers = std::clamp<std::size_t>(concurrency, 1, std::max<std::size_t>(1, candidates.size()));
  if (workers == 1) {
    judge_range(0, candidates.size());
  } else {
    std::vector<std::future<void>> jobs;
    std::size_t chunk = (candidates.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < candidates.size(); begin += chunk) {
      jobs.push_back(std::async(std::launch::async, judge_range, begin,
                                std::min(candidates.size(), begin + chunk)));
    }
    for (auto& job : jobs) {
      job.get();
    }
  }

  ParityUnionFind uf(events.size());
  std::vector<std::vector<Edge>> graph(events.size());
  for (const auto& c : candidates) {
    const auto& j = c.judgment;
    if (j.relation == Relation::Unrelated || j.score < threshold) {
      continue;
    }
    int parity = j.relation == Relation::Negation ? 1 : 0;
    if (!uf.unite(c.a, c.b, parity)) {
      // The accepted path b ~> a closes an odd cycle with this edge.
      std::vector<std::string> cycle{events[c.a].id};
      for (std::size_t v : bfs_path(graph, c.b, c.a)) {
        cycle.push_back(events[v].id);
      }
      throw PolarityConflict(events[c.a].id, events[c.b].id, std::move(cycle));
    }
    graph[c.a].push_back(Edge{c.b, parity});
    graph[c.b].push_back(Edge{c.a, parity});
  }

  AbstractionResult result;
  std::vector<std::size_t> class_of_root(events.size(), events.size());
  std::vector<int> representative_parity;
  for (std::size_t k = 0; k < events.size(); ++k) {
    auto [root, parity] = uf.find(k);
    if (class_of_root[root] == events.size()) {
      class_of_root[root] = result.representatives.size();
      result.representatives.push_back(events[k].id);
      representative_parity.push_back(parity);
    }
    std::size_t cls = class_of_root[root];
    int relative = parity ^ representative_parity[cls];
    result.class_of[events[k].id] = ClassRef{cls, relative ? -1 : 1};
  }
  return result;
}

RuleLibrary apply_abstraction(const RuleLibrary& lib, const AbstractionResult& a) {
  std::vector<std::string> missing;
  for (const auto& e : lib.events()) {
    if (!a.class_of.contains(e.id)) {
      missing.push_back(e.id);
    }
  }
  if (!missing.empty()) {
    throw IncompleteAbstraction(std::move(missing));
  }
  std::map<std::string, bool> is_representative;
  for (const auto& rep : a.representatives) {
    if (!lib.find_event(rep)) {
      throw IncompleteAbstraction({rep});
    }
    is_representative[rep] = true;
  }
  std::vector<Rule> rules;
  for (const auto& rule : lib.rules()) {
    Statement s = map_events(rule.statement, [&](const EventAtom& atom) {
      const ClassRef& ref = a.class_of.at(atom.id());
      const BasicEvent& rep = *lib.find_event(a.representatives.at(ref.class_id));
      Statement replaced = rep.id == atom.id() ? Statement::atom(atom)
                                                : Statement::atom(rep, atom.timestamp);
      return ref.polarity > 0 ? replaced : Statement::negation(replaced);
    });
    rules.push_back(Rule{rule.id, rule.type, s});
  }
  std::vector<BasicEvent> events;
  for (const auto& e : lib.events()) {
    if (is_representative.contains(e.id)) {
      events.push_back(e);
    }
  }
  return RuleLibrary(std::move(rules), std::move(events), lib.timestamps());
}

} // namespace horae::abstraction
