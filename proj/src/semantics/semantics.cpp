#include "horae/semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>

namespace horae::semantics {

namespace {

// ---------------------------------------------------------------------------
// Statements compiled against an interpretation: constraint atoms become
// constants and events become indices into a local variable list.

enum class Op { Const, Var, Not, And, Or, Implies };

struct CNode {
  Op op;
  bool value = false;     // Const
  std::size_t var = 0;    // Var
  std::size_t lhs = 0;    // Not, And, Or, Implies
  std::size_t rhs = 0;    // And, Or, Implies
  std::vector<std::size_t> vars;  // sorted distinct variables below this node
};

struct Compiled {
  std::vector<CNode> nodes;
  std::vector<std::string> events;
  std::size_t root = 0;
};

template <class TimestampLookup>
Compiled compile(const Statement& s, const TimestampLookup& timestamp_of) {
  Compiled c;
  std::vector<std::string> missing;
  for (const auto& name : timestamp_names(s)) {
    if (!timestamp_of(name)) {
      missing.push_back(name);
    }
  }
  if (!missing.empty()) {
    throw PartialInterpretation(std::move(missing));
  }
  auto value_of = [&](const std::string& name) { return *timestamp_of(name); };

  auto merge = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  };

  auto build = [&](auto& self, const Statement& node) -> std::size_t {
    CNode n{};
    switch (node.kind()) {
    case Statement::Kind::Constraint:
      n.op = Op::Const;
      n.value = node.time_constraint().holds(value_of);
      break;
    case Statement::Kind::Event: {
      n.op = Op::Var;
      auto it = std::find(c.events.begin(), c.events.end(), node.event().id());
      n.var = static_cast<std::size_t>(it - c.events.begin());
      if (it == c.events.end()) {
        c.events.push_back(node.event().id());
      }
      n.vars = {n.var};
      break;
    }
    case Statement::Kind::Not:
      n.op = Op::Not;
      n.lhs = self(self, node.operand());
      n.vars = c.nodes[n.lhs].vars;
      break;
    default:
      n.op = node.kind() == Statement::Kind::And  ? Op::And
             : node.kind() == Statement::Kind::Or ? Op::Or
                                                  : Op::Implies;
      n.lhs = self(self, node.lhs());
      n.rhs = self(self, node.rhs());
      n.vars = merge(c.nodes[n.lhs].vars, c.nodes[n.rhs].vars);
      break;
    }
    c.nodes.push_back(std::move(n));
    return c.nodes.size() - 1;
  };
  c.root = build(build, s);
  return c;
}

Compiled compile(const Statement& s, const QuantInterpretation& i) {
  return compile(s, [&](const std::string& name) { return i.timestamp(name); });
}

std::vector<double> probabilities(const Compiled& c, const QuantInterpretation& i) {
  std::vector<double> p;
  std::vector<std::string> missing;
  for (const auto& id : c.events) {
    auto v = i.event(id);
    if (!v) {
      missing.push_back(id);
    }
    p.push_back(v.value_or(0.0));
  }
  if (!missing.empty()) {
    throw PartialInterpretation(std::move(missing));
  }
  return p;
}

bool eval_assignment(const Compiled& c, std::size_t index, std::uint64_t bits) {
  const CNode& n = c.nodes[index];
  switch (n.op) {
  case Op::Const: return n.value;
  case Op::Var: return ((bits >> n.var) & 1U) != 0;
  case Op::Not: return !eval_assignment(c, n.lhs, bits);
  case Op::And: return eval_assignment(c, n.lhs, bits) && eval_assignment(c, n.rhs, bits);
  case Op::Or: return eval_assignment(c, n.lhs, bits) || eval_assignment(c, n.rhs, bits);
  case Op::Implies: return !eval_assignment(c, n.lhs, bits) || eval_assignment(c, n.rhs, bits);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Probability recursion.

// Truth table over a local variable list: bit a is the value under the
// assignment whose j-th variable is bit j of a.
struct Table {
  std::vector<std::uint64_t> words;
  std::uint64_t last_mask = ~std::uint64_t{0};

  bool all(bool value) const {
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t mask = w + 1 == words.size() ? last_mask : ~std::uint64_t{0};
      std::uint64_t expected = value ? mask : 0;
      if ((words[w] & mask) != expected) {
        return false;
      }
    }
    return true;
  }
};

class ProbabilityEvaluator {
public:
  ProbabilityEvaluator(const Compiled& c, std::vector<double> p) : c_(c), p_(std::move(p)) {}

  double evaluate(std::size_t index) {
    const CNode& n = c_.nodes[index];
    if (n.vars.size() <= kEquivalenceCheckLimit) {
      scope_ = n.vars;
      bits_ = std::size_t{1} << scope_.size();
      return tabulate(index).first;
    }
    // Too many events for a truth table here; only constants short-circuit.
    switch (n.op) {
    case Op::Not: return 1.0 - evaluate(n.lhs);
    case Op::And: return combine(Op::And, evaluate(n.lhs), evaluate(n.rhs));
    case Op::Or: return combine(Op::Or, evaluate(n.lhs), evaluate(n.rhs));
    case Op::Implies: return combine(Op::Implies, evaluate(n.lhs), evaluate(n.rhs));
    default: return leaf(n);
    }
  }

private:
  static double combine(Op op, double a, double b) {
    switch (op) {
    case Op::And: return a * b;
    case Op::Or: return 1.0 - (1.0 - a) * (1.0 - b);
    default: return 1.0 - a * (1.0 - b);  // Implies as !(a & !b)
    }
  }

  double leaf(const CNode& n) const {
    return n.op == Op::Const ? (n.value ? 1.0 : 0.0) : p_[n.var];
  }

  Table blank() const {
    Table t;
    t.words.assign(std::max<std::size_t>(1, bits_ / 64), 0);
    if (bits_ < 64) {
      t.last_mask = (std::uint64_t{1} << bits_) - 1;
    }
    return t;
  }

  Table variable_table(std::size_t var) const {
    std::size_t j = static_cast<std::size_t>(
        std::lower_bound(scope_.begin(), scope_.end(), var) - scope_.begin());
    Table t = blank();
    for (std::size_t a = 0; a < bits_; ++a) {
      if ((a >> j) & 1U) {
        t.words[a / 64] |= std::uint64_t{1} << (a % 64);
      }
    }
    return t;
  }

  // Probability and truth table of a subtree whose variables lie in scope_.
  std::pair<double, Table> tabulate(std::size_t index) {
    const CNode& n = c_.nodes[index];
    Table t = blank();
    double p = 0.0;
    switch (n.op) {
    case Op::Const:
      if (n.value) {
        std::fill(t.words.begin(), t.words.end(), ~std::uint64_t{0});
      }
      p = leaf(n);
      break;
    case Op::Var:
      t = variable_table(n.var);
      p = leaf(n);
      break;
    case Op::Not: {
      auto [pa, ta] = tabulate(n.lhs);
      for (std::size_t w = 0; w < t.words.size(); ++w) {
        t.words[w] = ~ta.words[w];
      }
      p = 1.0 - pa;
      break;
    }
    default: {
      auto [pa, ta] = tabulate(n.lhs);
      auto [pb, tb] = tabulate(n.rhs);
      for (std::size_t w = 0; w < t.words.size(); ++w) {
        switch (n.op) {
        case Op::And: t.words[w] = ta.words[w] & tb.words[w]; break;
        case Op::Or: t.words[w] = ta.words[w] | tb.words[w]; break;
        default: t.words[w] = ~ta.words[w] | tb.words[w]; break;
        }
      }
      p = combine(n.op, pa, pb);
      break;
    }
    }
    if (t.all(true)) {
      p = 1.0;
    } else if (t.all(false)) {
      p = 0.0;
    }
    return {p, std::move(t)};
  }

  const Compiled& c_;
  std::vector<double> p_;
  std::vector<std::size_t> scope_;
  std::size_t bits_ = 1;
};

// ---------------------------------------------------------------------------
// CNF by distribution.

class CnfBuilder {
public:
  explicit CnfBuilder(std::size_t budget) : budget_(budget) {}

  CnfForm build(const Statement& s, bool positive) {
    switch (s.kind()) {
    case Statement::Kind::Event:
    case Statement::Kind::Constraint: return CnfForm{{Clause{Literal{s, !positive}}}};
    case Statement::Kind::Not: return build(s.operand(), !positive);
    case Statement::Kind::And:
      return positive ? concat(build(s.lhs(), true), build(s.rhs(), true))
                      : product(build(s.lhs(), false), build(s.rhs(), false));
    case Statement::Kind::Or:
      return positive ? product(build(s.lhs(), true), build(s.rhs(), true))
                      : concat(build(s.lhs(), false), build(s.rhs(), false));
    case Statement::Kind::Implies:
      return positive ? product(build(s.lhs(), false), build(s.rhs(), true))
                      : concat(build(s.lhs(), true), build(s.rhs(), false));
    }
    return {};
  }

private:
  void check(std::size_t clauses) const {
    if (clauses > budget_) {
      throw FormulaTooLarge("CNF needs more than " + std::to_string(budget_) + " clauses");
    }
  }

  CnfForm concat(CnfForm a, CnfForm b) const {
    check(a.clauses.size() + b.clauses.size());
    for (auto& clause : b.clauses) {
      a.clauses.push_back(std::move(clause));
    }
    return a;
  }

  CnfForm product(const CnfForm& a, const CnfForm& b) const {
    // Sizes are bounded by the budget, so the product cannot overflow.
    check(a.clauses.size() * b.clauses.size());
    CnfForm out;
    out.clauses.reserve(a.clauses.size() * b.clauses.size());
    for (const auto& ca : a.clauses) {
      for (const auto& cb : b.clauses) {
        Clause merged = ca;
        merged.insert(merged.end(), cb.begin(), cb.end());
        out.clauses.push_back(std::move(merged));
      }
    }
    return out;
  }

  std::size_t budget_;
};

bool eval_literal(const Literal& l, const QualInterpretation& i) {
  return eval_statement(l.atom, i) != l.negated;
}

} // namespace

Statement desugar(const Statement& s) {
  switch (s.kind()) {
  case Statement::Kind::Event:
  case Statement::Kind::Constraint: return s;
  case Statement::Kind::Not: return Statement::negation(desugar(s.operand()));
  case Statement::Kind::And: return Statement::conjunction(desugar(s.lhs()), desugar(s.rhs()));
  case Statement::Kind::Or:
    return Statement::negation(Statement::conjunction(Statement::negation(desugar(s.lhs())),
                                                      Statement::negation(desugar(s.rhs()))));
  case Statement::Kind::Implies:
    return Statement::negation(
        Statement::conjunction(desugar(s.lhs()), Statement::negation(desugar(s.rhs()))));
  }
  return s;
}

CnfForm to_cnf(const Statement& s, std::size_t clause_budget) {
  return CnfBuilder(clause_budget).build(s, true);
}

bool eval_statement(const Statement& s, const QualInterpretation& i) {
  Compiled c = compile(s, [&](const std::string& name) { return i.timestamp(name); });
  std::vector<std::string> missing;
  std::vector<bool> values;
  for (const auto& id : c.events) {
    auto v = i.event(id);
    if (!v) {
      missing.push_back(id);
    }
    values.push_back(v.value_or(false));
  }
  if (!missing.empty()) {
    throw PartialInterpretation(std::move(missing));
  }
  auto eval = [&](auto& self, std::size_t index) -> bool {
    const CNode& n = c.nodes[index];
    switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return values[n.var];
    case Op::Not: return !self(self, n.lhs);
    case Op::And: return self(self, n.lhs) && self(self, n.rhs);
    case Op::Or: return self(self, n.lhs) || self(self, n.rhs);
    case Op::Implies: return !self(self, n.lhs) || self(self, n.rhs);
    }
    return false;
  };
  return eval(eval, c.root);
}

bool eval_cnf(const CnfForm& cnf, const QualInterpretation& i) {
  return std::all_of(cnf.clauses.begin(), cnf.clauses.end(), [&](const Clause& clause) {
    return std::any_of(clause.begin(), clause.end(),
                       [&](const Literal& l) { return eval_literal(l, i); });
  });
}

bool eval_qualitative(const RuleLibrary& lib, const QualInterpretation& i) {
  std::vector<std::string> missing;
  for (const auto& e : lib.events()) {
    if (!i.event(e.id)) {
      missing.push_back(e.id);
    }
  }
  for (const auto& t : lib.timestamps()) {
    if (!i.timestamp(t.name)) {
      missing.push_back(t.name);
    }
  }
  if (!missing.empty()) {
    throw PartialInterpretation(std::move(missing));
  }
  return std::all_of(lib.rules().begin(), lib.rules().end(),
                     [&](const Rule& r) { return eval_statement(r.statement, i); });
}

double pr_statement(const Statement& s, const QuantInterpretation& i) {
  Compiled c = compile(s, i);
  ProbabilityEvaluator evaluator(c, probabilities(c, i));
  return evaluator.evaluate(c.root);
}

double pr_library(const RuleLibrary& lib, const QuantInterpretation& i) {
  double product = 1.0;
  for (const auto& rule : lib.rules()) {
    product *= pr_statement(rule.statement, i);
  }
  return product;
}

double pr_exact(const Statement& s, const QuantInterpretation& i) {
  Compiled c = compile(s, i);
  if (c.events.size() > kExactEventLimit) {
    throw TooManyEvents("exact enumeration supports at most " + std::to_string(kExactEventLimit) +
                        " events, statement has " + std::to_string(c.events.size()));
  }
  std::vector<double> p = probabilities(c, i);
  double total = 0.0;
  std::uint64_t assignments = std::uint64_t{1} << c.events.size();
  for (std::uint64_t bits = 0; bits < assignments; ++bits) {
    if (!eval_assignment(c, c.root, bits)) {
      continue;
    }
    double weight = 1.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      weight *= ((bits >> k) & 1U) ? p[k] : 1.0 - p[k];
    }
    total += weight;
  }
  return total;
}

} // namespace horae::semantics
