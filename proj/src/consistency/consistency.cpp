#include "horae/consistency.hpp"

#include "horae/parser.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>

namespace horae::consistency {

namespace {

// ---------------------------------------------------------------------------
// Propositional search.

using Lit = int;  // +-(var + 1)

std::size_t var_of(Lit l) { return static_cast<std::size_t>(std::abs(l)) - 1; }

class Dpll {
public:
  Dpll(std::size_t vars, const std::vector<std::vector<Lit>>& clauses)
      : clauses_(clauses), value_(vars, 0) {}

  bool solve() { return search(); }

  // +1 true, -1 false, 0 unassigned.
  int value(std::size_t var) const { return value_[var]; }

private:
  int lit_value(Lit l) const {
    int v = value_[var_of(l)];
    return l > 0 ? v : -v;
  }

  void assign(Lit l) {
    value_[var_of(l)] = l > 0 ? 1 : -1;
    trail_.push_back(var_of(l));
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      value_[trail_.back()] = 0;
      trail_.pop_back();
    }
  }

  // Unit propagation to fixpoint; false on a falsified clause.
  bool propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& clause : clauses_) {
        Lit unit = 0;
        int open = 0;
        bool satisfied = false;
        for (Lit l : clause) {
          int v = lit_value(l);
          if (v > 0) {
            satisfied = true;
            break;
          }
          if (v == 0) {
            ++open;
            unit = l;
          }
        }
        if (satisfied) {
          continue;
        }
        if (open == 0) {
          return false;
        }
        if (open == 1) {
          assign(unit);
          changed = true;
        }
      }
    }
    return true;
  }

  // First unassigned literal of the first clause not yet satisfied, or 0
  // when every clause is satisfied.
  Lit choose() const {
    for (const auto& clause : clauses_) {
      Lit candidate = 0;
      bool satisfied = false;
      for (Lit l : clause) {
        int v = lit_value(l);
        if (v > 0) {
          satisfied = true;
          break;
        }
        if (v == 0 && candidate == 0) {
          candidate = l;
        }
      }
      if (!satisfied) {
        return candidate;
      }
    }
    return 0;
  }

  bool search() {
    std::size_t mark = trail_.size();
    if (!propagate()) {
      undo(mark);
      return false;
    }
    Lit pick = choose();
    if (pick == 0) {
      return true;
    }
    for (Lit branch : {pick, -pick}) {
      std::size_t inner = trail_.size();
      assign(branch);
      if (search()) {
        return true;
      }
      undo(inner);
    }
    undo(mark);
    return false;
  }

  const std::vector<std::vector<Lit>>& clauses_;
  std::vector<int> value_;
  std::vector<std::size_t> trail_;
};

// ---------------------------------------------------------------------------
// Encoding of a library into clauses over event and constraint atoms.

Comparator complement(Comparator cmp) {
  switch (cmp) {
  case Comparator::Lt: return Comparator::Ge;
  case Comparator::Le: return Comparator::Gt;
  case Comparator::Gt: return Comparator::Le;
  case Comparator::Ge: return Comparator::Lt;
  case Comparator::Eq: break;
  }
  throw InvalidArgument("equality constraints have no single complement");
}

// Splits `=` atoms into `<=` and `>=` so every constraint literal has a
// complement that is again one inequality.
Statement split_equalities(const Statement& s) {
  switch (s.kind()) {
  case Statement::Kind::Event: return s;
  case Statement::Kind::Constraint: {
    const TimeConstraint& c = s.time_constraint();
    if (c.cmp != Comparator::Eq) {
      return s;
    }
    return Statement::conjunction(Statement::constraint({c.lhs, Comparator::Le, c.rhs}),
                                  Statement::constraint({c.lhs, Comparator::Ge, c.rhs}));
  }
  case Statement::Kind::Not: return Statement::negation(split_equalities(s.operand()));
  case Statement::Kind::And:
    return Statement::conjunction(split_equalities(s.lhs()), split_equalities(s.rhs()));
  case Statement::Kind::Or:
    return Statement::disjunction(split_equalities(s.lhs()), split_equalities(s.rhs()));
  case Statement::Kind::Implies:
    return Statement::implication(split_equalities(s.lhs()), split_equalities(s.rhs()));
  }
  return s;
}

struct Encoding {
  std::vector<std::string> event_vars;        // var index -> event id, or "" for constraints
  std::vector<std::optional<TimeConstraint>> constraint_vars;
  std::map<std::string, std::size_t> event_index;
  std::map<std::string, std::size_t> constraint_index;  // keyed by printed form
  std::vector<std::vector<Lit>> clauses;

  std::size_t size() const { return event_vars.size(); }

  std::size_t var_for(const Statement& atom) {
    if (atom.kind() == Statement::Kind::Event) {
      auto [it, fresh] = event_index.emplace(atom.event().id(), size());
      if (fresh) {
        event_vars.push_back(atom.event().id());
        constraint_vars.emplace_back();
      }
      return it->second;
    }
    std::string key = parser::print_constraint(atom.time_constraint());
    auto [it, fresh] = constraint_index.emplace(key, size());
    if (fresh) {
      event_vars.emplace_back();
      constraint_vars.emplace_back(atom.time_constraint());
    }
    return it->second;
  }
};

Encoding encode(const RuleLibrary& lib, std::size_t budget) {
  Encoding enc;
  for (const auto& rule : lib.rules()) {
    semantics::CnfForm cnf;
    try {
      cnf = semantics::to_cnf(split_equalities(rule.statement), budget);
    } catch (const FormulaTooLarge& err) {
      throw ClauseBudgetExceeded("rule " + rule.id + ": " + err.what());
    }
    for (const auto& clause : cnf.clauses) {
      std::vector<Lit> lits;
      for (const auto& l : clause) {
        Lit lit = static_cast<Lit>(enc.var_for(l.atom) + 1);
        lits.push_back(l.negated ? -lit : lit);
      }
      enc.clauses.push_back(std::move(lits));
    }
    if (enc.clauses.size() > budget) {
      throw ClauseBudgetExceeded("library needs more than " + std::to_string(budget) + " clauses");
    }
  }
  return enc;
}

struct Model {
  std::map<std::string, bool> events;
  std::map<std::string, Rational> timestamps;
};

// Lazy DPLL(T): propositional models are checked against the theory and
// blocked when their constraint literals are infeasible.
std::optional<Model> solve_library(const RuleLibrary& lib, std::size_t budget) {
  Encoding enc = encode(lib, budget);
  std::vector<std::vector<Lit>> clauses = enc.clauses;
  while (true) {
    Dpll dpll(enc.size(), clauses);
    if (!dpll.solve()) {
      return std::nullopt;
    }
    std::vector<Lit> theory;
    for (std::size_t v = 0; v < enc.size(); ++v) {
      if (enc.constraint_vars[v] && dpll.value(v) != 0) {
        theory.push_back(dpll.value(v) > 0 ? static_cast<Lit>(v + 1) : -static_cast<Lit>(v + 1));
      }
    }
    auto system_of = [&](const std::vector<Lit>& lits) {
      LinSystem sys;
      sys.vars = lib.timestamps();
      for (Lit l : lits) {
        TimeConstraint c = *enc.constraint_vars[var_of(l)];
        if (l < 0) {
          c.cmp = complement(c.cmp);
        }
        sys.constraints.push_back(std::move(c));
      }
      return sys;
    };
    LinResult result = solve_linear(system_of(theory));
    if (result.sat) {
      Model m;
      for (std::size_t v = 0; v < enc.size(); ++v) {
        if (!enc.constraint_vars[v]) {
          m.events[enc.event_vars[v]] = dpll.value(v) > 0;
        }
      }
      for (const auto& e : lib.events()) {
        m.events.try_emplace(e.id, false);
      }
      m.timestamps = std::move(*result.witness);
      return m;
    }
    // Shrink the infeasible set before blocking it.
    for (std::size_t k = theory.size(); k-- > 0;) {
      std::vector<Lit> without = theory;
      without.erase(without.begin() + static_cast<std::ptrdiff_t>(k));
      if (!solve_linear(system_of(without)).sat) {
        theory = std::move(without);
      }
    }
    std::vector<Lit> blocking;
    for (Lit l : theory) {
      blocking.push_back(-l);
    }
    clauses.push_back(std::move(blocking));
  }
}

// Each statement gets private copies of its events; timestamps stay shared.
RuleLibrary rename_apart(const RuleLibrary& lib) {
  std::vector<Rule> rules;
  for (std::size_t k = 0; k < lib.rules().size(); ++k) {
    const Rule& rule = lib.rules()[k];
    std::string suffix = "#" + std::to_string(k);
    Statement renamed = map_events(rule.statement, [&](const EventAtom& atom) {
      BasicEvent copy = *atom.event;
      copy.id += suffix;
      return Statement::atom(copy, atom.timestamp);
    });
    rules.push_back(Rule{rule.id, rule.type, renamed});
  }
  RuleLibrary derived = RuleLibrary::from_rules(std::move(rules));
  return RuleLibrary(derived.rules(), derived.events(), lib.timestamps());
}

RuleLibrary abstracted(const RuleLibrary& lib, const abstraction::AbstractionResult* a) {
  return a ? abstraction::apply_abstraction(lib, *a) : lib;
}

// Greedy deletion: drop a rule whenever the rest stays inconsistent.
template <class StillInconsistent>
std::vector<std::string> conflict_core(const RuleLibrary& lib, StillInconsistent still_inconsistent) {
  std::vector<std::size_t> keep(lib.rules().size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    keep[k] = k;
  }
  for (std::size_t k = 0; k < keep.size();) {
    std::vector<std::size_t> trial = keep;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
    if (still_inconsistent(lib.subset(trial))) {
      keep = std::move(trial);
    } else {
      ++k;
    }
  }
  std::vector<std::string> ids;
  for (auto k : keep) {
    ids.push_back(lib.rules()[k].id);
  }
  return ids;
}

std::optional<Model> solve_quantitative(const RuleLibrary& lib, std::size_t budget) {
  return solve_library(rename_apart(lib), budget);
}

} // namespace

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::Consistent ? "Consistent" : "Inconsistent";
}

std::string_view to_string(Mode mode) {
  return mode == Mode::Qualitative ? "qualitative" : "quantitative";
}

ConsistencyReport check_qualitative(const RuleLibrary& lib,
                                    const abstraction::AbstractionResult* abstraction,
                                    const CheckOptions& options) {
  RuleLibrary work = abstracted(lib, abstraction);
  ConsistencyReport report;
  report.mode = Mode::Qualitative;
  auto model = solve_library(work, options.clause_budget);
  if (!model) {
    report.verdict = Verdict::Inconsistent;
    if (options.conflict_core) {
      report.conflict_core = conflict_core(work, [&](const RuleLibrary& sub) {
        return !solve_library(sub, options.clause_budget);
      });
    }
    return report;
  }
  report.verdict = Verdict::Consistent;
  QualInterpretation witness;
  for (const auto& e : lib.events()) {
    bool value = false;
    if (abstraction) {
      const auto& ref = abstraction->class_of.at(e.id);
      const std::string& rep = abstraction->representatives.at(ref.class_id);
      auto it = model->events.find(rep);
      value = it != model->events.end() && it->second;
      value = ref.polarity > 0 ? value : !value;
    } else {
      value = model->events.at(e.id);
    }
    witness.set_event(e.id, value);
  }
  for (const auto& t : lib.timestamps()) {
    witness.set_timestamp(t.name, model->timestamps.at(t.name));
  }
  report.qual_witness = std::move(witness);
  return report;
}

ConsistencyReport check_quantitative(const RuleLibrary& lib,
                                     const abstraction::AbstractionResult* abstraction,
                                     const CheckOptions& options) {
  RuleLibrary work = abstracted(lib, abstraction);
  ConsistencyReport report;
  report.mode = Mode::Quantitative;
  auto model = solve_quantitative(work, options.clause_budget);
  if (!model) {
    report.verdict = Verdict::Inconsistent;
    if (options.conflict_core) {
      report.conflict_core = conflict_core(work, [&](const RuleLibrary& sub) {
        return !solve_quantitative(sub, options.clause_budget);
      });
    }
    return report;
  }
  report.verdict = Verdict::Consistent;
  QuantInterpretation witness;
  for (const auto& e : lib.events()) {
    witness.set_event(e.id, 0.5);
  }
  for (const auto& t : lib.timestamps()) {
    witness.set_timestamp(t.name, model->timestamps.at(t.name));
  }
  report.quant_witness = std::move(witness);
  return report;
}

} // namespace horae::consistency
