#pragma once

#include "horae/core.hpp"

#include <cstddef>
#include <vector>

namespace horae::semantics {

/// An event or constraint atom, possibly negated.
struct Literal {
  Statement atom;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

/// Conjunction of clauses. The empty list is true; a single empty clause is
/// false.
struct CnfForm {
  std::vector<Clause> clauses;

  bool is_true() const { return clauses.empty(); }
  bool is_false() const { return clauses.size() == 1 && clauses.front().empty(); }

  friend bool operator==(const CnfForm&, const CnfForm&) = default;
};

inline constexpr std::size_t kDefaultClauseBudget = 100000;

/// Rewrites Or and Implies in terms of Not and And.
Statement desugar(const Statement& s);

/// Direct distribution into CNF, without auxiliary variables. Constraint
/// atoms stay opaque. Throws FormulaTooLarge past `clause_budget` clauses.
CnfForm to_cnf(const Statement& s, std::size_t clause_budget = kDefaultClauseBudget);

/// Truth value of a single statement. Throws PartialInterpretation when an
/// event or timestamp it mentions is unassigned.
bool eval_statement(const Statement& s, const QualInterpretation& i);

bool eval_cnf(const CnfForm& cnf, const QualInterpretation& i);

/// Conjunction of every statement in the library. The interpretation must
/// cover the library's whole event and timestamp tables.
bool eval_qualitative(const RuleLibrary& lib, const QualInterpretation& i);

/// Sub-statements with at most this many distinct events are tested for
/// equivalence to true or false at every recursion level.
inline constexpr std::size_t kEquivalenceCheckLimit = 16;

/// Recursive satisfaction probability under independent events.
double pr_statement(const Statement& s, const QuantInterpretation& i);

/// Product of the per-statement probabilities.
double pr_library(const RuleLibrary& lib, const QuantInterpretation& i);

inline constexpr std::size_t kExactEventLimit = 20;

/// Exact probability by enumerating every event assignment. Throws
/// TooManyEvents above kExactEventLimit distinct events.
double pr_exact(const Statement& s, const QuantInterpretation& i);

} // namespace horae::semantics
