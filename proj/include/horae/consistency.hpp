#pragma once

#include "horae/abstraction.hpp"
#include "horae/core.hpp"
#include "horae/semantics.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace horae::consistency {

/// Linear constraints over timestamps; every variable is implicitly >= 0.
struct LinSystem {
  std::vector<TimeConstraint> constraints;
  std::vector<TimestampVar> vars;
};

struct LinResult {
  bool sat = false;
  // Present iff sat; covers every variable of the system and of its
  // constraints.
  std::optional<std::map<std::string, Rational>> witness;
};

/// Fourier-Motzkin elimination over the rationals with strict bounds
/// tracked. Witnesses are exact.
LinResult solve_linear(const LinSystem& sys);

enum class Verdict { Consistent, Inconsistent };
enum class Mode { Qualitative, Quantitative };

std::string_view to_string(Verdict verdict);
std::string_view to_string(Mode mode);

struct ConsistencyReport {
  Verdict verdict = Verdict::Consistent;
  Mode mode = Mode::Qualitative;
  // Qualitative mode, Consistent only. Keyed by the original event ids.
  std::optional<QualInterpretation> qual_witness;
  // Quantitative mode, Consistent only.
  std::optional<QuantInterpretation> quant_witness;
  // Inconsistent only: rule ids whose removal one at a time restores
  // consistency.
  std::optional<std::vector<std::string>> conflict_core;
};

struct CheckOptions {
  std::size_t clause_budget = semantics::kDefaultClauseBudget;
  bool conflict_core = true;
};

/// Whether some boolean/timestamp interpretation satisfies every statement.
/// Throws ClauseBudgetExceeded when a statement's CNF is too large.
ConsistencyReport check_qualitative(const RuleLibrary& lib,
                                    const abstraction::AbstractionResult* abstraction = nullptr,
                                    const CheckOptions& options = {});

/// Whether some probabilistic interpretation gives the library a positive
/// product probability. Statements are independent under that semantics, so
/// this holds iff timestamps exist under which every statement is
/// satisfiable on its own.
ConsistencyReport check_quantitative(const RuleLibrary& lib,
                                     const abstraction::AbstractionResult* abstraction = nullptr,
                                     const CheckOptions& options = {});

/// SMT-LIB2 script asserting every statement. Declarations are sorted; the
/// script ends with check-sat and, when anything was declared, get-model.
std::string emit_smtlib(const RuleLibrary& lib,
                        const abstraction::AbstractionResult* abstraction = nullptr);

} // namespace horae::consistency
