#include "horae/consistency.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace horae::consistency {

namespace {

// a.x + c < 0 when strict, a.x + c <= 0 otherwise.
struct Ineq {
  std::vector<Rational> a;
  Rational c;
  bool strict = false;

  friend bool operator<(const Ineq& l, const Ineq& r) {
    return std::tie(l.a, l.c, l.strict) < std::tie(r.a, r.c, r.strict);
  }
};

// Constant inequalities are decided on the spot.
bool constant_holds(const Ineq& q) { return q.strict ? q.c < 0 : q.c <= 0; }

bool is_constant(const Ineq& q) {
  return std::all_of(q.a.begin(), q.a.end(), [](const Rational& v) { return v == 0; });
}

// Positive rescaling so the first non-zero coefficient has magnitude 1;
// makes duplicates produced by elimination collide.
Ineq normalized(Ineq q) {
  for (const auto& v : q.a) {
    if (v != 0) {
      Rational scale = abs(v);
      for (auto& x : q.a) {
        x /= scale;
      }
      q.c /= scale;
      break;
    }
  }
  return q;
}

class Eliminator {
public:
  explicit Eliminator(std::size_t n) : n_(n) {}

  // Returns false when a constant inequality is already violated.
  bool add(Ineq q, std::set<Ineq>& into) const {
    if (is_constant(q)) {
      return constant_holds(q);
    }
    into.insert(normalized(std::move(q)));
    return true;
  }

  std::optional<std::map<std::size_t, Rational>> run(std::set<Ineq> system) {
    stages_.clear();
    for (std::size_t k = 0; k < n_; ++k) {
      stages_.push_back(system);
      std::set<Ineq> next;
      std::vector<const Ineq*> upper;
      std::vector<const Ineq*> lower;
      for (const auto& q : system) {
        if (q.a[k] > 0) {
          upper.push_back(&q);
        } else if (q.a[k] < 0) {
          lower.push_back(&q);
        } else {
          next.insert(q);
        }
      }
      for (const Ineq* p : upper) {
        for (const Ineq* q : lower) {
          // p/a_p[k] + q/(-a_q[k]) cancels x_k.
          Rational sp = 1 / p->a[k];
          Rational sq = -1 / q->a[k];
          Ineq combined;
          combined.a.resize(n_);
          for (std::size_t j = 0; j < n_; ++j) {
            combined.a[j] = p->a[j] * sp + q->a[j] * sq;
          }
          combined.a[k] = 0;
          combined.c = p->c * sp + q->c * sq;
          combined.strict = p->strict || q->strict;
          if (!add(std::move(combined), next)) {
            return std::nullopt;
          }
        }
      }
      system = std::move(next);
    }
    return back_substitute();
  }

private:
  std::map<std::size_t, Rational> back_substitute() const {
    std::vector<Rational> x(n_, Rational(0));
    for (std::size_t k = n_; k-- > 0;) {
      std::optional<Rational> lo;
      bool lo_strict = false;
      std::optional<Rational> hi;
      bool hi_strict = false;
      for (const auto& q : stages_[k]) {
        if (q.a[k] == 0) {
          continue;
        }
        Rational rest = q.c;
        for (std::size_t j = k + 1; j < n_; ++j) {
          rest += q.a[j] * x[j];
        }
        Rational bound = -rest / q.a[k];
        if (q.a[k] > 0) {
          if (!hi || bound < *hi || (bound == *hi && q.strict)) {
            hi_strict = hi && bound == *hi ? (hi_strict || q.strict) : q.strict;
            hi = bound;
          }
        } else {
          if (!lo || bound > *lo || (bound == *lo && q.strict)) {
            lo_strict = lo && bound == *lo ? (lo_strict || q.strict) : q.strict;
            lo = bound;
          }
        }
      }
      x[k] = pick(lo, lo_strict, hi, hi_strict);
    }
    std::map<std::size_t, Rational> out;
    for (std::size_t k = 0; k < n_; ++k) {
      out[k] = x[k];
    }
    return out;
  }

  // Some value inside the (non-empty) interval, preferring simple ones.
  static Rational pick(const std::optional<Rational>& lo, bool lo_strict,
                       const std::optional<Rational>& hi, bool hi_strict) {
    Rational base = lo.value_or(Rational(0));
    if (!lo_strict && (!hi || base <= *hi)) {
      return base;
    }
    if (!hi) {
      return base + 1;
    }
    Rational step = base + 1;
    if (step < *hi || (step == *hi && !hi_strict)) {
      return step;
    }
    return (base + *hi) / 2;
  }

  std::size_t n_;
  std::vector<std::set<Ineq>> stages_;
};

} // namespace

LinResult solve_linear(const LinSystem& sys) {
  std::vector<std::string> names;
  auto index_of = [&](const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      names.push_back(name);
      return names.size() - 1;
    }
    return static_cast<std::size_t>(it - names.begin());
  };
  for (const auto& v : sys.vars) {
    index_of(v.name);
  }
  for (const auto& c : sys.constraints) {
    for (const auto& v : c.variables()) {
      index_of(v);
    }
  }
  std::size_t n = names.size();

  Eliminator elim(n);
  std::set<Ineq> system;
  bool ok = true;
  auto push = [&](Ineq q) { ok = elim.add(std::move(q), system) && ok; };

  for (std::size_t k = 0; k < n; ++k) {
    Ineq nonneg;
    nonneg.a.assign(n, Rational(0));
    nonneg.a[k] = -1;
    push(std::move(nonneg));
  }
  for (const auto& c : sys.constraints) {
    // diff = lhs - rhs
    Ineq diff;
    diff.a.assign(n, Rational(0));
    for (const auto& t : c.lhs.terms) {
      diff.a[index_of(t.var)] += t.coefficient;
    }
    for (const auto& t : c.rhs.terms) {
      diff.a[index_of(t.var)] -= t.coefficient;
    }
    diff.c = c.lhs.constant - c.rhs.constant;
    Ineq flipped = diff;
    for (auto& v : flipped.a) {
      v = -v;
    }
    flipped.c = -flipped.c;
    switch (c.cmp) {
    case Comparator::Lt: diff.strict = true; push(diff); break;
    case Comparator::Le: push(diff); break;
    case Comparator::Gt: flipped.strict = true; push(flipped); break;
    case Comparator::Ge: push(flipped); break;
    case Comparator::Eq:
      push(diff);
      push(flipped);
      break;
    }
  }
  if (!ok) {
    return {};
  }
  auto solution = elim.run(std::move(system));
  if (!solution) {
    return {};
  }
  std::map<std::string, Rational> witness;
  for (const auto& [k, v] : *solution) {
    witness[names[k]] = v;
  }
  return LinResult{true, std::move(witness)};
}

} // namespace horae::consistency
