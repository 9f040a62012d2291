#include <doctest.h>

#include "horae/core.hpp"

using namespace horae;

namespace {

BasicEvent event(const std::string& id, const std::string& object, const std::string& action) {
  return BasicEvent::make(id, {EventComponent::make(ComponentKind::Object, object),
                               EventComponent::make(ComponentKind::Action, action)});
}

} // namespace

TEST_CASE("new_library with empty inputs yields an empty library") {
  RuleLibrary lib = new_library({}, {}, {});
  CHECK(lib.rules().empty());
  CHECK(lib.events().empty());
  CHECK(lib.timestamps().empty());
}

TEST_CASE("new_library accepts a rule whose event is in the table") {
  BasicEvent e1 = event("e1", "employees", "wash hands");
  Rule rule{"r1", RuleType::Shall, Statement::atom(e1)};
  RuleLibrary lib = new_library({rule}, {e1}, {});
  REQUIRE(lib.size() == 1);
  CHECK(lib.rules()[0] == rule);
  CHECK(lib.find_event("e1") != nullptr);
}

TEST_CASE("new_library reports dangling event references") {
  BasicEvent e9 = event("e9", "x", "y");
  Rule rule{"r1", RuleType::Shall, Statement::atom(e9)};
  try {
    new_library({rule}, {}, {});
    FAIL("expected DanglingReference");
  } catch (const DanglingReference& err) {
    CHECK(err.name() == "e9");
  }
}

TEST_CASE("new_library reports dangling timestamps and duplicate ids") {
  BasicEvent e1 = event("e1", "x", "y");
  Rule timed{"r1", RuleType::Shall, Statement::atom(e1, "t1")};
  CHECK_THROWS_AS(new_library({timed}, {e1}, {}), DanglingReference);
  CHECK_NOTHROW(new_library({timed}, {e1}, {TimestampVar{"t1"}}));

  Rule a{"r1", RuleType::Shall, Statement::atom(e1)};
  CHECK_THROWS_AS(new_library({a, a}, {e1}, {}), DuplicateId);
  CHECK_THROWS_AS(new_library({a}, {e1, e1}, {}), DuplicateId);
  CHECK_THROWS_AS(new_library({}, {}, {TimestampVar{"t"}, TimestampVar{"t"}}), DuplicateId);
}

TEST_CASE("an event id bound to two different bodies is rejected") {
  BasicEvent e1 = event("e1", "x", "y");
  BasicEvent other = event("e1", "x", "z");
  Rule rule{"r1", RuleType::Shall, Statement::atom(other)};
  CHECK_THROWS_AS(new_library({rule}, {e1}, {}), DuplicateId);
}

TEST_CASE("library iteration preserves rule order") {
  std::vector<Rule> rules;
  std::vector<BasicEvent> events;
  for (int i = 0; i < 12; ++i) {
    BasicEvent e = event("e" + std::to_string(i), "o" + std::to_string(i), "a");
    events.push_back(e);
    rules.push_back(Rule{"rule" + std::to_string(11 - i), RuleType::Should, Statement::atom(e)});
  }
  RuleLibrary lib = new_library(rules, events, {});
  CHECK(lib.rules() == rules);
}

TEST_CASE("from_rules derives tables in first-occurrence order") {
  BasicEvent a = event("a", "x", "y");
  BasicEvent b = event("b", "u", "v");
  TimeConstraint c{{}, Comparator::Lt, {}};
  c.lhs.add_term(1, "t2");
  c.rhs.add_term(1, "t1");
  Rule r1{"r1", RuleType::Shall,
          Statement::conjunction(Statement::atom(b), Statement::constraint(c))};
  Rule r2{"r2", RuleType::Forbid, Statement::atom(a, "t3")};
  RuleLibrary lib = RuleLibrary::from_rules({r1, r2});
  REQUIRE(lib.events().size() == 2);
  CHECK(lib.events()[0].id == "b");
  CHECK(lib.events()[1].id == "a");
  REQUIRE(lib.timestamps().size() == 3);
  CHECK(lib.timestamps()[0].name == "t2");
  CHECK(lib.timestamps()[2].name == "t3");

  std::vector<std::size_t> second = {1};
  RuleLibrary sub = lib.subset(second);
  CHECK(sub.size() == 1);
  CHECK(sub.events().size() == 1);
  CHECK(sub.timestamps().size() == 1);
}

TEST_CASE("quantitative interpretations reject out-of-range values") {
  CHECK_THROWS_AS(QuantInterpretation({{"e", 1.5}}, {}), InvalidInterpretation);
  CHECK_THROWS_AS(QuantInterpretation({{"e", -0.1}}, {}), InvalidInterpretation);
  CHECK_THROWS_AS(QuantInterpretation({{"e", std::nan("")}}, {}), InvalidInterpretation);
  CHECK_THROWS_AS(QuantInterpretation({}, {{"t", Rational(-1)}}), InvalidInterpretation);
  CHECK_NOTHROW(QuantInterpretation({{"e", 0.0}, {"f", 1.0}}, {{"t", Rational(0)}}));
  CHECK_THROWS_AS(QualInterpretation({}, {{"t", Rational(-1, 2)}}), InvalidInterpretation);
}

TEST_CASE("event components are trimmed and must be non-empty") {
  CHECK(EventComponent::make(ComponentKind::Object, "  the   user \n").text == "the user");
  CHECK_THROWS_AS(EventComponent::make(ComponentKind::Object, " \t "), InvalidArgument);
}

TEST_CASE("rational helpers") {
  CHECK(parse_rational("3.5") == Rational(7, 2));
  CHECK(parse_rational("45") == Rational(45));
  CHECK(parse_rational("1/3") == Rational(1, 3));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK_THROWS_AS(parse_rational("1."), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidArgument);
  CHECK(rational_from_double(3.5) == Rational(7, 2));
  CHECK(rational_from_double(0.1) != Rational(1, 10));
  CHECK(rational_from_double(-6.0) == Rational(-6));
  CHECK(format_rational(Rational(7, 2)) == "3.5");
  CHECK(format_rational(Rational(-1, 8)) == "-0.125");
  CHECK(format_rational(Rational(1, 3)) == "1/3");
  CHECK(format_rational(Rational(12)) == "12");
}

TEST_CASE("linear expressions merge repeated variables") {
  LinearExpr e;
  e.add_term(2, "x");
  e.add_term(1, "y");
  e.add_term(-2, "x");
  REQUIRE(e.terms.size() == 2);
  CHECK(e.terms[0].coefficient == 0);
  e.add_constant(Rational(3, 2));
  auto value = e.evaluate([](const std::string& v) { return v == "y" ? Rational(4) : Rational(9); });
  CHECK(value == Rational(11, 2));
}
