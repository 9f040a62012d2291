#include <doctest.h>

#include "horae/data.hpp"
#include "horae/parser.hpp"
#include "horae/pipeline.hpp"
#include "support/generators.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <mutex>
#include <thread>

using namespace horae;
using namespace horae::pipeline;

namespace {

const std::string kR3 =
    "The collected information should include user behavior data, user preference data, or user "
    "transaction data.";
const std::string kR4 = "The response delay of orders shall not exceed 10mins.";

std::string fixture(const std::string& name) {
  return std::string(HORAE_TEST_DATA_DIR) + "/fixtures/" + name;
}

std::vector<std::string> texts(const std::vector<EventComponent>& parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) {
    out.push_back(p.text);
  }
  return out;
}

std::vector<ComponentKind> kinds(const std::vector<EventComponent>& parts) {
  std::vector<ComponentKind> out;
  for (const auto& p : parts) {
    out.push_back(p.kind);
  }
  return out;
}

// Backend that records prompts and answers from a function.
class ScriptedBackend final : public TransformerBackend {
public:
  explicit ScriptedBackend(std::function<std::string(const BackendRequest&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const BackendRequest& request) const override {
    {
      std::lock_guard lock(mutex_);
      prompts_.push_back(request.prompt);
    }
    return fn_(request);
  }
  std::vector<std::string> prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
  }

private:
  std::function<std::string(const BackendRequest&)> fn_;
  mutable std::mutex mutex_;
  mutable std::vector<std::string> prompts_;
};

} // namespace

TEST_CASE("prompts follow the templates byte for byte") {
  CHECK(event_extraction_prompt("Staff must wash hands.") ==
        "Please extract basic events of the following rule: Staff must wash hands.");
  CHECK(logic_extraction_prompt("R", {"x happens", "y happens"}) ==
        "Given the rule R with basic events A: x happens; B: y happens, provide the logical relation "
        "between these basic events");
  CHECK(pattern_matching_prompt("x happens") ==
        "Please determine the syntactic pattern of the basic event: x happens");

  testing::Generator gen(51);
  for (int i = 0; i < 200; ++i) {
    std::string rule = gen.fuzz_event("x").text();
    ScriptedBackend backend([](const BackendRequest& r) {
      switch (r.phase) {
      case Phase::EventExtraction: return std::string("first\nsecond");
      case Phase::LogicExtraction: return std::string("A & B");
      case Phase::PatternMatching: return std::string("other");
      }
      return std::string();
    });
    convert(rule, backend, {1, "r1"});
    auto prompts = backend.prompts();
    REQUIRE(prompts.size() == 4);
    REQUIRE(prompts[0] == "Please extract basic events of the following rule: " + rule);
    REQUIRE(prompts[1] == "Given the rule " + rule +
                              " with basic events A: first; B: second, provide the logical relation "
                              "between these basic events");
    REQUIRE(prompts[2] == "Please determine the syntactic pattern of the basic event: first");
    REQUIRE(prompts[3] == "Please determine the syntactic pattern of the basic event: second");
  }
}

TEST_CASE("event extraction") {
  MockBackend mock = MockBackend::from_file(fixture("mock_backend.json"));
  auto events = extract_events(kR3, mock);
  CHECK(events == std::vector<std::string>{"The collected information include user behavior data.",
                                           "The collected information include user preference data.",
                                           "The collected information include user transaction data."});
  CHECK_THROWS_AS(extract_events("   ", mock), InvalidArgument);
  ScriptedBackend blank([](const BackendRequest&) { return std::string(" \n ;\t\n"); });
  CHECK_THROWS_AS(extract_events("rule", blank), EmptyExtraction);
  ScriptedBackend listed([](const BackendRequest&) { return std::string("1. alpha\n- beta; * gamma\n2) delta"); });
  CHECK(extract_events("rule", listed) == std::vector<std::string>{"alpha", "beta", "gamma", "delta"});
  CHECK_THROWS_AS(extract_events("no such rule", mock), BackendError);
}

TEST_CASE("logic extraction") {
  MockBackend mock = MockBackend::from_file(fixture("mock_backend.json"));
  auto events = extract_events(kR3, mock);
  CHECK(extract_logic(kR3, events, mock).relation == "A | B | C");
  CHECK_FALSE(extract_logic(kR3, events, mock).rule_type);
  ScriptedBackend broken([](const BackendRequest&) { return std::string("A &"); });
  CHECK_THROWS_AS(extract_logic("r", {"x", "y"}, broken), data::RelationParseError);
  ScriptedBackend single([](const BackendRequest&) { return std::string("A"); });
  CHECK(extract_logic("r", {"x"}, single).relation == "A");
  ScriptedBackend typed([](const BackendRequest&) { return std::string("Should (A | B)"); });
  LogicResponse t = extract_logic("r", {"x", "y"}, typed);
  CHECK(t.relation == "(A | B)");
  CHECK(t.rule_type == RuleType::Should);
  ScriptedBackend range([](const BackendRequest&) { return std::string("A | C"); });
  CHECK_THROWS_AS(extract_logic("r", {"x", "y"}, range), data::LetterOutOfRange);
  CHECK_THROWS_AS(extract_logic("r", {}, single), InvalidArgument);
}

TEST_CASE("pattern matching") {
  MockBackend mock = MockBackend::from_file(fixture("mock_backend.json"));
  auto labels = match_patterns({"The collected information include user behavior data."}, mock);
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].kind == PatternKind::ObjActObj);
  CHECK_FALSE(labels[0].warning);

  ScriptedBackend mystery([](const BackendRequest&) { return std::string("mystery-pattern"); });
  auto m = match_patterns({"x"}, mystery);
  CHECK(m[0].kind == PatternKind::Other);
  REQUIRE(m[0].warning);
  CHECK(m[0].warning->find("mystery-pattern") != std::string::npos);

  // Order is preserved and in-flight requests stay within the limit.
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  ScriptedBackend slow([&](const BackendRequest& r) {
    int now = ++in_flight;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    --in_flight;
    std::string event = r.prompt.substr(r.prompt.rfind(": ") + 2);
    return event == "b" ? std::string("Act-Obj") : event == "c" ? std::string("obj-act.") : std::string("other");
  });
  std::vector<std::string> events = {"a", "b", "c", "d", "e", "f", "g", "h"};
  auto ordered = match_patterns(events, slow, 3);
  REQUIRE(ordered.size() == 8);
  CHECK(ordered[1].kind == PatternKind::ActObj);
  CHECK(ordered[2].kind == PatternKind::ObjAct);
  CHECK(ordered[0].kind == PatternKind::Other);
  CHECK(peak.load() <= 3);
  CHECK(peak.load() >= 2);
  CHECK_THROWS_AS(match_patterns({}, slow), InvalidArgument);
}

TEST_CASE("rule type heuristic") {
  CHECK(detect_rule_type("Employees must wash hands.") == RuleType::Shall);
  CHECK(detect_rule_type("Staff shall wear gloves.") == RuleType::Shall);
  CHECK(detect_rule_type(kR3) == RuleType::Should);
  CHECK(detect_rule_type("It is recommended to back up daily.") == RuleType::Should);
  CHECK(detect_rule_type("Smoking is prohibited.") == RuleType::Forbid);
  CHECK(detect_rule_type("Staff cannot share passwords.") == RuleType::Forbid);
  CHECK(detect_rule_type("Visitors must not enter the lab.") == RuleType::Forbid);
  CHECK(detect_rule_type(kR4) == RuleType::Shall);
  CHECK(detect_rule_type("The fee is no more than 5 dollars.") == std::nullopt);
  CHECK(detect_rule_type("Refunds are issued within a week.") == std::nullopt);
}

TEST_CASE("comparator phrases") {
  auto c = find_comparator(words(kR4));
  REQUIRE(c);
  CHECK(c->comparator == Comparator::Le);
  CHECK(c->begin == 5);
  CHECK(c->phrase_begin == 6);
  CHECK(c->end == 8);
  CHECK(find_comparator(words("speed is at least 5"))->comparator == Comparator::Ge);
  CHECK(find_comparator(words("speed exceeds 5"))->comparator == Comparator::Gt);
  CHECK(find_comparator(words("speed is less than 5"))->comparator == Comparator::Lt);
  CHECK(find_comparator(words("speed is not less than 5"))->comparator == Comparator::Ge);
  CHECK(find_comparator(words("speed equals 5"))->comparator == Comparator::Eq);
  CHECK_FALSE(find_comparator(words("staff wash hands")));
}

TEST_CASE("componentize") {
  std::vector<std::string> warnings;
  BasicEvent r3 = componentize("e1", "The collected information include user behavior data.",
                               PatternKind::ObjActObj, warnings);
  CHECK(texts(r3.components) ==
        std::vector<std::string>{"The collected information", "include", "user behavior data"});
  CHECK(r3.pattern.kind == PatternKind::ObjActObj);

  BasicEvent r4 = componentize("e1", "The response delay of orders shall not exceed 10mins",
                               PatternKind::ObjAttrCmpVal, warnings);
  CHECK(kinds(r4.components) ==
        std::vector<ComponentKind>{ComponentKind::Object, ComponentKind::Attribute, ComponentKind::Value});
  CHECK(texts(r4.components) == std::vector<std::string>{"orders", "response delay", "10mins"});
  CHECK(r4.comparator == Comparator::Le);
  CHECK(r4.pattern == EventPattern{PatternKind::ObjAttrCmpVal, Comparator::Le});
  CHECK(warnings.empty());

  BasicEvent oa = componentize("e1", "leave is granted", PatternKind::ObjAct, warnings);
  CHECK(texts(oa.components) == std::vector<std::string>{"leave", "is granted"});
  BasicEvent ao = componentize("e1", "wash hands", PatternKind::ActObj, warnings);
  CHECK(texts(ao.components) == std::vector<std::string>{"wash", "hands"});
  BasicEvent aa = componentize("e1", "respond time is below 5 minutes", PatternKind::ActAttrCmpVal, warnings);
  CHECK(aa.pattern == EventPattern{PatternKind::ActAttrCmpVal, Comparator::Lt});
  CHECK(texts(aa.components) == std::vector<std::string>{"respond", "time", "5 minutes"});
  CHECK(warnings.empty());

  BasicEvent guessed = componentize("e1", "zebra quux", PatternKind::ObjAct, warnings);
  CHECK(guessed.pattern.kind == PatternKind::ObjAct);
  CHECK(warnings.size() == 1);
  BasicEvent failed = componentize("e1", "temperature high", PatternKind::ObjAttrCmpVal, warnings);
  CHECK(failed.pattern.kind == PatternKind::Other);
  CHECK(texts(failed.components) == std::vector<std::string>{"temperature high"});
  CHECK(warnings.size() == 2);
  BasicEvent other = componentize("e1", "anything at all", PatternKind::Other, warnings);
  CHECK(other.components.size() == 1);
  CHECK(warnings.size() == 2);
}

TEST_CASE("convert the two dataset examples") {
  MockBackend mock = MockBackend::from_file(fixture("mock_backend.json"));
  ConversionResult r3 = convert(kR3, mock);
  CHECK(r3.rule.type == RuleType::Should);
  CHECK(r3.rule_type_source == RuleTypeSource::KeywordHeuristic);
  REQUIRE(r3.events.size() == 3);
  Statement e1 = Statement::atom(r3.events[0]);
  Statement e2 = Statement::atom(r3.events[1]);
  Statement e3 = Statement::atom(r3.events[2]);
  CHECK(r3.rule.statement == Statement::disjunction(Statement::disjunction(e1, e2), e3));
  CHECK(r3.events[0].id == "e1");
  CHECK(r3.relation == "A | B | C");
  CHECK(r3.labels == std::vector<PatternKind>(3, PatternKind::ObjActObj));
  CHECK(r3.patterns == std::vector<EventPattern>(3, EventPattern{PatternKind::ObjActObj, std::nullopt}));
  CHECK(r3.warnings.empty());
  CHECK(parser::print_rule(r3.rule) ==
        "should {object:\"The collected information\" action:\"include\" object:\"user behavior data\"} | "
        "{object:\"The collected information\" action:\"include\" object:\"user preference data\"} | "
        "{object:\"The collected information\" action:\"include\" object:\"user transaction data\"}");

  ConversionResult r4 = convert(kR4, mock);
  CHECK(r4.rule.type == RuleType::Shall);
  REQUIRE(r4.events.size() == 1);
  CHECK(r4.rule.statement == Statement::atom(r4.events[0]));
  CHECK(r4.events[0].comparator == Comparator::Le);
  CHECK(r4.events[0].components.back().text == "10mins");
  CHECK(r4.patterns[0] == EventPattern{PatternKind::ObjAttrCmpVal, Comparator::Le});

  CHECK(convert(kR3, mock) == r3);
  nlohmann::json doc = nlohmann::json::parse(conversion_to_json(r4));
  CHECK(doc["type"] == "shall");
  CHECK(doc["events"][0]["pattern"] == "obj-attr-cmp-val");
  CHECK(parser::parse_rule(doc["rule"].get<std::string>()) == r4.rule);
}

TEST_CASE("convert rejects relations that skip events") {
  ScriptedBackend skip([](const BackendRequest& r) {
    switch (r.phase) {
    case Phase::EventExtraction: return std::string("x happens\ny happens");
    case Phase::LogicExtraction: return std::string("A");
    default: return std::string("other");
    }
  });
  CHECK_THROWS_AS(convert("shall x", skip), AssemblyError);
}

TEST_CASE("random conversions reparse and are deterministic") {
  testing::Generator gen(52);
  const std::vector<std::pair<std::string, std::string>> templates = {
      {"the {n} {v}", "obj-act"},
      {"the {n} {v} the {m}", "obj-act-obj"},
      {"the {a} of the {n} is at most {k}", "obj-attr-cmp-val"},
      {"{v} the {m}", "act-obj"},
      {"{n} \"quoted\" {m}", "other"},
      {"{n} misc", "mystery"}};
  const std::vector<std::string> nouns = {"server", "manager", "driver", "order", "ticket", "clinic"};
  const std::vector<std::string> verbs = {"approves", "opens", "sends", "records", "checks", "reviews"};
  const std::vector<std::string> attrs = {"delay", "size", "price", "temperature"};
  for (int i = 0; i < 150; ++i) {
    std::size_t n = static_cast<std::size_t>(gen.uniform(1, 5));
    std::vector<std::string> events;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& [tpl, label] = gen.pick(templates);
      std::string text = tpl;
      auto fill = [&](const std::string& key, const std::string& value) {
        for (auto at = text.find(key); at != std::string::npos; at = text.find(key)) {
          text.replace(at, key.size(), value);
        }
      };
      fill("{n}", gen.pick(nouns) + std::to_string(k));
      fill("{m}", gen.pick(nouns));
      fill("{v}", gen.pick(verbs));
      fill("{a}", gen.pick(attrs));
      fill("{k}", std::to_string(gen.uniform(1, 99)));
      events.push_back(text);
      labels.push_back(label);
    }
    // A relation that uses every letter once, with random connectives.
    std::string relation = "A";
    for (std::size_t k = 1; k < n; ++k) {
      std::string next = std::string(gen.coin() ? "!" : "") + static_cast<char>('A' + k);
      const char* ops[] = {" & ", " | ", " -> "};
      relation = gen.coin() ? "(" + relation + ")" + ops[gen.uniform(0, 2)] + next
                            : next + ops[gen.uniform(0, 2)] + relation;
    }
    std::string rule = "Rule " + std::to_string(i) + (gen.coin() ? " must hold." : " should hold.");
    std::map<std::string, std::string> responses;
    std::string joined;
    for (const auto& e : events) {
      joined += e + "\n";
    }
    responses[event_extraction_prompt(rule)] = joined;
    responses[logic_extraction_prompt(rule, events)] = relation;
    for (std::size_t k = 0; k < n; ++k) {
      responses[pattern_matching_prompt(events[k])] = labels[k];
    }
    MockBackend mock(responses);
    ConversionResult r = convert(rule, mock);
    REQUIRE(parser::parse_rule(parser::print_rule(r.rule)) == r.rule);
    REQUIRE(convert(rule, mock, {1, "r1"}) == r);
    REQUIRE(r.events.size() == n);
    REQUIRE(r.patterns.size() == n);
    REQUIRE(r.labels.size() == n);
    // Letter k is bound to the k-th event.
    Statement expected = data::bind_relation(data::parse_relation(relation, n), r.events);
    REQUIRE(parser::print_statement(expected) == parser::print_statement(r.rule.statement));
  }
}

namespace {

class CompletionServer {
public:
  CompletionServer() {
    server_.Post("/v1/complete", [this](const httplib::Request& req, httplib::Response& res) {
      int n = ++attempts_;
      if (req.get_header_value("Authorization") != "Bearer tok") {
        res.status = 401;
        return;
      }
      std::string prompt = nlohmann::json::parse(req.body).at("prompt");
      if (prompt == "flaky" && n < 3) {
        res.status = 503;
        return;
      }
      if (prompt == "bad request") {
        res.status = 400;
        return;
      }
      if (prompt == "garbled") {
        res.set_content("{\"txt\": 1}", "application/json");
        return;
      }
      res.set_content(nlohmann::json{{"text", "echo: " + prompt}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~CompletionServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int attempts() const { return attempts_; }
  void reset() { attempts_ = 0; }

private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> attempts_{0};
};

} // namespace

TEST_CASE("http backend") {
  CompletionServer server;
  HttpBackendConfig config{server.url(), "tok", std::chrono::milliseconds(5000), 3, std::chrono::milliseconds(5)};
  HttpBackend backend(config);
  CHECK(backend.complete({Phase::EventExtraction, "hello"}) == "echo: hello");
  CHECK(server.attempts() == 1);

  server.reset();
  CHECK(backend.complete({Phase::EventExtraction, "flaky"}) == "echo: flaky");
  CHECK(server.attempts() == 3);

  server.reset();
  CHECK_THROWS_AS(backend.complete({Phase::LogicExtraction, "bad request"}), BackendError);
  CHECK(server.attempts() == 1);
  CHECK_THROWS_AS(backend.complete({Phase::LogicExtraction, "garbled"}), BackendError);

  HttpBackend wrong({server.url(), "nope", std::chrono::milliseconds(5000), 3, std::chrono::milliseconds(5)});
  CHECK_THROWS_AS(wrong.complete({Phase::EventExtraction, "hello"}), BackendError);

  HttpBackend offline({"http://127.0.0.1:1", "", std::chrono::milliseconds(500), 2, std::chrono::milliseconds(1)});
  try {
    convert(kR3, offline);
    FAIL("expected BackendError");
  } catch (const BackendError& err) {
    std::string what = err.what();
    CHECK(what.find("transport error") != std::string::npos);
    CHECK(what.find("3 attempts") != std::string::npos);
  }
  CHECK_THROWS_AS(HttpBackend({"", "", std::chrono::milliseconds(1), 3, std::chrono::milliseconds(1)}),
                  InvalidArgument);
}

TEST_CASE("configuration from the environment") {
  ::setenv("HORAE_BACKEND_URL", "http://localhost:9", 1);
  ::setenv("HORAE_BACKEND_TOKEN", "abc", 1);
  ::setenv("HORAE_BACKEND_TIMEOUT_MS", "1500", 1);
  ::setenv("HORAE_CONCURRENCY", "7", 1);
  HttpBackendConfig c = HttpBackendConfig::from_env();
  CHECK(c.base_url == "http://localhost:9");
  CHECK(c.token == "abc");
  CHECK(c.timeout == std::chrono::milliseconds(1500));
  CHECK(c.retries == 3);
  CHECK(c.initial_backoff == std::chrono::milliseconds(250));
  CHECK(concurrency_from_env() == 7);
  ::setenv("HORAE_CONCURRENCY", "zero", 1);
  CHECK(concurrency_from_env() == kDefaultConcurrency);
  ::setenv("HORAE_BACKEND_TIMEOUT_MS", "-3", 1);
  CHECK_THROWS_AS(HttpBackendConfig::from_env(), InvalidArgument);
  for (const char* name : {"HORAE_BACKEND_URL", "HORAE_BACKEND_TOKEN", "HORAE_BACKEND_TIMEOUT_MS", "HORAE_CONCURRENCY"}) {
    ::unsetenv(name);
  }
  CHECK(HttpBackendConfig::from_env().timeout == std::chrono::milliseconds(30000));
}
