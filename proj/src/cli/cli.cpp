#include "horae/cli.hpp"

#include "horae/abstraction.hpp"
#include "horae/consistency.hpp"
#include "horae/data.hpp"
#include "horae/parser.hpp"
#include "horae/pipeline.hpp"
#include "horae/semantics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

namespace horae::cli {

namespace {

using nlohmann::json;

/// Bad flag combinations or unusable input files.
class UsageError : public Error {
public:
  using Error::Error;
};

struct Options {
  std::string format = "human";
  std::string input;
  std::string mode = "qual";
  std::string abstraction_file;
  double threshold = abstraction::kDefaultThreshold;
  bool threshold_set = false;
  std::string assign_file;
  bool exact = false;
  std::string provider;
  std::string pairs_file;
  std::string url;
  std::string pred_file;
  std::string gold_file;
  std::string similarity = "lexical";
  std::string backend;
  std::string fixture;
  std::string report_file;
};

bool json_output(const Options& o) { return o.format == "json"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UsageError("cannot read " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& err) {
    throw UsageError(path + " is not valid JSON: " + err.what());
  }
}

RuleLibrary load_library(const std::string& path) {
  std::string src = read_file(path);
  try {
    return parser::parse_library(src);
  } catch (const parser::ParseError& err) {
    throw UsageError(path + ":" + std::to_string(err.line()) + ":" + std::to_string(err.column()) +
                     ": " + err.detail());
  }
}

std::string format_probability(double p) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", p);
  return buffer;
}

std::string event_label(const RuleLibrary& lib, const std::string& id) {
  const BasicEvent* e = lib.find_event(id);
  return e ? parser::print_event(*e) : id;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    out += (k ? sep : "") + items[k];
  }
  return out;
}

// Embedding service settings share the backend environment variables.
abstraction::EmbeddingConfig embedding_config(const std::string& url) {
  pipeline::HttpBackendConfig env = pipeline::HttpBackendConfig::from_env();
  abstraction::EmbeddingConfig config;
  config.base_url = url.empty() ? env.base_url : url;
  config.token = env.token;
  config.timeout = env.timeout;
  if (config.base_url.empty()) {
    throw UsageError("embedding needs --url or HORAE_BACKEND_URL");
  }
  return config;
}

json event_json(const BasicEvent& e) {
  json components = json::array();
  for (const auto& c : e.components) {
    components.push_back({{"kind", to_string(c.kind)}, {"text", c.text}});
  }
  json doc = {{"id", e.id},
              {"text", e.text()},
              {"pattern", to_string(e.pattern.kind)},
              {"components", components}};
  if (e.comparator) {
    doc["comparator"] = to_string(*e.comparator);
  }
  return doc;
}

json library_json(const RuleLibrary& lib) {
  json rules = json::array();
  for (const auto& r : lib.rules()) {
    rules.push_back({{"id", r.id},
                     {"type", to_string(r.type)},
                     {"statement", parser::print_statement(r.statement)},
                     {"events", event_ids(r.statement)},
                     {"timestamps", timestamp_names(r.statement)}});
  }
  json events = json::array();
  for (const auto& e : lib.events()) {
    events.push_back(event_json(e));
  }
  json timestamps = json::array();
  for (const auto& t : lib.timestamps()) {
    timestamps.push_back(t.name);
  }
  return {{"rules", rules}, {"events", events}, {"timestamps", timestamps}};
}

json abstraction_json(const abstraction::AbstractionResult& a) {
  json classes = json::array();
  for (std::size_t c = 0; c < a.class_count(); ++c) {
    json members = json::array();
    for (const auto& id : a.members(c)) {
      members.push_back({{"event", id}, {"polarity", a.class_of.at(id).polarity}});
    }
    classes.push_back({{"id", c}, {"representative", a.representatives[c]}, {"members", members}});
  }
  return {{"class_count", a.class_count()}, {"classes", classes}};
}

void print_abstraction(std::ostream& out, const abstraction::AbstractionResult& a) {
  for (std::size_t c = 0; c < a.class_count(); ++c) {
    out << "class " << c << " [" << a.representatives[c] << "]:";
    for (const auto& id : a.members(c)) {
      out << ' ' << (a.class_of.at(id).polarity < 0 ? "!" : "") << id;
    }
    out << '\n';
  }
}

std::optional<abstraction::AbstractionResult> table_abstraction(const RuleLibrary& lib, const Options& o) {
  if (o.abstraction_file.empty()) {
    return std::nullopt;
  }
  auto provider = abstraction::TableProvider::from_file(o.abstraction_file);
  return abstraction::abstract_events(lib, provider, o.threshold, pipeline::concurrency_from_env());
}

void require_abstraction_for_threshold(const Options& o) {
  if (o.threshold_set && o.abstraction_file.empty()) {
    throw UsageError("--threshold only applies together with --abstraction");
  }
}

int cmd_parse(const Options& o, std::ostream& out) {
  RuleLibrary lib = load_library(o.input);
  if (json_output(o)) {
    out << library_json(lib).dump(2) << '\n';
  } else {
    out << parser::print_library(lib);
  }
  return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  require_abstraction_for_threshold(o);
  RuleLibrary lib = load_library(o.input);
  auto abs = table_abstraction(lib, o);
  const abstraction::AbstractionResult* a = abs ? &*abs : nullptr;
  consistency::ConsistencyReport report = o.mode == "quant" ? consistency::check_quantitative(lib, a)
                                                           : consistency::check_qualitative(lib, a);
  bool consistent = report.verdict == consistency::Verdict::Consistent;

  if (json_output(o)) {
    json doc = {{"verdict", to_string(report.verdict)}, {"mode", to_string(report.mode)}};
    if (abs) {
      doc["abstraction"] = abstraction_json(*abs);
    }
    json witness = nullptr;
    if (report.qual_witness) {
      witness = {{"events", report.qual_witness->events()}, {"timestamps", json::object()}};
      for (const auto& [name, value] : report.qual_witness->timestamps()) {
        witness["timestamps"][name] = format_rational(value);
      }
    } else if (report.quant_witness) {
      witness = {{"events", report.quant_witness->events()}, {"timestamps", json::object()}};
      for (const auto& [name, value] : report.quant_witness->timestamps()) {
        witness["timestamps"][name] = format_rational(value);
      }
    }
    doc["witness"] = witness;
    doc["conflict_core"] = report.conflict_core ? json(*report.conflict_core) : json(nullptr);
    out << doc.dump(2) << '\n';
  } else {
    out << to_string(report.verdict) << " (" << to_string(report.mode) << ")\n";
    if (abs) {
      out << "abstraction: " << abs->class_count() << " classes over " << lib.events().size()
          << " events\n";
    }
    if (report.conflict_core) {
      out << "conflict core: " << join(*report.conflict_core, ", ") << '\n';
    }
    if (report.qual_witness) {
      out << "witness:\n";
      for (const auto& [id, value] : report.qual_witness->events()) {
        out << "  " << id << " = " << (value ? "true" : "false") << "  " << event_label(lib, id) << '\n';
      }
      for (const auto& [name, value] : report.qual_witness->timestamps()) {
        out << "  " << name << " = " << format_rational(value) << '\n';
      }
    }
    if (report.quant_witness) {
      out << "witness:\n";
      for (const auto& [id, value] : report.quant_witness->events()) {
        out << "  " << id << " = " << format_probability(value) << "  " << event_label(lib, id) << '\n';
      }
      for (const auto& [name, value] : report.quant_witness->timestamps()) {
        out << "  " << name << " = " << format_rational(value) << '\n';
      }
    }
  }
  return consistent ? kExitOk : kExitNegative;
}

// An assignment key names an event by id or, failing that, by its text.
std::optional<std::string> resolve_event(const RuleLibrary& lib, const std::string& key) {
  if (lib.find_event(key)) {
    return key;
  }
  std::optional<std::string> found;
  for (const auto& e : lib.events()) {
    if (e.text() == key) {
      if (found) {
        throw UsageError("event text '" + key + "' is ambiguous, use an event id");
      }
      found = e.id;
    }
  }
  return found;
}

Rational json_rational(const json& value, const std::string& what) {
  if (value.is_string()) {
    return parse_rational(value.get<std::string>());
  }
  if (value.is_number()) {
    return rational_from_double(value.get<double>());
  }
  throw UsageError(what + " must be a number or a fraction string");
}

int cmd_prob(const Options& o, std::ostream& out, std::ostream& err) {
  RuleLibrary lib = load_library(o.input);
  json doc = read_json(o.assign_file);
  if (!doc.is_object()) {
    throw UsageError(o.assign_file + ": expected {\"events\": {...}, \"timestamps\": {...}}");
  }
  QuantInterpretation interp;
  if (doc.contains("events")) {
    for (const auto& [key, value] : doc.at("events").items()) {
      auto id = resolve_event(lib, key);
      if (!id) {
        err << "note: " << o.assign_file << ": no event '" << key << "' in the library, ignored\n";
        continue;
      }
      interp.set_event(*id, rational_to_double(json_rational(value, "probability of " + key)));
    }
  }
  if (doc.contains("timestamps")) {
    for (const auto& [key, value] : doc.at("timestamps").items()) {
      if (!lib.has_timestamp(key)) {
        err << "note: " << o.assign_file << ": no timestamp '" << key << "' in the library, ignored\n";
        continue;
      }
      interp.set_timestamp(key, json_rational(value, "timestamp " + key));
    }
  }

  double product = 1.0;
  json rules = json::array();
  for (const auto& r : lib.rules()) {
    double p = o.exact ? semantics::pr_exact(r.statement, interp) : semantics::pr_statement(r.statement, interp);
    product *= p;
    rules.push_back({{"id", r.id}, {"probability", p}});
  }
  if (json_output(o)) {
    out << json{{"probability", product}, {"method", o.exact ? "exact" : "recursive"}, {"rules", rules}}.dump(2)
        << '\n';
  } else {
    out << format_probability(product) << '\n';
  }
  return kExitOk;
}

int cmd_emit(const Options& o, std::ostream& out) {
  require_abstraction_for_threshold(o);
  RuleLibrary lib = load_library(o.input);
  auto abs = table_abstraction(lib, o);
  out << consistency::emit_smtlib(lib, abs ? &*abs : nullptr);
  return kExitOk;
}

int cmd_abstract(const Options& o, std::ostream& out) {
  if ((o.provider == "table") != !o.pairs_file.empty()) {
    throw UsageError("--pairs is required with --provider table and only valid there");
  }
  if (!o.url.empty() && o.provider != "embed") {
    throw UsageError("--url only applies to --provider embed");
  }
  std::unique_ptr<abstraction::SimilarityProvider> provider;
  if (o.provider == "table") {
    provider = std::make_unique<abstraction::TableProvider>(abstraction::TableProvider::from_file(o.pairs_file));
  } else if (o.provider == "embed") {
    provider = std::make_unique<abstraction::EmbeddingProvider>(embedding_config(o.url));
  } else {
    provider = std::make_unique<abstraction::LexicalProvider>();
  }
  RuleLibrary lib = load_library(o.input);
  auto result = abstraction::abstract_events(lib, *provider, o.threshold, pipeline::concurrency_from_env());
  if (json_output(o)) {
    out << abstraction_json(result).dump(2) << '\n';
  } else {
    out << result.class_count() << " classes over " << lib.events().size() << " events\n";
    print_abstraction(out, result);
  }
  return kExitOk;
}

std::vector<data::Record> load_records(const std::string& path) {
  std::string text = read_file(path);
  return data::load_dataset(text);
}

int cmd_validate(const Options& o, std::ostream& out) {
  std::vector<data::Record> records = load_records(o.input);
  std::map<std::string, std::size_t> shapes{{"validation", 0}, {"composite", 0}, {"single-event", 0}};
  for (const auto& r : records) {
    ++shapes[std::string(data::shape_name(r))];
  }
  if (json_output(o)) {
    out << json{{"valid", true}, {"records", records.size()}, {"shapes", shapes}}.dump(2) << '\n';
  } else {
    out << "valid: " << records.size() << " records (" << shapes["validation"] << " validation, "
        << shapes["composite"] << " composite, " << shapes["single-event"] << " single-event)\n";
  }
  return kExitOk;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  if (!o.url.empty() && o.similarity != "embed") {
    throw UsageError("--url only applies to --similarity embed");
  }
  std::vector<data::EventScope> scopes = data::pair_scopes(load_records(o.pred_file), load_records(o.gold_file));
  data::Similarity sim;
  if (o.similarity == "embed") {
    std::set<std::string> unique;
    for (const auto& s : scopes) {
      unique.insert(s.generated.begin(), s.generated.end());
      unique.insert(s.gold.begin(), s.gold.end());
    }
    std::vector<std::string> texts(unique.begin(), unique.end());
    abstraction::EmbeddingProvider provider(embedding_config(o.url));
    std::vector<std::vector<double>> vectors = texts.empty() ? std::vector<std::vector<double>>{}
                                                             : provider.embed(texts);
    auto table = std::make_shared<std::map<std::string, std::vector<double>>>();
    for (std::size_t k = 0; k < texts.size(); ++k) {
      (*table)[texts[k]] = vectors[k];
    }
    sim = [table](const std::string& a, const std::string& b) {
      return abstraction::cosine_similarity(table->at(a), table->at(b));
    };
  }
  data::MetricsReport report = data::scoped_event_metrics(scopes, sim);
  if (json_output(o)) {
    out << data::metrics_to_json(report);
  } else {
    out << "precision " << format_probability(report.precision) << '\n'
        << "recall " << format_probability(report.recall) << '\n'
        << "f1 " << format_probability(report.f1) << '\n'
        << "events " << report.generated_count << " generated, " << report.gold_count << " gold\n";
  }
  return kExitOk;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

int cmd_convert(const Options& o, std::ostream& out, std::ostream& err) {
  if ((o.backend == "mock") != !o.fixture.empty()) {
    throw UsageError("--fixture is required with --backend mock and only valid there");
  }
  std::unique_ptr<pipeline::TransformerBackend> backend;
  if (o.backend == "mock") {
    backend = std::make_unique<pipeline::MockBackend>(pipeline::MockBackend::from_file(o.fixture));
  } else {
    backend = std::make_unique<pipeline::HttpBackend>(pipeline::HttpBackendConfig::from_env());
  }
  std::istringstream lines(read_file(o.input));
  std::vector<pipeline::ConversionResult> results;
  std::vector<std::string> originals;
  bool failed = false;
  std::string line;
  for (std::size_t number = 1; std::getline(lines, line); ++number) {
    std::string text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    std::string where = o.input + ":" + std::to_string(number) + ": ";
    try {
      pipeline::ConvertOptions options{pipeline::concurrency_from_env(),
                                       "r" + std::to_string(results.size() + 1)};
      results.push_back(pipeline::convert(text, *backend, options));
      originals.push_back(text);
      for (const auto& w : results.back().warnings) {
        err << where << "warning: " << w << '\n';
      }
    } catch (const Error& e) {
      err << where << "error: " << e.what() << '\n';
      failed = true;
    }
  }

  if (!o.report_file.empty()) {
    json reports = json::array();
    for (const auto& r : results) {
      reports.push_back(json::parse(pipeline::conversion_to_json(r)));
    }
    std::ofstream report(o.report_file, std::ios::binary);
    if (!report) {
      throw UsageError("cannot write " + o.report_file);
    }
    report << reports.dump(2) << '\n';
  }

  if (json_output(o)) {
    std::vector<data::Record> records;
    for (std::size_t k = 0; k < results.size(); ++k) {
      data::ValidationRecord record{originals[k], {}, results[k].relation, {}};
      for (std::size_t j = 0; j < results[k].events.size(); ++j) {
        record.basic_events.push_back(results[k].extracted[j]);
        record.syntactic_patterns.emplace_back(to_string(results[k].labels[j]));
      }
      records.emplace_back(std::move(record));
    }
    out << data::serialize_dataset(records);
  } else {
    std::string text;
    for (const auto& r : results) {
      text += r.rule.id + ": " + parser::print_rule(r.rule) + ";\n";
    }
    out << parser::print_library(parser::parse_library(text));
  }
  return failed ? kExitUsage : kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  std::function<int()> action;

  CLI::App app{"Check, abstract, and convert temporal rule libraries", "horae"};
  app.require_subcommand(1);
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"human", "json"}));
  };
  auto add_input = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("file", o.input, what)->required();
  };
  auto add_table = [&](CLI::App* sub) {
    sub->add_option("--abstraction", o.abstraction_file, "Pair judgments (JSON) to merge events");
    sub->add_option("--threshold", o.threshold, "Minimum judgment score to merge")
        ->each([&](const std::string&) { o.threshold_set = true; });
  };

  auto* parse = app.add_subcommand("parse", "Parse a rule file and pretty-print it");
  add_input(parse, "Rule file (.hor)");
  add_format(parse);
  parse->callback([&] { action = [&] { return cmd_parse(o, out); }; });

  auto* check = app.add_subcommand("check", "Check a rule library for consistency");
  add_input(check, "Rule file (.hor)");
  check->add_option("--mode", o.mode, "qual or quant")->check(CLI::IsMember({"qual", "quant"}));
  add_table(check);
  add_format(check);
  check->callback([&] { action = [&] { return cmd_check(o, out); }; });

  auto* prob = app.add_subcommand("prob", "Probability of a rule library under an assignment");
  add_input(prob, "Rule file (.hor)");
  prob->add_option("--assign", o.assign_file, "Event probabilities and timestamps (JSON)")->required();
  prob->add_flag("--exact", o.exact, "Enumerate event assignments instead of recursing");
  add_format(prob);
  prob->callback([&] { action = [&] { return cmd_prob(o, out, err); }; });

  auto* emit = app.add_subcommand("emit-smt", "Write the library as an SMT-LIB2 script");
  add_input(emit, "Rule file (.hor)");
  add_table(emit);
  emit->callback([&] { action = [&] { return cmd_emit(o, out); }; });

  auto* abstract = app.add_subcommand("abstract", "Group events into shared propositions");
  add_input(abstract, "Rule file (.hor)");
  abstract->add_option("--provider", o.provider, "lexical, table or embed")
      ->required()
      ->check(CLI::IsMember({"lexical", "table", "embed"}));
  abstract->add_option("--pairs", o.pairs_file, "Pair judgments (JSON) for the table provider");
  abstract->add_option("--url", o.url, "Embedding service base URL");
  abstract->add_option("--threshold", o.threshold, "Minimum judgment score to merge");
  add_format(abstract);
  abstract->callback([&] { action = [&] { return cmd_abstract(o, out); }; });

  auto* dataset = app.add_subcommand("dataset", "Dataset utilities");
  dataset->require_subcommand(1);
  auto* validate = dataset->add_subcommand("validate", "Validate a rule dataset file");
  add_input(validate, "Dataset (JSON)");
  add_format(validate);
  validate->callback([&] { action = [&] { return cmd_validate(o, out); }; });

  auto* metrics = app.add_subcommand("metrics", "Score predicted events against gold events");
  metrics->add_option("--pred", o.pred_file, "Predicted dataset (JSON)")->required();
  metrics->add_option("--gold", o.gold_file, "Gold dataset (JSON)")->required();
  metrics->add_option("--similarity", o.similarity, "lexical or embed")
      ->check(CLI::IsMember({"lexical", "embed"}));
  metrics->add_option("--url", o.url, "Embedding service base URL");
  add_format(metrics);
  metrics->callback([&] { action = [&] { return cmd_metrics(o, out); }; });

  auto* convert = app.add_subcommand("convert", "Convert natural-language rules into rule syntax");
  add_input(convert, "Rules, one per line");
  convert->add_option("--backend", o.backend, "mock or http")
      ->required()
      ->check(CLI::IsMember({"mock", "http"}));
  convert->add_option("--fixture", o.fixture, "Prompt-to-response map (JSON) for the mock backend");
  convert->add_option("--report", o.report_file, "Write per-rule conversion reports (JSON) here");
  add_format(convert);
  convert->callback([&] { action = [&] { return cmd_convert(o, out, err); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

} // namespace horae::cli
