#include "horae/data.hpp"

#include "horae/parser.hpp"
#include "parser/statement_parser.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace horae::data {

using nlohmann::json;

namespace {

constexpr const char* kRule = "original rule";
constexpr const char* kEvents = "basic events";
constexpr const char* kRelation = "logical relation";
constexpr const char* kPatterns = "syntactic patterns";

std::string get_string(const json& obj, const char* key, std::size_t index) {
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw SchemaError(index, std::string("\"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

std::vector<std::string> get_strings(const json& obj, const char* key, std::size_t index) {
  const json& v = obj.at(key);
  if (!v.is_array()) {
    throw SchemaError(index, std::string("\"") + key + "\" must be an array of strings");
  }
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) {
      throw SchemaError(index, std::string("\"") + key + "\" must be an array of strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

void check_events(const std::vector<std::string>& events, std::size_t index) {
  if (events.size() > kMaxRelationEvents) {
    throw SchemaError(index, "more than 26 basic events");
  }
}

void check_relation(const std::string& relation, std::size_t events, std::size_t index) {
  try {
    parse_relation(relation, events);
  } catch (const RelationParseError& err) {
    throw SchemaError(index, std::string("logical relation: ") + err.what());
  } catch (const LetterOutOfRange& err) {
    throw SchemaError(index, std::string("logical relation: ") + err.what());
  }
}

void check_patterns(const std::vector<std::string>& patterns, std::size_t events, std::size_t index) {
  if (patterns.size() != events) {
    throw LengthMismatch(index, events, patterns.size());
  }
  for (const auto& p : patterns) {
    if (!pattern_kind_from_string(p)) {
      throw SchemaError(index, "unknown syntactic pattern '" + p + "'");
    }
  }
}

Record read_record(const json& obj, std::size_t index) {
  if (!obj.is_object()) {
    throw SchemaError(index, "expected a JSON object");
  }
  std::set<std::string> keys;
  for (const auto& [key, value] : obj.items()) {
    keys.insert(key);
  }
  const std::set<std::string> validation{kRule, kEvents, kRelation, kPatterns};
  const std::set<std::string> composite{kRule, kEvents, kRelation};
  const std::set<std::string> single{kEvents, kPatterns};
  for (const auto& key : keys) {
    if (!validation.contains(key)) {
      throw SchemaError(index, "unknown key \"" + key + "\"");
    }
  }
  if (keys == validation) {
    ValidationRecord r{get_string(obj, kRule, index), get_strings(obj, kEvents, index),
                       get_string(obj, kRelation, index), get_strings(obj, kPatterns, index)};
    check_events(r.basic_events, index);
    check_patterns(r.syntactic_patterns, r.basic_events.size(), index);
    check_relation(r.logical_relation, r.basic_events.size(), index);
    return r;
  }
  if (keys == composite) {
    CompositeRecord r{get_string(obj, kRule, index), get_strings(obj, kEvents, index),
                      get_string(obj, kRelation, index)};
    check_events(r.basic_events, index);
    check_relation(r.logical_relation, r.basic_events.size(), index);
    return r;
  }
  if (keys == single) {
    SingleEventRecord r{get_strings(obj, kEvents, index), get_strings(obj, kPatterns, index)};
    check_patterns(r.syntactic_patterns, r.basic_events.size(), index);
    return r;
  }
  std::string present;
  for (const auto& key : keys) {
    present += (present.empty() ? "\"" : ", \"") + key + "\"";
  }
  throw SchemaError(index, "key set {" + present + "} matches no record shape");
}

json write_record(const Record& record) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        json obj = json::object();
        if constexpr (!std::is_same_v<T, SingleEventRecord>) {
          obj[kRule] = r.original_rule;
        }
        obj[kEvents] = r.basic_events;
        if constexpr (!std::is_same_v<T, SingleEventRecord>) {
          obj[kRelation] = r.logical_relation;
        }
        if constexpr (!std::is_same_v<T, CompositeRecord>) {
          obj[kPatterns] = r.syntactic_patterns;
        }
        return obj;
      },
      record);
}

} // namespace

SchemaError::SchemaError(std::size_t index, const std::string& reason)
    : Error("record " + std::to_string(index) + ": " + reason), index_(index) {}

LengthMismatch::LengthMismatch(std::size_t index, std::size_t events, std::size_t patterns)
    : SchemaError(index, std::to_string(events) + " basic events but " + std::to_string(patterns) +
                             " syntactic patterns") {}

RelationParseError::RelationParseError(const std::string& message, std::size_t column)
    : Error("relation column " + std::to_string(column) + ": " + message), column_(column) {}

LetterOutOfRange::LetterOutOfRange(char letter, std::size_t event_count)
    : Error(std::string("letter ") + letter + " is out of range for " + std::to_string(event_count) +
            " basic events"),
      letter_(letter),
      event_count_(event_count) {}

std::string_view shape_name(const Record& record) {
  switch (record.index()) {
  case 0: return "validation";
  case 1: return "composite";
  default: return "single-event";
  }
}

std::vector<Record> load_dataset(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw InvalidArgument(std::string("dataset is not valid JSON: ") + err.what());
  }
  if (!doc.is_array()) {
    throw InvalidArgument("dataset must be a JSON array");
  }
  std::vector<Record> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out.push_back(read_record(doc[i], i));
  }
  return out;
}

std::vector<Record> load_dataset(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_dataset(buffer.str());
}

std::vector<Record> load_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgument("cannot read " + path);
  }
  return load_dataset(in);
}

std::string serialize_dataset(const std::vector<Record>& records) {
  json doc = json::array();
  for (const auto& r : records) {
    doc.push_back(write_record(r));
  }
  return doc.dump(2) + "\n";
}

Statement parse_relation(std::string_view relation, std::size_t event_count) {
  if (event_count > kMaxRelationEvents) {
    throw InvalidArgument("relation strings address at most 26 events");
  }
  try {
    parser::detail::StatementParser p(relation, parser::detail::AtomSyntax::Letter);
    p.on_letter = [event_count](const parser::Token& t) {
      if (static_cast<std::size_t>(t.lexeme[0] - 'A') >= event_count) {
        throw LetterOutOfRange(t.lexeme[0], event_count);
      }
    };
    Statement s = p.parse_statement();
    p.expect_end();
    return s;
  } catch (const parser::ParseError& err) {
    throw RelationParseError(err.detail(), err.column());
  }
}

Statement bind_relation(const Statement& skeleton, const std::vector<BasicEvent>& events) {
  return map_events(skeleton, [&](const EventAtom& atom) {
    const std::string& letter = atom.id();
    std::size_t k = static_cast<std::size_t>(letter[0] - 'A');
    if (letter.size() != 1 || k >= events.size()) {
      throw LetterOutOfRange(letter[0], events.size());
    }
    return Statement::atom(events[k], atom.timestamp);
  });
}

} // namespace horae::data
