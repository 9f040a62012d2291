#include "horae/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace horae::pipeline {

namespace {

struct Word {
  std::string key;   // lowercase, surrounding punctuation removed
  std::string text;  // original spelling
};

bool is_edge_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '"' ||
         c == '(' || c == ')';
}

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    std::string_view raw = text.substr(i, j - i);
    while (!raw.empty() && is_edge_punct(raw.front())) {
      raw.remove_prefix(1);
    }
    while (!raw.empty() && is_edge_punct(raw.back())) {
      raw.remove_suffix(1);
    }
    if (!raw.empty()) {
      std::string key(raw);
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      out.push_back(Word{std::move(key), std::string(raw)});
    }
    i = j;
  }
  return out;
}

std::vector<std::string> keys_of(const std::vector<Word>& ws) {
  std::vector<std::string> out;
  for (const auto& w : ws) {
    out.push_back(w.key);
  }
  return out;
}

std::string join(const std::vector<Word>& ws, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t k = begin; k < end && k < ws.size(); ++k) {
    out += (out.empty() ? "" : " ") + ws[k].text;
  }
  return out;
}

struct Phrase {
  std::vector<std::string> words;
  Comparator cmp;
};

const std::vector<Phrase>& phrases() {
  using C = Comparator;
  static const std::vector<Phrase> table = {
      {{"not", "be", "more", "than"}, C::Le},   {{"not", "be", "greater", "than"}, C::Le},
      {{"not", "be", "higher", "than"}, C::Le}, {{"not", "be", "above"}, C::Le},
      {{"not", "more", "than"}, C::Le},         {{"no", "more", "than"}, C::Le},
      {{"not", "exceed"}, C::Le},               {{"not", "exceeds"}, C::Le},
      {{"at", "most"}, C::Le},                  {{"not", "be", "less", "than"}, C::Ge},
      {{"not", "be", "lower", "than"}, C::Ge},  {{"not", "be", "below"}, C::Ge},
      {{"not", "less", "than"}, C::Ge},         {{"no", "less", "than"}, C::Ge},
      {{"no", "fewer", "than"}, C::Ge},         {{"not", "fall", "below"}, C::Ge},
      {{"at", "least"}, C::Ge},                 {{"more", "than"}, C::Gt},
      {{"greater", "than"}, C::Gt},             {{"higher", "than"}, C::Gt},
      {{"exceed"}, C::Gt},                      {{"exceeds"}, C::Gt},
      {{"above"}, C::Gt},                       {{"less", "than"}, C::Lt},
      {{"fewer", "than"}, C::Lt},               {{"lower", "than"}, C::Lt},
      {{"below"}, C::Lt},                       {{"under"}, C::Lt},
      {{"equal", "to"}, C::Eq},                 {{"equals"}, C::Eq},
      {{"exactly"}, C::Eq},
  };
  return table;
}

const std::set<std::string>& auxiliaries() {
  static const std::set<std::string> words = {
      "shall", "must", "should", "will", "would", "may", "might", "can", "could", "cannot",
      "not",   "never", "do",    "does", "did",   "is",  "are",   "was", "were",  "be",
      "has",   "have", "had",   "to"};
  return words;
}

// Base forms; inflections are derived in is_verb.
const std::set<std::string>& verbs() {
  static const std::set<std::string> words = {
      "include", "contain", "provide", "require", "collect", "store", "delete", "keep", "send",
      "receive", "submit",  "file",    "apply",   "request", "approve", "deny", "grant", "reject",
      "decline", "issue",   "return",  "pay",     "charge",  "refund", "wash", "wear", "clean",
      "use",     "handle",  "check",   "verify",  "record",  "report", "notify", "inform", "sign",
      "open",    "close",   "start",   "stop",    "restart", "access", "share", "process", "review",
      "obtain",  "hold",    "follow",  "complete", "remain", "exceed", "respond", "reply", "arrive",
      "leave",   "enter",   "exit",    "smoke",   "park",    "drive",  "carry", "display", "post",
      "update",  "encrypt", "retain",  "transfer", "disclose", "protect", "perform", "conduct",
      "attend",  "register", "cancel",  "book",    "order",   "deliver", "ship", "load", "unload",
      "log",     "save",    "print",   "expire",  "renew",   "reach",   "exist", "occur", "happen",
      "get",     "give",    "take",    "make",    "go",      "come",    "see",   "bring", "put"};
  return words;
}

bool is_verb(const std::string& key) {
  if (verbs().contains(key) || key == "is" || key == "are" || key == "was" || key == "were" ||
      key == "has" || key == "have" || key == "had") {
    return true;
  }
  for (std::string_view suffix : {"s", "es", "ed", "d", "ing"}) {
    if (key.size() > suffix.size() && key.ends_with(suffix)) {
      std::string stem = key.substr(0, key.size() - suffix.size());
      if (verbs().contains(stem)) {
        return true;
      }
      if (suffix == "es" || suffix == "ed") {
        // applies -> apply, applied -> apply
        if (stem.ends_with("i") && verbs().contains(stem.substr(0, stem.size() - 1) + "y")) {
          return true;
        }
      }
    }
  }
  return false;
}

bool is_determiner(const std::string& key) {
  return key == "the" || key == "a" || key == "an" || key == "its" || key == "their";
}

// First index >= from that starts a verb phrase. A word right after a
// determiner ("the collected data") is read as a modifier.
std::optional<std::size_t> verb_start(const std::vector<Word>& ws, std::size_t from) {
  for (std::size_t k = from; k < ws.size(); ++k) {
    if (k > 0 && is_determiner(ws[k - 1].key)) {
      continue;
    }
    if (auxiliaries().contains(ws[k].key) || is_verb(ws[k].key)) {
      return k;
    }
  }
  return std::nullopt;
}

// End of the verb phrase starting at `start`: auxiliaries, then one verb.
std::size_t verb_end(const std::vector<Word>& ws, std::size_t start) {
  std::size_t k = start;
  while (k < ws.size() && auxiliaries().contains(ws[k].key) && !is_verb(ws[k].key)) {
    ++k;
  }
  if (k < ws.size() && is_verb(ws[k].key)) {
    ++k;
    // "is granted", "has approved": an auxiliary-like verb followed by a verb.
    while (k < ws.size() && is_verb(ws[k].key) && auxiliaries().contains(ws[k - 1].key)) {
      ++k;
    }
  }
  return std::max(k, start + 1);
}

struct Builder {
  std::vector<EventComponent> parts;
  void add(ComponentKind kind, const std::string& text) {
    parts.push_back(EventComponent::make(kind, text));
  }
};

} // namespace

std::vector<std::string> words(std::string_view text) { return keys_of(split_words(text)); }

std::optional<ComparatorPhrase> find_comparator(const std::vector<std::string>& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Phrase* best = nullptr;
    for (const auto& p : phrases()) {
      if (i + p.words.size() > tokens.size() || (best && best->words.size() >= p.words.size())) {
        continue;
      }
      if (std::equal(p.words.begin(), p.words.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        best = &p;
      }
    }
    if (best) {
      std::size_t begin = i;
      while (begin > 0 && auxiliaries().contains(tokens[begin - 1]) && tokens[begin - 1] != "not") {
        --begin;
      }
      return ComparatorPhrase{best->cmp, begin, i, i + best->words.size()};
    }
  }
  return std::nullopt;
}

std::optional<RuleType> detect_rule_type(std::string_view rule_text) {
  std::vector<std::string> tokens = words(rule_text);
  // Negations inside comparator phrases ("shall not exceed") are not
  // prohibitions.
  while (auto phrase = find_comparator(tokens)) {
    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(phrase->phrase_begin),
                 tokens.begin() + static_cast<std::ptrdiff_t>(phrase->end));
  }
  static const std::set<std::string> forbid = {
      "no",        "not",       "never",    "cannot",   "can't",     "mustn't",  "shan't",
      "shouldn't", "don't",     "doesn't",  "won't",    "forbidden", "forbid",   "forbids",
      "prohibited", "prohibit", "prohibits", "banned",  "disallowed"};
  static const std::set<std::string> should = {"should", "advised", "recommended", "recommend",
                                               "ought", "encouraged"};
  static const std::set<std::string> shall = {"must",     "shall",    "mandatory", "required",
                                              "requires", "obliged", "obligatory"};
  auto any = [&](const std::set<std::string>& markers) {
    return std::any_of(tokens.begin(), tokens.end(), [&](const auto& t) { return markers.contains(t); });
  };
  if (any(forbid)) {
    return RuleType::Forbid;
  }
  if (any(should)) {
    return RuleType::Should;
  }
  if (any(shall)) {
    return RuleType::Shall;
  }
  return std::nullopt;
}

BasicEvent componentize(const std::string& id, const std::string& text, PatternKind label,
                        std::vector<std::string>& warnings) {
  std::vector<Word> ws = split_words(text);
  std::string quoted = "'" + text + "'";
  auto whole = [&](const std::string& why) {
    warnings.push_back("could not split " + quoted + " as " + std::string(to_string(label)) + ": " + why);
    return BasicEvent::make(id, {EventComponent::make(ComponentKind::Value, text)});
  };
  if (ws.empty()) {
    return whole("no words");
  }
  Builder b;
  std::optional<Comparator> cmp;
  switch (label) {
  case PatternKind::Other: return BasicEvent::make(id, {EventComponent::make(ComponentKind::Value, text)});
  case PatternKind::ObjAct: {
    if (ws.size() < 2) {
      return whole("needs an object and an action");
    }
    auto v = verb_start(ws, 1);
    if (!v) {
      warnings.push_back("guessed the action of " + quoted);
      v = ws.size() - 1;
    }
    b.add(ComponentKind::Object, join(ws, 0, *v));
    b.add(ComponentKind::Action, join(ws, *v, ws.size()));
    break;
  }
  case PatternKind::ObjActObj: {
    if (ws.size() < 3) {
      return whole("needs two objects and an action");
    }
    auto v = verb_start(ws, 1);
    std::size_t end = v ? verb_end(ws, *v) : 2;
    if (!v || end >= ws.size()) {
      warnings.push_back("guessed the action of " + quoted);
      v = 1;
      end = 2;
    }
    b.add(ComponentKind::Object, join(ws, 0, *v));
    b.add(ComponentKind::Action, join(ws, *v, end));
    b.add(ComponentKind::Object, join(ws, end, ws.size()));
    break;
  }
  case PatternKind::ActObj: {
    if (ws.size() < 2) {
      return whole("needs an action and an object");
    }
    std::size_t end = std::min(verb_end(ws, 0), ws.size() - 1);
    b.add(ComponentKind::Action, join(ws, 0, end));
    b.add(ComponentKind::Object, join(ws, end, ws.size()));
    break;
  }
  case PatternKind::ObjAttrCmpVal:
  case PatternKind::ActAttrCmpVal: {
    auto phrase = find_comparator(keys_of(ws));
    if (!phrase) {
      return whole("no comparison phrase");
    }
    if (phrase->end >= ws.size()) {
      return whole("no value after the comparison");
    }
    cmp = phrase->comparator;
    std::vector<Word> left(ws.begin(), ws.begin() + static_cast<std::ptrdiff_t>(phrase->begin));
    if (label == PatternKind::ActAttrCmpVal) {
      if (left.size() < 2) {
        return whole("needs an action and an attribute");
      }
      std::size_t end = std::min(verb_end(left, 0), left.size() - 1);
      b.add(ComponentKind::Action, join(left, 0, end));
      b.add(ComponentKind::Attribute, join(left, end, left.size()));
    } else {
      auto of = std::find_if(left.begin(), left.end(), [](const Word& w) { return w.key == "of"; });
      std::size_t start = !left.empty() && is_determiner(left.front().key) ? 1 : 0;
      if (of != left.end() && of != left.begin() + static_cast<std::ptrdiff_t>(start) && of + 1 != left.end()) {
        // "the delay of orders": attribute of object
        auto at = static_cast<std::size_t>(of - left.begin());
        b.add(ComponentKind::Object, join(left, at + 1, left.size()));
        b.add(ComponentKind::Attribute, join(left, start, at));
      } else if (left.size() >= 2) {
        warnings.push_back("guessed the attribute of " + quoted);
        b.add(ComponentKind::Object, join(left, 0, left.size() - 1));
        b.add(ComponentKind::Attribute, join(left, left.size() - 1, left.size()));
      } else {
        return whole("needs an object and an attribute");
      }
    }
    b.add(ComponentKind::Value, join(ws, phrase->end, ws.size()));
    break;
  }
  }
  BasicEvent e = BasicEvent::make(id, std::move(b.parts), cmp);
  if (e.pattern.kind != label) {
    warnings.push_back(quoted + " split as " + std::string(to_string(e.pattern.kind)) + ", not " +
                       std::string(to_string(label)));
  }
  return e;
}

} // namespace horae::pipeline
