#include "horae/abstraction.hpp"

#include "abstraction/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace horae::abstraction {

namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",    "an",   "the",  "of",    "to",     "in",   "on",   "for",  "and",  "or",
      "is",   "are",  "be",   "been",  "by",     "with", "at",   "as",   "from", "that",
      "this", "it",   "its",  "their", "there",  "any",  "all",  "must", "shall", "should",
      "will", "would", "can", "may",   "do",     "does", "did",  "has",  "have", "had"};
  return words;
}

const std::unordered_set<std::string>& negation_markers() {
  static const std::unordered_set<std::string> words = {
      "no",   "not",  "never", "without", "cannot",   "isnt",  "dont",
      "doesnt", "didnt", "wont", "cant",  "shouldnt", "mustnt", "arent"};
  return words;
}

// Negative word -> its positive counterpart. Folding one counts as one
// negation.
const std::unordered_map<std::string, std::string>& antonyms() {
  static const std::unordered_map<std::string, std::string> words = {
      {"denies", "approves"},   {"deny", "approve"},       {"denied", "approved"},
      {"rejects", "accepts"},   {"reject", "accept"},      {"rejected", "accepted"},
      {"forbids", "allows"},    {"forbid", "allow"},       {"forbidden", "allowed"},
      {"prohibits", "permits"}, {"prohibit", "permit"},    {"prohibited", "permitted"},
      {"disallows", "allows"},  {"excludes", "includes"},  {"excluded", "included"},
      {"absent", "present"},    {"invalid", "valid"},      {"disabled", "enabled"},
      {"unpaid", "paid"},       {"fails", "succeeds"},     {"failed", "succeeded"},
      {"closed", "open"},       {"unavailable", "available"}};
  return words;
}

bool is_cjk(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
         (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x3040 && c <= 0x30FF) ||
         (c >= 0xAC00 && c <= 0xD7AF);
}

// Decodes one UTF-8 sequence starting at text[i] and advances i past it.
// Truncated sequences decode byte by byte.
char32_t decode(std::string_view text, std::size_t& i) {
  auto byte = static_cast<unsigned char>(text[i]);
  std::size_t extra = byte >= 0xF0 ? 3 : byte >= 0xE0 ? 2 : byte >= 0xC0 ? 1 : 0;
  if (i + extra >= text.size()) {
    extra = 0;
  }
  char32_t c = extra == 0 ? byte : byte & (0x3F >> extra);
  ++i;
  for (std::size_t k = 0; k < extra; ++k) {
    c = (c << 6) | (static_cast<unsigned char>(text[i++]) & 0x3F);
  }
  return c;
}

} // namespace

std::vector<std::string> raw_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  std::vector<std::string> cjk_run;  // code points of the current CJK run

  auto flush_word = [&] {
    if (!word.empty()) {
      tokens.push_back(word);
      word.clear();
    }
  };
  auto flush_cjk = [&] {
    if (cjk_run.size() == 1) {
      tokens.push_back(cjk_run.front());
    }
    for (std::size_t k = 0; k + 1 < cjk_run.size(); ++k) {
      tokens.push_back(cjk_run[k] + cjk_run[k + 1]);
    }
    cjk_run.clear();
  };

  for (std::size_t i = 0; i < text.size();) {
    std::size_t start = i;
    char32_t c = decode(text, i);
    std::string bytes(text.substr(start, i - start));
    if (c < 0x80) {
      flush_cjk();
      auto ch = static_cast<char>(c);
      if (std::isalnum(static_cast<unsigned char>(ch))) {
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
      } else if (ch == '\'' && !word.empty()) {
        // "isn't" style contractions: drop the apostrophe.
        continue;
      } else {
        flush_word();
      }
    } else if (is_cjk(c)) {
      flush_word();
      cjk_run.push_back(bytes);
    } else {
      flush_cjk();
      word += bytes;
    }
  }
  flush_word();
  flush_cjk();
  return tokens;
}

NormalizedText normalize(std::string_view text) {
  NormalizedText out;
  for (auto& token : raw_tokens(text)) {
    if (negation_markers().contains(token)) {
      out.negated = !out.negated;
      continue;
    }
    if (auto it = antonyms().find(token); it != antonyms().end()) {
      out.negated = !out.negated;
      token = it->second;
    }
    if (stopwords().contains(token)) {
      continue;
    }
    out.tokens.insert(token);
  }
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) {
    return 0.0;
  }
  std::size_t common = 0;
  for (const auto& t : a) {
    common += b.count(t);
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::string event_text(const BasicEvent& e) {
  if (e.components.empty() && e.raw_text) {
    return *e.raw_text;
  }
  return e.text();
}

double lexical_similarity(std::string_view a, std::string_view b) {
  return jaccard(normalize(a).tokens, normalize(b).tokens);
}

SimilarityJudgment lexical_judge(const BasicEvent& a, const BasicEvent& b) {
  NormalizedText na = normalize(event_text(a));
  NormalizedText nb = normalize(event_text(b));
  double score = jaccard(na.tokens, nb.tokens);
  if (score < 0.999) {
    return {Relation::Unrelated, score};
  }
  return {na.negated == nb.negated ? Relation::Equivalent : Relation::Negation, score};
}

SimilarityJudgment LexicalProvider::judge(const BasicEvent& a, const BasicEvent& b) const {
  return lexical_judge(a, b);
}

} // namespace horae::abstraction
