#pragma once

// Token normalization shared by the lexical and embedding providers.

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace horae::abstraction {

/// Lowercased word tokens; CJK runs become overlapping character bigrams.
std::vector<std::string> raw_tokens(std::string_view text);

struct NormalizedText {
  std::set<std::string> tokens;  // stopwords and negation markers removed
  bool negated = false;          // odd number of markers and folded antonyms
};

NormalizedText normalize(std::string_view text);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

} // namespace horae::abstraction
