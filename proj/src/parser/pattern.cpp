#include "horae/core.hpp"

namespace horae {

namespace {

using K = ComponentKind;

bool is_kind(const PatternToken& t, K kind) {
  const auto* k = std::get_if<ComponentKind>(&t);
  return k != nullptr && *k == kind;
}

std::optional<Comparator> as_comparator(const PatternToken& t) {
  if (const auto* c = std::get_if<Comparator>(&t)) {
    return *c;
  }
  return std::nullopt;
}

bool matches(std::span<const PatternToken> tokens, std::initializer_list<K> kinds) {
  if (tokens.size() != kinds.size()) {
    return false;
  }
  std::size_t i = 0;
  for (K k : kinds) {
    if (!is_kind(tokens[i++], k)) {
      return false;
    }
  }
  return true;
}

} // namespace

EventPattern classify_pattern(std::span<const PatternToken> tokens) {
  if (matches(tokens, {K::Object, K::Action})) {
    return {PatternKind::ObjAct, std::nullopt};
  }
  if (matches(tokens, {K::Object, K::Action, K::Object})) {
    return {PatternKind::ObjActObj, std::nullopt};
  }
  if (matches(tokens, {K::Action, K::Object})) {
    return {PatternKind::ActObj, std::nullopt};
  }
  if (tokens.size() == 4 && is_kind(tokens[1], K::Attribute) && is_kind(tokens[3], K::Value)) {
    if (auto cmp = as_comparator(tokens[2])) {
      if (is_kind(tokens[0], K::Object)) {
        return {PatternKind::ObjAttrCmpVal, cmp};
      }
      if (is_kind(tokens[0], K::Action)) {
        return {PatternKind::ActAttrCmpVal, cmp};
      }
    }
  }
  return {PatternKind::Other, std::nullopt};
}

} // namespace horae
