#include "rulekg/vocabulary.h"

namespace rulekg {

std::int32_t Vocabulary::Intern(std::string_view label) {
  if (auto it = ids_.find(label); it != ids_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(labels_.size());
  labels_.emplace_back(label);
  ids_.emplace(labels_.back(), id);
  return id;
}

std::optional<std::int32_t> Vocabulary::Find(std::string_view label) const {
  if (auto it = ids_.find(label); it != ids_.end()) return it->second;
  return std::nullopt;
}

}  // namespace rulekg
