#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rulekg {

// Dense first-come-first-served interning of opaque labels.
class Vocabulary {
 public:
  std::int32_t Intern(std::string_view label);
  std::optional<std::int32_t> Find(std::string_view label) const;
  const std::string& Label(std::int32_t id) const { return labels_.at(id); }
  std::int32_t size() const { return static_cast<std::int32_t>(labels_.size()); }
  bool empty() const { return labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::int32_t, Hash, std::equal_to<>> ids_;
};

}  // namespace rulekg
