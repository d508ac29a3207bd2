#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace behavsteg {

/// `key = value` text configuration. '#' starts a comment; blank lines are
/// ignored; keys are case-sensitive and may appear once.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  /// Throws ConfigError naming the line on malformed input.
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig from_file(const std::string& path);

  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;

  /// Typed getters throw ConfigError when the value does not parse.
  std::optional<double> get_double(std::string_view key) const;
  std::optional<std::int64_t> get_int(std::string_view key) const;
  std::optional<std::uint64_t> get_uint(std::string_view key) const;

  /// Keys not listed in `known`, sorted.
  std::vector<std::string> unknown_keys(
      std::span<const std::string_view> known) const;

  const std::map<std::string, std::string, std::less<>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

}  // namespace behavsteg
