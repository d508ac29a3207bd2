#include "behavsteg/lexicon.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <utility>

namespace behavsteg {
namespace {

// Sorted by word for binary search.
constexpr std::array<std::pair<std::string_view, double>, 40> kLexicon{{
    {"amazing", 0.9},  {"angry", -0.7},     {"awful", -0.9},
    {"bad", -0.6},     {"beautiful", 0.8},  {"best", 0.8},
    {"boring", -0.4},  {"broken", -0.5},    {"calm", 0.3},
    {"cool", 0.4},     {"cry", -0.5},       {"disappointed", -0.6},
    {"excellent", 0.9}, {"excited", 0.7},   {"fail", -0.6},
    {"fine", 0.2},     {"fun", 0.6},        {"glad", 0.6},
    {"good", 0.5},     {"great", 0.7},      {"happy", 0.7},
    {"hate", -0.8},    {"horrible", -0.9},  {"lonely", -0.5},
    {"love", 0.8},     {"nice", 0.5},       {"ok", 0.1},
    {"pain", -0.6},    {"perfect", 0.9},    {"sad", -0.6},
    {"scared", -0.5},  {"sick", -0.5},      {"sorry", -0.3},
    {"terrible", -0.9}, {"thanks", 0.5},    {"tired", -0.3},
    {"ugly", -0.6},    {"win", 0.6},        {"wonderful", 0.9},
    {"worst", -0.9},
}};

std::optional<double> lookup(std::string_view word) {
  const auto it = std::lower_bound(
      kLexicon.begin(), kLexicon.end(), word,
      [](const auto& entry, std::string_view w) { return entry.first < w; });
  if (it != kLexicon.end() && it->first == word) return it->second;
  return std::nullopt;
}

}  // namespace

double lexicon_sentiment(std::string_view text) {
  double sum = 0.0;
  int hits = 0;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (auto v = lookup(word)) {
      sum += *v;
      ++hits;
    }
    word.clear();
  };
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) {
      word.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      flush();
    }
  }
  flush();
  return hits == 0 ? 0.0 : std::clamp(sum / hits, -1.0, 1.0);
}

}  // namespace behavsteg
