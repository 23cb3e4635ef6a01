#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "meshprov/text.hpp"

namespace meshprov {

/// Levenshtein distance over code points, unit costs, two-row DP.
inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

/// 1 - distance / max(length) on already-normalized code point strings.
inline double similarity_of_keys(std::u32string_view a, std::u32string_view b) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

/// Upper bound of similarity_of_keys given only the two lengths.
inline double similarity_bound(std::size_t la, std::size_t lb) {
  std::size_t longest = std::max(la, lb);
  if (longest == 0) return 1.0;
  std::size_t diff = la > lb ? la - lb : lb - la;
  return 1.0 - static_cast<double>(diff) / static_cast<double>(longest);
}

inline std::u32string similarity_key(std::string_view s) {
  return text::utf8_decode(text::normalize_for_similarity(s));
}

/// Normalized edit similarity in [0, 1]: lowercase, punctuation stripped,
/// whitespace collapsed; two empty strings score 1.
inline double string_similarity(std::string_view a, std::string_view b) {
  return similarity_of_keys(similarity_key(a), similarity_key(b));
}

}  // namespace meshprov
