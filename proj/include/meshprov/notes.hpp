#pragma once

// Evidence extraction from the free-text Public MeSH Note (PMN) and Previous
// Indexing (PI) fields, term-to-identifier resolution, and the manual
// confirmation channel (review file out, overrides file in).

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

#include "meshprov/csv.hpp"
#include "meshprov/error.hpp"
#include "meshprov/model.hpp"
#include "meshprov/similarity.hpp"
#include "meshprov/text.hpp"

namespace meshprov {

// ---------------------------------------------------------------------------
// PMN
// ---------------------------------------------------------------------------

struct PmnExtraction {
  std::string scr_term;
  bool matched = false;
  std::string raw_sentence;

  friend bool operator==(const PmnExtraction&, const PmnExtraction&) = default;
};

/// First semicolon-separated sentence of the form "<X> was indexed under <Y>".
/// X loses leading year markers such as "2019" or "2007 (1980)" and surrounding quotes.
inline std::optional<PmnExtraction> parse_pmn(std::string_view pmn_text) {
  static const std::regex leading_years(R"(^\s*(?:\d{4}\s*(?:\(\d{4}\))?[\s,:.\-]*)+)");
  static constexpr std::string_view phrase = "was indexed under";
  for (std::string_view sentence : text::split(pmn_text, ';')) {
    sentence = text::trim(sentence);
    auto pos = text::ifind(sentence, phrase);
    if (pos == std::string_view::npos) continue;
    std::string subject(text::trim(sentence.substr(0, pos)));
    subject = std::regex_replace(subject, leading_years, "");
    std::string_view s = subject;
    while (!s.empty() && (text::is_quote(s.front()) || text::is_space(s.front()))) s.remove_prefix(1);
    while (!s.empty() && (text::is_quote(s.back()) || text::is_space(s.back()))) s.remove_suffix(1);
    if (s.empty()) continue;
    return PmnExtraction{text::collapse_whitespace(s), true, std::string(sentence)};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// PI
// ---------------------------------------------------------------------------

struct PiEntry {
  std::string descriptor_term;
  std::optional<int> start_year;
  std::optional<int> end_year;
  std::string raw;
  /// Term of the whole note before any conjunction split (equals descriptor_term when unsplit).
  std::string note_term;

  friend bool operator==(const PiEntry&, const PiEntry&) = default;
};

namespace detail {

/// "Lung Neoplasms/therapy" -> "Lung Neoplasms"; only lowercase qualifier suffixes are removed.
inline std::string strip_qualifier(std::string_view term) {
  auto slash = term.rfind('/');
  if (slash == std::string_view::npos || slash == 0) return std::string(term);
  std::string_view qualifier = term.substr(slash + 1);
  bool looks_like_qualifier =
      !qualifier.empty() && std::all_of(qualifier.begin(), qualifier.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || c == ' ' || c == ',' || c == '-';
      });
  return looks_like_qualifier ? std::string(text::trim(term.substr(0, slash))) : std::string(term);
}

inline std::vector<std::string> split_conjunctions(std::string_view term) {
  static const std::regex conj(R"(\s+and\s+|\s*&\s*)", std::regex::icase);
  std::string t(term);
  std::vector<std::string> parts;
  for (std::sregex_token_iterator it(t.begin(), t.end(), conj, -1), end; it != end; ++it) {
    std::string p = text::collapse_whitespace(it->str());
    if (!p.empty()) parts.push_back(std::move(p));
  }
  return parts;
}

}  // namespace detail

/// One entry per descriptor named in each note. A trailing "(YYYY-YYYY)" or
/// "(YYYY)" period is parsed; a parenthesized group with unparseable digits
/// leaves both years absent and adds a warning. Notes joining terms with
/// "and"/"&" yield one entry per term, sharing the period.
inline std::vector<PiEntry> parse_pi(const std::vector<std::string>& pi_notes,
                                     std::vector<std::string>* warnings = nullptr) {
  static const std::regex trailing_period(R"(^(.*?)\s*\(([^()]*)\)\s*$)");
  static const std::regex range(R"(^\s*(\d{4})\s*-\s*(\d{4})\s*$)");
  static const std::regex single(R"(^\s*(\d{4})\s*$)");
  std::vector<PiEntry> out;
  for (const auto& note : pi_notes) {
    std::string term = text::collapse_whitespace(note);
    std::optional<int> start, end;
    std::smatch m;
    if (std::regex_match(term, m, trailing_period)) {
      std::string period = m[2].str();
      bool has_digit = std::any_of(period.begin(), period.end(), text::is_digit);
      if (has_digit) {
        std::string head = m[1].str();
        std::smatch pm;
        if (std::regex_match(period, pm, range)) {
          start = std::stoi(pm[1].str());
          end = std::stoi(pm[2].str());
        } else if (std::regex_match(period, pm, single)) {
          start = end = std::stoi(pm[1].str());
        } else if (warnings) {
          warnings->push_back("unparseable period '(" + period + ")' in previous indexing note '" + note + "'");
        }
        if (start && end && *start > *end) {
          if (warnings) warnings->push_back("reversed period in previous indexing note '" + note + "'");
          start.reset();
          end.reset();
        }
        term = std::move(head);
      }
    }
    std::string note_term = detail::strip_qualifier(text::trim(term));
    if (note_term.empty()) {
      if (warnings) warnings->push_back("previous indexing note without a term: '" + note + "'");
      continue;
    }
    for (auto& fragment : detail::split_conjunctions(note_term))
      out.push_back(PiEntry{detail::strip_qualifier(fragment), start, end, note, note_term});
  }
  return out;
}

/// Terms of the entries with the most recent effective end year (end_year, or
/// version0_year when absent). Sorted and unique, so note order never matters.
inline std::vector<std::string> select_current_pi_hosts(const std::vector<PiEntry>& entries, int version0_year) {
  if (entries.empty()) return {};
  auto effective = [&](const PiEntry& e) { return e.end_year.value_or(version0_year); };
  int latest = effective(entries.front());
  for (const auto& e : entries) latest = std::max(latest, effective(e));
  std::set<std::string> terms;
  for (const auto& e : entries)
    if (effective(e) == latest) terms.insert(e.descriptor_term);
  return {terms.begin(), terms.end()};
}

// ---------------------------------------------------------------------------
// Resolution of free-text terms to identifiers
// ---------------------------------------------------------------------------

enum class ReviewKind { pmn_scr, pi_host };

inline std::string_view to_string(ReviewKind k) { return k == ReviewKind::pmn_scr ? "pmn_scr" : "pi_host"; }
inline std::optional<ReviewKind> parse_review_kind(std::string_view s) {
  if (s == "pmn_scr") return ReviewKind::pmn_scr;
  if (s == "pi_host") return ReviewKind::pi_host;
  return std::nullopt;
}
inline ReviewKind review_kind_of(OverrideField f) {
  return f == OverrideField::pmn_scr_resolution ? ReviewKind::pmn_scr : ReviewKind::pi_host;
}

struct Candidate {
  std::string id;
  std::string term;
  double score = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct ReviewItem {
  std::string descriptor_id;
  ReviewKind kind = ReviewKind::pmn_scr;
  std::string query_term;
  std::vector<Candidate> candidates;  // descending score, then ascending id

  friend bool operator==(const ReviewItem&, const ReviewItem&) = default;
};

struct ExactMatch {
  std::vector<std::string> ids;  // empty when a reviewer confirmed "no match"
  bool from_override = false;
  friend bool operator==(const ExactMatch&, const ExactMatch&) = default;
};
struct Suggestions {
  ReviewItem item;
  friend bool operator==(const Suggestions&, const Suggestions&) = default;
};
struct NoMatch {
  friend bool operator==(NoMatch, NoMatch) { return true; }
};

using Resolution = std::variant<ExactMatch, Suggestions, NoMatch>;

inline bool is_exact(const Resolution& r) { return std::holds_alternative<ExactMatch>(r); }

/// Similarity search over every term of one record family (descriptors or SCRs) of a version.
class TermMatcher {
 public:
  static constexpr std::size_t kDefaultTop = 5;

  static TermMatcher for_scrs(const MeshVersion& v) {
    TermMatcher m;
    for (const auto& [id, s] : v.scrs()) s.for_each_concept([&](const Concept& c) { m.add(id, c); });
    return m;
  }

  static TermMatcher for_descriptors(const MeshVersion& v) {
    TermMatcher m;
    for (const auto& [id, d] : v.descriptors()) d.for_each_concept([&](const Concept& c) { m.add(id, c); });
    return m;
  }

  bool empty() const { return entries_.empty(); }

  /// Ids whose term equals `term` after similarity normalization (similarity 1.0).
  std::vector<std::string> identical(std::string_view term) const {
    auto it = by_key_.find(similarity_key(term));
    if (it == by_key_.end()) return {};
    return it->second;
  }

  /// Best `k` distinct ids scored by the maximum similarity to any of `queries`.
  std::vector<Candidate> top(const std::vector<std::string_view>& queries, std::size_t k = kDefaultTop) const {
    std::vector<std::u32string> keys;
    for (auto q : queries) keys.push_back(similarity_key(q));
    std::vector<Candidate> best;  // sorted: score desc, id asc
    auto threshold = [&] { return best.size() < k ? -1.0 : best.back().score; };
    std::size_t i = 0;
    while (i < entries_.size()) {
      std::size_t j = i;
      const Entry* group_best = nullptr;
      double group_score = -1.0;
      for (; j < entries_.size() && entries_[j].id == entries_[i].id; ++j) {
        const Entry& e = entries_[j];
        for (const auto& q : keys) {
          double floor = std::max(threshold(), group_score);
          if (similarity_bound(q.size(), e.key.size()) < floor) continue;
          double s = similarity_of_keys(q, e.key);
          if (s > group_score) {
            group_score = s;
            group_best = &e;
          }
        }
      }
      if (group_best && (best.size() < k || group_score > best.back().score)) {
        Candidate c{group_best->id, group_best->term, group_score};
        auto pos = std::find_if(best.begin(), best.end(), [&](const Candidate& b) { return b.score < c.score; });
        best.insert(pos, std::move(c));
        if (best.size() > k) best.pop_back();
      }
      i = j;
    }
    return best;
  }

 private:
  struct Entry {
    std::string id;
    std::string term;
    std::u32string key;
  };

  struct KeyHash {
    std::size_t operator()(const std::u32string& s) const { return std::hash<std::u32string>{}(s); }
  };

  void add(const std::string& id, const Concept& c) {
    for (const auto& t : c.terms) {
      auto key = similarity_key(t.text);
      auto& ids = by_key_[key];
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
      bool dup = false;
      for (auto it = entries_.rbegin(); it != entries_.rend() && it->id == id; ++it)
        if (it->key == key) dup = true;
      if (!dup) entries_.push_back({id, t.text, std::move(key)});
    }
  }

  std::vector<Entry> entries_;  // grouped by id, ids ascending
  std::unordered_map<std::u32string, std::vector<std::string>, KeyHash> by_key_;
};

namespace detail {

inline Resolution resolve_with(std::string_view term, const MeshVersion::IdSet& indexed, const TermMatcher& matcher,
                               const std::vector<std::string_view>& queries, ReviewKind kind) {
  if (matcher.empty()) return NoMatch{};
  if (indexed.size() == 1) return ExactMatch{{indexed.front()}, false};
  if (indexed.empty()) {
    auto same = matcher.identical(term);
    if (same.size() == 1) return ExactMatch{{same.front()}, false};
  }
  ReviewItem item;
  item.kind = kind;
  item.query_term = std::string(term);
  item.candidates = matcher.top(queries);
  return Suggestions{std::move(item)};
}

}  // namespace detail

/// Maps a PMN subject term to an SCR of version 0. Exact when exactly one SCR
/// carries the term (index normalization, then similarity normalization);
/// otherwise the five SCRs most similar to the term or to the new descriptor's
/// name are suggested; NoMatch when version 0 has no SCRs.
inline Resolution resolve_term_to_scr(std::string_view term, const MeshVersion& version0,
                                      const TermMatcher& scr_matcher, std::string_view new_descriptor_name) {
  return detail::resolve_with(term, version0.scrs_named(term), scr_matcher, {term, new_descriptor_name},
                              ReviewKind::pmn_scr);
}

inline Resolution resolve_term_to_scr(std::string_view term, const MeshVersion& version0,
                                      std::string_view new_descriptor_name) {
  return resolve_term_to_scr(term, version0, TermMatcher::for_scrs(version0), new_descriptor_name);
}

/// Same as resolve_term_to_scr, against every term of every version 0 descriptor.
inline Resolution resolve_term_to_descriptor(std::string_view term, const MeshVersion& version0,
                                             const TermMatcher& descriptor_matcher) {
  return detail::resolve_with(term, version0.descriptors_named(term), descriptor_matcher, {term},
                              ReviewKind::pi_host);
}

inline Resolution resolve_term_to_descriptor(std::string_view term, const MeshVersion& version0) {
  return resolve_term_to_descriptor(term, version0, TermMatcher::for_descriptors(version0));
}

// ---------------------------------------------------------------------------
// Overrides
// ---------------------------------------------------------------------------

struct PendingResolution {
  std::string descriptor_id;
  ReviewKind kind = ReviewKind::pmn_scr;
  std::string query_term;
  Resolution resolution;

  friend bool operator==(const PendingResolution&, const PendingResolution&) = default;
};

/// Checks that every id of `o` exists in version 0 (SCR ids for pmn_scr, descriptor ids for pi_host).
inline void validate_override(const OverrideEntry& o, const MeshVersion& version0) {
  for (const auto& id : o.resolved_ids) {
    bool ok = o.field == OverrideField::pmn_scr_resolution ? version0.find_scr(id) != nullptr
                                                           : version0.has_descriptor(id);
    if (!ok)
      throw OverrideError("overrides row " + std::to_string(o.source_row) + " (" + o.descriptor_id + "," +
                          std::string(to_string(o.field)) + "): id " + id + " not found in version " +
                          std::to_string(version0.year()));
  }
}

/// Replaces the non-exact resolutions named by an override with the confirmed ids.
/// Exact resolutions and resolutions without an override pass through unchanged.
inline std::vector<PendingResolution> apply_overrides(std::vector<PendingResolution> resolutions,
                                                      const std::vector<OverrideEntry>& overrides,
                                                      const MeshVersion& version0) {
  for (const auto& o : overrides) {
    validate_override(o, version0);
    for (auto& r : resolutions) {
      if (r.descriptor_id != o.descriptor_id || r.kind != review_kind_of(o.field) || is_exact(r.resolution)) continue;
      r.resolution = ExactMatch{o.resolved_ids, true};
    }
  }
  return resolutions;
}

inline const csv::Row& overrides_header() {
  static const csv::Row h{"descriptor_id", "kind", "resolved_ids"};
  return h;
}

inline std::vector<OverrideEntry> read_overrides(std::istream& in) {
  auto rows = csv::expect_header(csv::read_all(in), overrides_header(), "overrides file");
  std::vector<OverrideEntry> out;
  int row_no = 1;
  for (const auto& row : rows) {
    ++row_no;
    if (row.size() != 3)
      throw OverrideError("overrides row " + std::to_string(row_no) + ": expected 3 fields, got " +
                          std::to_string(row.size()));
    auto field = parse_override_field(text::trim(row[1]));
    if (!field) throw OverrideError("overrides row " + std::to_string(row_no) + ": unknown kind '" + row[1] + "'");
    OverrideEntry e;
    e.descriptor_id = std::string(text::trim(row[0]));
    e.field = *field;
    e.source_row = row_no;
    for (auto id : text::split(row[2], ';')) {
      id = text::trim(id);
      if (!id.empty()) e.resolved_ids.emplace_back(id);
    }
    if (e.descriptor_id.empty()) throw OverrideError("overrides row " + std::to_string(row_no) + ": empty descriptor_id");
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<OverrideEntry> read_overrides_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open overrides file " + path.string());
  return read_overrides(in);
}

inline void write_overrides_file(const std::filesystem::path& path, const std::vector<OverrideEntry>& entries) {
  std::vector<csv::Row> rows;
  for (const auto& e : entries)
    rows.push_back({e.descriptor_id, std::string(to_string(e.field)), text::join(e.resolved_ids, ";")});
  csv::write_file(path, overrides_header(), rows);
}

// ---------------------------------------------------------------------------
// Review file
// ---------------------------------------------------------------------------

inline const csv::Row& review_header() {
  static const csv::Row h{"descriptor_id", "kind", "query_term", "rank", "candidate_id", "candidate_term", "score"};
  return h;
}

inline void sort_review_items(std::vector<ReviewItem>& items) {
  std::sort(items.begin(), items.end(), [](const ReviewItem& a, const ReviewItem& b) {
    return std::tie(a.descriptor_id, a.kind, a.query_term) < std::tie(b.descriptor_id, b.kind, b.query_term);
  });
}

/// One row per candidate; an item without candidates gets a single row with empty candidate fields.
inline void write_review_file(const std::filesystem::path& path, std::vector<ReviewItem> items) {
  sort_review_items(items);
  std::vector<csv::Row> rows;
  for (const auto& item : items) {
    std::string kind(to_string(item.kind));
    if (item.candidates.empty()) rows.push_back({item.descriptor_id, kind, item.query_term, "", "", "", ""});
    for (std::size_t i = 0; i < item.candidates.size(); ++i) {
      const auto& c = item.candidates[i];
      rows.push_back({item.descriptor_id, kind, item.query_term, std::to_string(i + 1), c.id, c.term,
                      text::format_double(c.score)});
    }
  }
  csv::write_file(path, review_header(), rows);
}

inline std::vector<ReviewItem> read_review_file(const std::filesystem::path& path) {
  auto rows = csv::expect_header(csv::read_file(path), review_header(), path.string());
  std::vector<ReviewItem> items;
  for (const auto& row : rows) {
    if (row.size() != 7) throw Error(path.string() + ": malformed review row");
    auto kind = parse_review_kind(row[1]);
    if (!kind) throw Error(path.string() + ": unknown review kind '" + row[1] + "'");
    if (items.empty() || items.back().descriptor_id != row[0] || items.back().kind != *kind ||
        items.back().query_term != row[2])
      items.push_back(ReviewItem{row[0], *kind, row[2], {}});
    if (row[3].empty()) continue;
    auto score = text::parse_double(row[6]);
    if (!score) throw Error(path.string() + ": bad score '" + row[6] + "'");
    items.back().candidates.push_back({row[4], row[5], *score});
  }
  return items;
}

}  // namespace meshprov
