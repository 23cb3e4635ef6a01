#pragma once

// Per-year annotation CSVs and the aggregate frequency tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "meshprov/csv.hpp"
#include "meshprov/error.hpp"
#include "meshprov/model.hpp"
#include "meshprov/provenance.hpp"
#include "meshprov/text.hpp"

namespace meshprov {

// ---------------------------------------------------------------------------
// Annotation CSV
// ---------------------------------------------------------------------------

inline const csv::Row& year_csv_header() {
  static const csv::Row h{"descriptor_id", "name",          "intro_year", "category",     "host_ids",
                          "host_names",    "host_coverage", "codes",      "tree_numbers", "mesh_categories"};
  return h;
}

inline csv::Row to_row(const NewDescriptorRecord& r) {
  std::vector<std::string> ids, names, coverage, codes, trees, letters;
  for (const auto& h : r.hosts) {
    ids.push_back(h.descriptor_id);
    names.push_back(h.name);
    coverage.emplace_back(to_string(h.coverage));
  }
  for (const auto& c : r.codes) codes.push_back(c.str());
  for (const auto& t : r.tree_numbers) trees.push_back(t.str());
  for (char l : r.mesh_category_letters) letters.emplace_back(1, l);
  return {r.descriptor_id,
          r.name,
          std::to_string(r.intro_year),
          std::to_string(digit(r.category)),
          text::join_list(ids),
          text::join_list(names),
          text::join_list(coverage),
          text::join_list(codes),
          text::join_list(trees),
          text::join_list(letters)};
}

inline NewDescriptorRecord record_from_row(const csv::Row& row, const std::string& where) {
  auto fail = [&](const std::string& why) -> Error { return Error(where + ": " + why); };
  if (row.size() != year_csv_header().size()) throw fail("expected 10 fields");
  NewDescriptorRecord r;
  r.descriptor_id = row[0];
  r.name = row[1];
  auto year = text::parse_int<int>(row[2]);
  if (!year) throw fail("bad intro_year '" + row[2] + "'");
  r.intro_year = *year;
  auto cat_digit = text::parse_int<int>(row[3]);
  auto cat = cat_digit ? category_from_digit(*cat_digit) : std::nullopt;
  if (!cat) throw fail("bad category '" + row[3] + "'");
  r.category = *cat;
  auto ids = text::split_list(row[4]);
  auto names = text::split_list(row[5]);
  auto coverage = text::split_list(row[6]);
  if (ids.size() != names.size() || ids.size() != coverage.size()) throw fail("host lists differ in length");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto cov = parse_coverage(coverage[i]);
    if (!cov) throw fail("bad host coverage '" + coverage[i] + "'");
    r.hosts.push_back({ids[i], names[i], *cov});
  }
  for (const auto& c : text::split_list(row[7])) {
    auto code = ProvenanceCode::try_parse(c);
    if (!code) throw fail("bad provenance code '" + c + "'");
    r.codes.insert(*code);
  }
  for (const auto& t : text::split_list(row[8])) {
    auto tn = TreeNumber::try_parse(t);
    if (!tn) throw fail("bad tree number '" + t + "'");
    r.tree_numbers.push_back(*tn);
  }
  for (const auto& l : text::split_list(row[9])) {
    if (l.size() != 1) throw fail("bad MeSH category '" + l + "'");
    r.mesh_category_letters.insert(l[0]);
  }
  return r;
}

/// Writes one year's records sorted by descriptor id.
inline void write_year_csv(const std::filesystem::path& path, int year, std::vector<NewDescriptorRecord> records) {
  for (const auto& r : records)
    if (r.intro_year != year)
      throw PreconditionError("record " + r.descriptor_id + " introduced in " + std::to_string(r.intro_year) +
                              " written to the " + std::to_string(year) + " file");
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.descriptor_id < b.descriptor_id; });
  std::vector<csv::Row> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_row(r));
  csv::write_file(path, year_csv_header(), rows);
}

inline std::vector<NewDescriptorRecord> read_year_csv(const std::filesystem::path& path) {
  auto rows = csv::expect_header(csv::read_file(path), year_csv_header(), path.string());
  std::vector<NewDescriptorRecord> out;
  std::size_t line = 1;
  for (const auto& row : rows) out.push_back(record_from_row(row, path.string() + " record " + std::to_string(++line)));
  return out;
}

inline const csv::Row& relations_csv_header() {
  static const csv::Row h{"descriptor_id", "host_id", "relation_type", "ancestor_gap", "distance", "code"};
  return h;
}

/// Per-host relation details (relation type, gap, hierarchy distance) behind the codes.
inline void write_relations_csv(const std::filesystem::path& path, std::vector<std::pair<std::string, HostRelation>> rels) {
  std::sort(rels.begin(), rels.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second.host_id) < std::tie(b.first, b.second.host_id);
  });
  std::vector<csv::Row> rows;
  for (const auto& [id, rel] : rels)
    rows.push_back({id, rel.host_id, std::string(to_string(rel.relation)),
                    rel.ancestor_gap ? std::to_string(*rel.ancestor_gap) : "", rel.distance.str(), rel.code.str()});
  csv::write_file(path, relations_csv_header(), rows);
}

// ---------------------------------------------------------------------------
// Aggregate statistics
// ---------------------------------------------------------------------------

using Count = std::int64_t;

/// Frequency tables over the annotated records. Category counts count each
/// record once; type counts and crosstab cells count each record once per
/// distinct type it carries. Year, category and type keys are dense (zeros
/// included); MeSH category letters cover every letter seen in any year.
struct StatsBundle {
  std::vector<int> years;
  std::map<std::pair<int, ProvenanceCategory>, Count> per_year_category_counts;
  std::map<std::pair<int, ProvenanceType>, Count> per_year_type_counts;
  std::map<std::pair<ProvenanceCategory, ProvenanceType>, Count> code_crosstab;
  std::map<std::pair<int, char>, Count> per_year_mesh_category_counts;
  std::map<ProvenanceCategory, Count> category_totals;
  std::map<ProvenanceType, Count> type_totals;
  Count record_count = 0;
  Count baseline_descriptor_count = 0;
  Count unresolved_host_records = 0;
  double multi_code_fraction = 0.0;
  double extension_ratio = 0.0;

  friend bool operator==(const StatsBundle&, const StatsBundle&) = default;
};

/// Builds the bundle. `years` lists the window years (so empty years still get
/// columns); years of the records are added when missing.
inline StatsBundle aggregate(const std::vector<NewDescriptorRecord>& records, Count baseline_descriptor_count,
                             std::vector<int> years = {}) {
  StatsBundle b;
  std::set<int> year_set(years.begin(), years.end());
  std::set<char> letters;
  for (const auto& r : records) {
    year_set.insert(r.intro_year);
    letters.insert(r.mesh_category_letters.begin(), r.mesh_category_letters.end());
  }
  b.years.assign(year_set.begin(), year_set.end());
  for (int y : b.years) {
    for (auto c : kAllCategories) b.per_year_category_counts[{y, c}] = 0;
    for (auto t : kAllTypes) b.per_year_type_counts[{y, t}] = 0;
    for (char l : letters) b.per_year_mesh_category_counts[{y, l}] = 0;
  }
  for (auto c : kAllCategories) {
    b.category_totals[c] = 0;
    for (auto t : kAllTypes) b.code_crosstab[{c, t}] = 0;
  }
  for (auto t : kAllTypes) b.type_totals[t] = 0;

  Count two_three = 0, multi = 0;
  for (const auto& r : records) {
    ++b.record_count;
    ++b.per_year_category_counts[{r.intro_year, r.category}];
    ++b.category_totals[r.category];
    for (auto t : r.types()) {
      ++b.per_year_type_counts[{r.intro_year, t}];
      ++b.type_totals[t];
    }
    for (const auto& code : r.codes) ++b.code_crosstab[{code.category(), code.type()}];
    for (char l : r.mesh_category_letters) ++b.per_year_mesh_category_counts[{r.intro_year, l}];
    if (r.unresolved_hosts()) ++b.unresolved_host_records;
    if (r.category == ProvenanceCategory::cat2_old_scr || r.category == ProvenanceCategory::cat3_new_pi_concept) {
      ++two_three;
      if (r.codes.size() >= 2) ++multi;
    }
  }
  b.baseline_descriptor_count = baseline_descriptor_count;
  b.multi_code_fraction = two_three ? static_cast<double>(multi) / static_cast<double>(two_three) : 0.0;
  b.extension_ratio = (baseline_descriptor_count > 0 && b.record_count > 0)
                          ? static_cast<double>(b.record_count) / static_cast<double>(baseline_descriptor_count)
                          : 0.0;
  return b;
}

inline StatsBundle aggregate(const std::vector<NewDescriptorRecord>& records, const MeshVersion& baseline,
                             std::vector<int> years = {}) {
  return aggregate(records, static_cast<Count>(baseline.descriptors().size()), std::move(years));
}

struct AnnualSpread {
  double mean = 0.0;
  double sd_population = 0.0;
  double sd_sample = 0.0;
};

inline AnnualSpread spread(const std::vector<Count>& values) {
  AnnualSpread s;
  if (values.empty()) return s;
  double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (auto v : values) sum += static_cast<double>(v);
  s.mean = sum / n;
  double ss = 0.0;
  for (auto v : values) ss += (static_cast<double>(v) - s.mean) * (static_cast<double>(v) - s.mean);
  s.sd_population = std::sqrt(ss / n);
  s.sd_sample = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return s;
}

inline AnnualSpread annual_spread(const StatsBundle& b, ProvenanceCategory c) {
  std::vector<Count> v;
  for (int y : b.years) v.push_back(b.per_year_category_counts.at({y, c}));
  return spread(v);
}

inline AnnualSpread annual_spread(const StatsBundle& b, ProvenanceType t) {
  std::vector<Count> v;
  for (int y : b.years) v.push_back(b.per_year_type_counts.at({y, t}));
  return spread(v);
}

inline const std::vector<std::string>& stats_file_names() {
  static const std::vector<std::string> names{"category_by_year.csv", "type_by_year.csv", "code_crosstab.csv",
                                              "mesh_category_by_year.csv", "summary.csv"};
  return names;
}

/// Writes the five tables. Years ascend left to right; rows follow categories 1-4 and types 0-5.
inline void write_stats(const StatsBundle& b, const std::filesystem::path& dir) {
  auto year_header = [&](const std::string& first) {
    csv::Row h{first};
    for (int y : b.years) h.push_back(std::to_string(y));
    return h;
  };
  {
    std::vector<csv::Row> rows;
    for (auto c : kAllCategories) {
      csv::Row row{std::to_string(digit(c))};
      for (int y : b.years) row.push_back(std::to_string(b.per_year_category_counts.at({y, c})));
      rows.push_back(std::move(row));
    }
    csv::write_file(dir / "category_by_year.csv", year_header("category"), rows);
  }
  {
    std::vector<csv::Row> rows;
    for (auto t : kAllTypes) {
      csv::Row row{std::to_string(digit(t))};
      for (int y : b.years) row.push_back(std::to_string(b.per_year_type_counts.at({y, t})));
      rows.push_back(std::move(row));
    }
    csv::write_file(dir / "type_by_year.csv", year_header("type"), rows);
  }
  {
    csv::Row header{"category"};
    for (auto t : kAllTypes) header.push_back(std::to_string(digit(t)));
    header.push_back("total");
    std::vector<csv::Row> rows;
    for (auto c : kAllCategories) {
      csv::Row row{std::to_string(digit(c))};
      for (auto t : kAllTypes) row.push_back(std::to_string(b.code_crosstab.at({c, t})));
      row.push_back(std::to_string(b.category_totals.at(c)));
      rows.push_back(std::move(row));
    }
    csv::Row totals{"total"};
    for (auto t : kAllTypes) totals.push_back(std::to_string(b.type_totals.at(t)));
    totals.push_back(std::to_string(b.record_count));
    rows.push_back(std::move(totals));
    csv::write_file(dir / "code_crosstab.csv", header, rows);
  }
  {
    std::set<char> letters;
    for (const auto& [key, n] : b.per_year_mesh_category_counts) letters.insert(key.second);
    std::vector<csv::Row> rows;
    for (char l : letters) {
      csv::Row row{std::string(1, l)};
      for (int y : b.years) row.push_back(std::to_string(b.per_year_mesh_category_counts.at({y, l})));
      rows.push_back(std::move(row));
    }
    csv::write_file(dir / "mesh_category_by_year.csv", year_header("mesh_category"), rows);
  }
  {
    std::vector<csv::Row> rows;
    auto add = [&](std::string key, std::string value) { rows.push_back({std::move(key), std::move(value)}); };
    add("records", std::to_string(b.record_count));
    add("baseline_descriptors", std::to_string(b.baseline_descriptor_count));
    add("extension_ratio", text::format_double(b.extension_ratio));
    add("multi_code_fraction", text::format_double(b.multi_code_fraction));
    add("unresolved_host_records", std::to_string(b.unresolved_host_records));
    for (auto c : kAllCategories) add("category_" + std::to_string(digit(c)) + "_total", std::to_string(b.category_totals.at(c)));
    for (auto t : kAllTypes) add("type_" + std::to_string(digit(t)) + "_total", std::to_string(b.type_totals.at(t)));
    for (auto c : kAllCategories) {
      auto s = annual_spread(b, c);
      std::string p = "category_" + std::to_string(digit(c)) + "_annual_";
      add(p + "mean", text::format_double(s.mean));
      add(p + "sd_population", text::format_double(s.sd_population));
      add(p + "sd_sample", text::format_double(s.sd_sample));
    }
    for (auto t : kAllTypes) {
      auto s = annual_spread(b, t);
      std::string p = "type_" + std::to_string(digit(t)) + "_annual_";
      add(p + "mean", text::format_double(s.mean));
      add(p + "sd_population", text::format_double(s.sd_population));
      add(p + "sd_sample", text::format_double(s.sd_sample));
    }
    csv::write_file(dir / "summary.csv", {"metric", "value"}, rows);
  }
}

namespace detail {

inline Count parse_count(const std::string& s, const std::string& where) {
  auto v = text::parse_int<Count>(s);
  if (!v) throw Error(where + ": bad count '" + s + "'");
  return *v;
}

inline std::vector<int> parse_year_header(const csv::Row& header, const std::string& where) {
  std::vector<int> years;
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto y = text::parse_int<int>(header[i]);
    if (!y) throw Error(where + ": bad year column '" + header[i] + "'");
    years.push_back(*y);
  }
  return years;
}

}  // namespace detail

/// Reads the tables written by write_stats back into a bundle.
inline StatsBundle read_stats(const std::filesystem::path& dir) {
  using detail::parse_count;
  StatsBundle b;
  auto load = [&](const std::string& name) {
    auto rows = csv::read_file(dir / name);
    if (rows.empty()) throw Error((dir / name).string() + ": empty file");
    return rows;
  };
  {
    auto where = (dir / "category_by_year.csv").string();
    auto rows = load("category_by_year.csv");
    b.years = detail::parse_year_header(rows[0], where);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      auto d = text::parse_int<int>(rows[i][0]);
      auto c = d ? category_from_digit(*d) : std::nullopt;
      if (!c || rows[i].size() != b.years.size() + 1) throw Error(where + ": malformed row");
      for (std::size_t k = 0; k < b.years.size(); ++k)
        b.per_year_category_counts[{b.years[k], *c}] = parse_count(rows[i][k + 1], where);
    }
  }
  {
    auto where = (dir / "type_by_year.csv").string();
    auto rows = load("type_by_year.csv");
    auto years = detail::parse_year_header(rows[0], where);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      auto d = text::parse_int<int>(rows[i][0]);
      auto t = d ? type_from_digit(*d) : std::nullopt;
      if (!t || rows[i].size() != years.size() + 1) throw Error(where + ": malformed row");
      for (std::size_t k = 0; k < years.size(); ++k)
        b.per_year_type_counts[{years[k], *t}] = parse_count(rows[i][k + 1], where);
    }
  }
  {
    auto where = (dir / "code_crosstab.csv").string();
    auto rows = load("code_crosstab.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (row.size() != 8) throw Error(where + ": malformed row");
      if (row[0] == "total") {
        for (auto t : kAllTypes) b.type_totals[t] = parse_count(row[1 + digit(t)], where);
        b.record_count = parse_count(row[7], where);
        continue;
      }
      auto d = text::parse_int<int>(row[0]);
      auto c = d ? category_from_digit(*d) : std::nullopt;
      if (!c) throw Error(where + ": bad category '" + row[0] + "'");
      for (auto t : kAllTypes) b.code_crosstab[{*c, t}] = parse_count(row[1 + digit(t)], where);
      b.category_totals[*c] = parse_count(row[7], where);
    }
  }
  {
    auto where = (dir / "mesh_category_by_year.csv").string();
    auto rows = load("mesh_category_by_year.csv");
    auto years = detail::parse_year_header(rows[0], where);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][0].size() != 1 || rows[i].size() != years.size() + 1) throw Error(where + ": malformed row");
      for (std::size_t k = 0; k < years.size(); ++k)
        b.per_year_mesh_category_counts[{years[k], rows[i][0][0]}] = parse_count(rows[i][k + 1], where);
    }
  }
  {
    auto where = (dir / "summary.csv").string();
    auto rows = load("summary.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() != 2) throw Error(where + ": malformed row");
      const auto& key = rows[i][0];
      const auto& value = rows[i][1];
      auto as_double = [&] {
        auto v = text::parse_double(value);
        if (!v) throw Error(where + ": bad value for " + key);
        return *v;
      };
      if (key == "baseline_descriptors") b.baseline_descriptor_count = parse_count(value, where);
      else if (key == "unresolved_host_records") b.unresolved_host_records = parse_count(value, where);
      else if (key == "extension_ratio") b.extension_ratio = as_double();
      else if (key == "multi_code_fraction") b.multi_code_fraction = as_double();
    }
  }
  return b;
}

}  // namespace meshprov
