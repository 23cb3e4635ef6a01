#pragma once

// The three pipeline stages (harvest, classify, report) over a RunConfig.
// Stage functions return the process exit code; fatal problems are thrown.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "meshprov/config.hpp"
#include "meshprov/csv.hpp"
#include "meshprov/error.hpp"
#include "meshprov/harvester.hpp"
#include "meshprov/hierarchy.hpp"
#include "meshprov/log.hpp"
#include "meshprov/mesh_xml.hpp"
#include "meshprov/notes.hpp"
#include "meshprov/provenance.hpp"
#include "meshprov/report.hpp"
#include "meshprov/version_cache.hpp"

namespace meshprov {

enum ExitCode : int { exit_clean = 0, exit_fatal = 1, exit_pending_review = 2 };

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(n, jobs == 0 ? 1 : jobs));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < workers; ++t) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

/// Loads releases through the on-disk cache, parsing the XML on a miss.
class VersionStore {
 public:
  VersionStore(const RunConfig& cfg, Logger& log) : cfg_(cfg), log_(log), cache_(cfg.cache_dir()) {}

  /// Throws IoError naming every year in `years` whose descriptor or SCR file is missing.
  void require_files(const std::vector<int>& years) const {
    std::vector<std::string> missing;
    for (int y : years) {
      std::string what;
      if (!std::filesystem::is_regular_file(cfg_.descriptor_file(y))) what += " " + cfg_.descriptor_file(y).string();
      if (!std::filesystem::is_regular_file(cfg_.scr_file(y))) what += " " + cfg_.scr_file(y).string();
      if (!what.empty()) missing.push_back(std::to_string(y) + " (" + std::string(text::trim(what)) + ")");
    }
    if (!missing.empty()) throw IoError("missing release files for years: " + text::join(missing, ", "));
  }

  LoadedVersion load(int year) const {
    auto desc_path = cfg_.descriptor_file(year);
    auto scr_path = cfg_.scr_file(year);
    auto desc_stamp = stamp_of(desc_path);
    auto scr_stamp = stamp_of(scr_path);
    if (auto hit = cache_.load(year, desc_stamp, scr_stamp)) {
      log_.info("cache hit for " + std::to_string(year) + " (" + cache_.file_for(year).string() + ")");
      return std::move(*hit);
    }
    log_.info("parsing " + std::to_string(year) + " from " + desc_path.string() + " and " + scr_path.string());
    LoadedVersion v = load_version(year, desc_path, scr_path);
    cache_.store(v, desc_stamp, scr_stamp);
    return v;
  }

 private:
  const RunConfig& cfg_;
  Logger& log_;
  VersionCache cache_;
};

// ---------------------------------------------------------------------------
// harvest
// ---------------------------------------------------------------------------

/// Loads every required release (baseline through reference), refreshing the
/// cache, and writes parse_report.txt. Returns the reports in year order.
inline std::vector<ParseReport> harvest(const RunConfig& cfg, Logger& log) {
  cfg.validate_paths();
  VersionStore store(cfg, log);
  auto years = cfg.window.required_years();
  store.require_files(years);
  std::vector<ParseReport> reports(years.size());
  parallel_for(years.size(), cfg.jobs, [&](std::size_t i) { reports[i] = store.load(years[i]).report; });

  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream out(cfg.parse_report_file(), std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + cfg.parse_report_file().string());
  for (const auto& r : reports)
    for (const auto& line : report_lines(r)) out << line << '\n';
  if (!out) throw IoError("cannot write " + cfg.parse_report_file().string());
  for (const auto& r : reports) {
    log.info(report_lines(r).front());
    for (const auto& w : r.warnings) log.debug("year " + std::to_string(r.year) + ": " + w);
  }
  return reports;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

struct ClassifyResult {
  std::map<int, std::vector<NewDescriptorRecord>> records;
  std::vector<ReviewItem> reviews;
  std::size_t baseline_descriptors = 0;
  std::size_t pmn_pattern_cases = 0;
  std::size_t pmn_auto_resolved = 0;
  std::size_t warning_count = 0;

  std::size_t record_count() const {
    std::size_t n = 0;
    for (const auto& [y, rs] : records) n += rs.size();
    return n;
  }
  int exit_code() const { return reviews.empty() ? exit_clean : exit_pending_review; }
};

inline const csv::Row& classify_summary_header() {
  static const csv::Row h{"metric", "value"};
  return h;
}

inline void write_classify_summary(const std::filesystem::path& path, const ClassifyResult& r) {
  double rate = r.pmn_pattern_cases ? static_cast<double>(r.pmn_auto_resolved) / static_cast<double>(r.pmn_pattern_cases)
                                    : 0.0;
  std::vector<csv::Row> rows{{"new_descriptors", std::to_string(r.record_count())},
                             {"baseline_descriptors", std::to_string(r.baseline_descriptors)},
                             {"pmn_pattern_cases", std::to_string(r.pmn_pattern_cases)},
                             {"pmn_auto_resolved", std::to_string(r.pmn_auto_resolved)},
                             {"pmn_auto_resolution_rate", text::format_double(rate)},
                             {"review_items", std::to_string(r.reviews.size())},
                             {"warnings", std::to_string(r.warning_count)}};
  csv::write_file(path, classify_summary_header(), rows);
}

/// metric -> value from classify_summary.csv.
inline std::map<std::string, std::string> read_classify_summary(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  for (const auto& row : csv::expect_header(csv::read_file(path), classify_summary_header(), path.string())) {
    if (row.size() != 2) throw Error(path.string() + ": malformed row");
    out[row[0]] = row[1];
  }
  return out;
}

/// Identifies the retained new descriptors of every window year, annotates
/// them, and writes annotations/<year>.csv, relations/<year>.csv, review.csv
/// and classify_summary.csv. Releases are held in a sliding window: the
/// reference, the previous year and the current year.
inline ClassifyResult classify(const RunConfig& cfg, Logger& log) {
  cfg.validate_paths();
  std::vector<OverrideEntry> overrides;
  if (cfg.overrides_path) overrides = read_overrides_file(*cfg.overrides_path);

  VersionStore store(cfg, log);
  store.require_files(cfg.window.required_years());

  ClassifyResult result;
  auto warn = [&](const std::string& w) {
    ++result.warning_count;
    log.warn(w);
  };

  VersionPtr reference = store.load(cfg.window.reference_year).version;
  VersionPtr previous = store.load(cfg.window.baseline_year()).version;
  result.baseline_descriptors = previous->descriptors().size();
  NewDescriptorTracker tracker(*previous, *reference);
  HierarchyGraph graph(*reference);
  std::set<std::string> seen_new;

  for (int year : cfg.window.years()) {
    VersionPtr current = year == reference->year() ? reference : store.load(year).version;
    std::vector<std::string> warnings;
    auto fresh = tracker.advance(*previous, *current, warnings);
    for (const auto& w : warnings) warn(w);
    std::vector<std::string> ids(fresh.begin(), fresh.end());
    seen_new.insert(ids.begin(), ids.end());

    ExtractionContext ctx(*previous, overrides);
    std::vector<Annotation> annotations(ids.size());
    parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
      annotations[i] = annotate(*current->find_descriptor(ids[i]), year, ctx, *reference, &graph);
    });

    std::vector<NewDescriptorRecord> records;
    std::vector<std::pair<std::string, HostRelation>> relations;
    for (auto& a : annotations) {
      for (const auto& w : a.warnings) warn(w);
      if (a.pmn_pattern) ++result.pmn_pattern_cases;
      if (a.pmn_auto_resolved) ++result.pmn_auto_resolved;
      for (auto& item : a.reviews) result.reviews.push_back(std::move(item));
      for (auto& rel : a.relations) relations.emplace_back(a.record.descriptor_id, std::move(rel));
      records.push_back(std::move(a.record));
    }
    write_year_csv(cfg.annotation_file(year), year, records);
    write_relations_csv(cfg.relations_file(year), std::move(relations));
    log.info("year " + std::to_string(year) + ": " + std::to_string(records.size()) + " new descriptors annotated");
    result.records[year] = std::move(records);
    previous = std::move(current);
  }

  std::set<std::string> unused;
  for (const auto& o : overrides)
    if (!seen_new.count(o.descriptor_id)) unused.insert(o.descriptor_id);
  for (const auto& id : unused) warn("override for " + id + " does not match any new descriptor in the window");

  sort_review_items(result.reviews);
  write_review_file(cfg.review_file(), result.reviews);
  write_classify_summary(cfg.classify_summary_file(), result);
  if (!result.reviews.empty())
    log.warn(std::to_string(result.reviews.size()) + " items need manual review; see " + cfg.review_file().string());
  return result;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

/// Aggregates the annotation CSVs of the window into the stats tables.
/// The baseline size comes from classify_summary.csv, or from the baseline
/// release when that file is absent.
inline StatsBundle report(const RunConfig& cfg, Logger& log) {
  cfg.validate();
  std::vector<std::string> missing;
  for (int y : cfg.window.years())
    if (!std::filesystem::is_regular_file(cfg.annotation_file(y))) missing.push_back(std::to_string(y));
  if (!missing.empty())
    throw IoError("missing annotation files in " + cfg.annotations_dir().string() +
                  " for years: " + text::join(missing, ", "));

  std::vector<NewDescriptorRecord> records;
  for (int y : cfg.window.years()) {
    auto rs = read_year_csv(cfg.annotation_file(y));
    for (const auto& r : rs)
      if (r.intro_year != y)
        throw Error(cfg.annotation_file(y).string() + ": record " + r.descriptor_id + " has intro_year " +
                    std::to_string(r.intro_year));
    records.insert(records.end(), std::make_move_iterator(rs.begin()), std::make_move_iterator(rs.end()));
  }

  Count baseline = 0;
  std::optional<Count> from_summary;
  if (std::filesystem::is_regular_file(cfg.classify_summary_file())) {
    auto summary = read_classify_summary(cfg.classify_summary_file());
    if (auto it = summary.find("baseline_descriptors"); it != summary.end())
      from_summary = text::parse_int<Count>(it->second);
  }
  if (from_summary) {
    baseline = *from_summary;
  } else {
    VersionStore store(cfg, log);
    store.require_files({cfg.window.baseline_year()});
    baseline = static_cast<Count>(store.load(cfg.window.baseline_year()).version->descriptors().size());
  }

  StatsBundle bundle = aggregate(records, baseline, cfg.window.years());
  write_stats(bundle, cfg.stats_dir());
  log.info("report: " + std::to_string(bundle.record_count) + " records aggregated into " + cfg.stats_dir().string());
  return bundle;
}

/// harvest, classify and report in sequence; the exit code is classify's.
inline int run_all(const RunConfig& cfg, Logger& log) {
  harvest(cfg, log);
  int code = classify(cfg, log).exit_code();
  report(cfg, log);
  return code;
}

}  // namespace meshprov
