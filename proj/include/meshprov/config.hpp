#pragma once

// Run configuration: a plain key=value file, overridable from the command line.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>

#include "meshprov/error.hpp"
#include "meshprov/harvester.hpp"
#include "meshprov/log.hpp"
#include "meshprov/text.hpp"

namespace meshprov {

struct RunConfig {
  std::filesystem::path data_dir = ".";
  std::string descriptor_template = "desc{year}.xml";
  std::string scr_template = "supp{year}.xml";
  StudyWindow window;
  std::optional<std::filesystem::path> overrides_path;
  std::filesystem::path output_dir = "out";
  LogLevel log_level = LogLevel::info;
  unsigned jobs = 1;

  std::filesystem::path descriptor_file(int year) const { return data_dir / expand(descriptor_template, year); }
  std::filesystem::path scr_file(int year) const { return data_dir / expand(scr_template, year); }

  std::filesystem::path cache_dir() const { return output_dir / "cache"; }
  std::filesystem::path annotations_dir() const { return output_dir / "annotations"; }
  std::filesystem::path relations_dir() const { return output_dir / "relations"; }
  std::filesystem::path stats_dir() const { return output_dir / "stats"; }
  std::filesystem::path review_file() const { return output_dir / "review.csv"; }
  std::filesystem::path parse_report_file() const { return output_dir / "parse_report.txt"; }
  std::filesystem::path classify_summary_file() const { return output_dir / "classify_summary.csv"; }
  std::filesystem::path annotation_file(int year) const {
    return annotations_dir() / (std::to_string(year) + ".csv");
  }
  std::filesystem::path relations_file(int year) const { return relations_dir() / (std::to_string(year) + ".csv"); }

  static std::string expand(const std::string& tmpl, int year) {
    static constexpr std::string_view key = "{year}";
    std::string out = tmpl;
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos))
      out.replace(pos, key.size(), std::to_string(year));
    return out;
  }

  /// Window and template checks; no filesystem access.
  void validate() const {
    window.validate();
    for (const auto* t : {&descriptor_template, &scr_template})
      if (t->find("{year}") == std::string::npos)
        throw ConfigError("file name template '" + *t + "' has no {year} placeholder");
    if (jobs == 0) throw ConfigError("jobs must be at least 1");
  }

  /// validate() plus existence of the input directory and overrides file.
  void validate_paths() const {
    validate();
    if (!std::filesystem::is_directory(data_dir))
      throw ConfigError("data_dir " + data_dir.string() + " is not a directory");
    if (overrides_path && !std::filesystem::is_regular_file(*overrides_path))
      throw ConfigError("overrides file " + overrides_path->string() + " does not exist");
  }
};

inline unsigned default_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

namespace detail {

inline int config_int(const std::string& key, const std::string& value, const std::string& where) {
  auto v = text::parse_int<int>(value);
  if (!v) throw ConfigError(where + ": " + key + " expects an integer, got '" + value + "'");
  return *v;
}

}  // namespace detail

/// Applies one key. Relative paths are resolved against `base`.
inline void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                               const std::filesystem::path& base, const std::string& where) {
  auto path = [&] { return base / std::filesystem::path(value); };
  if (key == "data_dir") cfg.data_dir = path();
  else if (key == "descriptor_template") cfg.descriptor_template = value;
  else if (key == "scr_template") cfg.scr_template = value;
  else if (key == "first_year") cfg.window.first_year = detail::config_int(key, value, where);
  else if (key == "last_year") cfg.window.last_year = detail::config_int(key, value, where);
  else if (key == "reference_year") cfg.window.reference_year = detail::config_int(key, value, where);
  else if (key == "overrides_path") {
    if (value.empty()) cfg.overrides_path.reset();
    else cfg.overrides_path = path();
  } else if (key == "output_dir") cfg.output_dir = path();
  else if (key == "log_level") {
    auto level = parse_log_level(value);
    if (!level) throw ConfigError(where + ": unknown log_level '" + value + "'");
    cfg.log_level = *level;
  } else if (key == "jobs") {
    int n = detail::config_int(key, value, where);
    if (n < 1) throw ConfigError(where + ": jobs must be at least 1");
    cfg.jobs = static_cast<unsigned>(n);
  } else {
    throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

/// Reads `key = value` lines; '#' starts a comment line, blank lines are ignored.
inline void read_config_stream(RunConfig& cfg, std::istream& in, const std::filesystem::path& base,
                               const std::string& source) {
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string where = source + ":" + std::to_string(n);
    auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    std::string key(text::trim(body.substr(0, eq)));
    std::string value(text::trim(body.substr(eq + 1)));
    apply_config_value(cfg, key, value, base, where);
  }
}

inline RunConfig read_config_file(const std::filesystem::path& path, RunConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  read_config_stream(cfg, in, path.parent_path(), path.string());
  return cfg;
}

}  // namespace meshprov
