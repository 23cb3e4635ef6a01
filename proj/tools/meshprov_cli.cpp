// meshprov: harvest MeSH releases, classify new descriptors by provenance, report statistics.
//
// Exit codes: 0 clean, 2 finished with items pending manual review, 1 fatal or usage error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "meshprov.hpp"

namespace {

struct Flags {
  std::string config;
  std::string data_dir;
  std::optional<int> first_year, last_year, reference_year;
  std::string overrides;
  std::string out;
  std::optional<unsigned> jobs;
  std::string log_level;
};

meshprov::RunConfig build_config(const Flags& f) {
  meshprov::RunConfig cfg;
  cfg.jobs = meshprov::default_jobs();
  if (!f.config.empty()) cfg = meshprov::read_config_file(f.config, cfg);
  auto set = [&](const char* key, const std::string& value) {
    meshprov::apply_config_value(cfg, key, value, ".", std::string("--") + key);
  };
  if (!f.data_dir.empty()) set("data_dir", f.data_dir);
  if (f.first_year) cfg.window.first_year = *f.first_year;
  if (f.last_year) cfg.window.last_year = *f.last_year;
  if (f.reference_year) cfg.window.reference_year = *f.reference_year;
  if (!f.overrides.empty()) set("overrides_path", f.overrides);
  if (!f.out.empty()) set("output_dir", f.out);
  if (f.jobs) set("jobs", std::to_string(*f.jobs));
  if (!f.log_level.empty()) set("log_level", f.log_level);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MeSH new-descriptor provenance toolchain"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--data-dir", f.data_dir, "directory holding the yearly release XML files");
  app.add_option("--first-year", f.first_year, "first year of the study window");
  app.add_option("--last-year", f.last_year, "last year of the study window");
  app.add_option("--reference-year", f.reference_year, "release used for current hierarchy relations");
  app.add_option("--overrides", f.overrides, "manual confirmations CSV (descriptor_id,kind,resolved_ids)");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--log-level", f.log_level, "debug, info, warn or error");

  auto* harvest_cmd = app.add_subcommand("harvest", "parse and cache every release of the window");
  auto* classify_cmd = app.add_subcommand("classify", "annotate new descriptors; write per-year CSVs and review.csv");
  auto* report_cmd = app.add_subcommand("report", "aggregate annotation CSVs into statistics tables");
  auto* run_cmd = app.add_subcommand("run", "harvest, classify and report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? meshprov::exit_clean : meshprov::exit_fatal;
  }

  meshprov::Logger log;
  try {
    meshprov::RunConfig cfg = build_config(f);
    log.set_threshold(cfg.log_level);
    if (harvest_cmd->parsed()) {
      meshprov::harvest(cfg, log);
      return meshprov::exit_clean;
    }
    if (classify_cmd->parsed()) return meshprov::classify(cfg, log).exit_code();
    if (report_cmd->parsed()) {
      meshprov::report(cfg, log);
      return meshprov::exit_clean;
    }
    if (run_cmd->parsed()) return meshprov::run_all(cfg, log);
  } catch (const meshprov::ConfigError& e) {
    log.error(std::string("usage: ") + e.what());
    return meshprov::exit_fatal;
  } catch (const std::exception& e) {
    log.error(e.what());
    return meshprov::exit_fatal;
  }
  return meshprov::exit_fatal;
}
