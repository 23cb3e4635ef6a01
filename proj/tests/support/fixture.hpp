#pragma once

// Paths, ids and expected annotations of the synthetic fixture corpus in tests/data/fixture.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "meshprov.hpp"

#ifndef MESHPROV_FIXTURE_DIR
#error "MESHPROV_FIXTURE_DIR must be defined"
#endif

namespace fixture {

inline std::filesystem::path dir() { return MESHPROV_FIXTURE_DIR; }
inline std::filesystem::path overrides() { return dir() / "overrides.csv"; }

/// key -> synthetic id, from ids.csv written by make_fixture.py.
inline const std::map<std::string, std::string>& ids() {
  static const std::map<std::string, std::string> table = [] {
    std::map<std::string, std::string> out;
    auto rows = meshprov::csv::read_file(dir() / "ids.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) out[rows[i][0]] = rows[i][1];
    return out;
  }();
  return table;
}

inline const std::string& id(const std::string& key) { return ids().at(key); }

inline meshprov::RunConfig config(const std::filesystem::path& out, bool with_overrides = false, unsigned jobs = 2) {
  meshprov::RunConfig cfg;
  cfg.data_dir = dir();
  cfg.window = {2015, 2020, 2020};
  cfg.output_dir = out;
  cfg.jobs = jobs;
  if (with_overrides) cfg.overrides_path = overrides();
  return cfg;
}

inline meshprov::VersionPtr load(int year) {
  return meshprov::load_version(year, dir() / ("desc" + std::to_string(year) + ".xml"),
                                dir() / ("supp" + std::to_string(year) + ".xml"))
      .version;
}

struct Expected {
  std::string key;
  int year;
  int category;
  std::set<std::string> codes;
  std::set<std::string> host_keys;
};

/// Expected annotations of every retained new descriptor, first pass (no overrides).
inline std::vector<Expected> expected_first_pass() {
  return {
      {"zika", 2015, 3, {"3.2", "3.3"}, {"arbo", "flavi"}},
      {"ltae", 2015, 4, {"4.0"}, {}},
      {"prunus_africana", 2016, 1, {"1.1"}, {"pygeum"}},
      {"returning", 2016, 4, {"4.0"}, {}},
      {"crystal", 2017, 3, {"3.4"}, {"chondro", "gout"}},
      {"rec_scav", 2018, 2, {"2.2"}, {"rec_immuno"}},
      {"sra", 2018, 2, {"2.3"}, {"rec_immuno"}},
      {"srb", 2018, 4, {"4.0"}, {}},
      {"tauopathies", 2018, 3, {"3.5"}, {"tau"}},
      {"adeno_lung", 2019, 2, {"2.2"}, {"adeno", "lung_neo"}},
      {"rct", 2019, 3, {"3.5"}, {"shoulder_joint"}},
      {"undiagnosed", 2020, 3, {"3.5"}, {"rare"}},
      {"rcd", 2020, 3, {"3.2"}, {"cell_death"}},
      {"ferroptosis", 2020, 3, {"3.3"}, {"cell_death"}},
      {"necroptosis", 2020, 3, {"3.5"}, {"necrosis"}},
      {"shoulder_dystocia", 2020, 3, {"3.2", "3.5"}, {"dystocia", "shoulder"}},
  };
}

/// Second pass with overrides.csv: the two reviewed records change.
inline std::vector<Expected> expected_second_pass() {
  auto out = expected_first_pass();
  for (auto& e : out) {
    if (e.key == "srb") e = {"srb", 2018, 2, {"2.3"}, {"rec_immuno"}};
    if (e.key == "rct") e = {"rct", 2019, 3, {"3.2", "3.5"}, {"sis", "shoulder_joint"}};
  }
  return out;
}

/// Compares annotation CSVs of `out` with `expected`; returns one message per mismatch.
inline std::vector<std::string> compare_annotations(const std::filesystem::path& out,
                                                    const std::vector<Expected>& expected) {
  std::vector<std::string> problems;
  std::map<std::string, meshprov::NewDescriptorRecord> got;
  for (int y = 2015; y <= 2020; ++y) {
    auto path = out / "annotations" / (std::to_string(y) + ".csv");
    if (!std::filesystem::exists(path)) {
      problems.push_back("missing " + path.string());
      continue;
    }
    for (auto& r : meshprov::read_year_csv(path)) got[r.descriptor_id] = r;
  }
  std::set<std::string> expected_ids;
  for (const auto& e : expected) {
    const std::string& did = id(e.key);
    expected_ids.insert(did);
    auto it = got.find(did);
    if (it == got.end()) {
      problems.push_back(e.key + ": not annotated");
      continue;
    }
    const auto& r = it->second;
    std::set<std::string> codes, hosts, want_hosts;
    for (const auto& c : r.codes) codes.insert(c.str());
    for (const auto& h : r.hosts) hosts.insert(h.descriptor_id);
    for (const auto& k : e.host_keys) want_hosts.insert(id(k));
    auto join = [](const std::set<std::string>& s) { return meshprov::text::join(std::vector<std::string>(s.begin(), s.end()), ";"); };
    if (r.intro_year != e.year) problems.push_back(e.key + ": intro_year " + std::to_string(r.intro_year));
    if (meshprov::digit(r.category) != e.category)
      problems.push_back(e.key + ": category " + std::to_string(meshprov::digit(r.category)));
    if (codes != e.codes) problems.push_back(e.key + ": codes " + join(codes) + " expected " + join(e.codes));
    if (hosts != want_hosts) problems.push_back(e.key + ": hosts " + join(hosts) + " expected " + join(want_hosts));
  }
  for (const auto& [did, r] : got)
    if (!expected_ids.count(did)) problems.push_back("unexpected record " + did + " (" + r.name + ")");
  return problems;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Relative path -> content of every regular file under `root`.
inline std::map<std::string, std::string> tree_contents(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).generic_string()] = slurp(e.path());
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("meshprov-test-" + std::to_string(::getpid()) + "-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixture
