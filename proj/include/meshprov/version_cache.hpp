#pragma once

// Compact JSON snapshot of one parsed release, keyed on the source files'
// path, size and modification time so stale snapshots are ignored.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "meshprov/error.hpp"
#include "meshprov/mesh_xml.hpp"
#include "meshprov/model.hpp"

namespace meshprov {

namespace cache_json {

using nlohmann::json;

inline constexpr int kFormat = 1;

inline json concept_to_json(const Concept& c) {
  json terms = json::array();
  for (const auto& t : c.terms) terms.push_back(json::array({t.text, t.is_preferred}));
  return {{"id", c.concept_id}, {"rel", std::string(to_string(c.relation_to_preferred))}, {"terms", terms}};
}

inline ConceptRelation parse_relation(const std::string& s) {
  if (s == "preferred") return ConceptRelation::preferred;
  if (s == "narrower") return ConceptRelation::narrower;
  if (s == "broader") return ConceptRelation::broader;
  if (s == "related") return ConceptRelation::related;
  throw Error("cache: unknown concept relation '" + s + "'");
}

inline Concept concept_from_json(const json& j) {
  Concept c;
  c.concept_id = j.at("id").get<std::string>();
  c.relation_to_preferred = parse_relation(j.at("rel").get<std::string>());
  for (const auto& t : j.at("terms")) c.terms.push_back({t.at(0).get<std::string>(), t.at(1).get<bool>()});
  return c;
}

inline json concepts_to_json(const std::vector<Concept>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back(concept_to_json(c));
  return a;
}

inline std::vector<Concept> concepts_from_json(const json& j) {
  std::vector<Concept> out;
  for (const auto& c : j) out.push_back(concept_from_json(c));
  return out;
}

inline json descriptor_to_json(const Descriptor& d) {
  json trees = json::array();
  for (const auto& t : d.tree_numbers) trees.push_back(t.str());
  json j{{"id", d.descriptor_id},
         {"name", d.name},
         {"pref", concept_to_json(d.preferred_concept)},
         {"sub", concepts_to_json(d.subordinate_concepts)},
         {"trees", trees},
         {"pi", d.pi_notes}};
  if (d.pmn_text) j["pmn"] = *d.pmn_text;
  return j;
}

inline Descriptor descriptor_from_json(const json& j) {
  Descriptor d;
  d.descriptor_id = j.at("id").get<std::string>();
  d.name = j.at("name").get<std::string>();
  d.preferred_concept = concept_from_json(j.at("pref"));
  d.subordinate_concepts = concepts_from_json(j.at("sub"));
  for (const auto& t : j.at("trees")) d.tree_numbers.push_back(TreeNumber::parse(t.get<std::string>()));
  d.pi_notes = j.at("pi").get<std::vector<std::string>>();
  if (auto it = j.find("pmn"); it != j.end()) d.pmn_text = it->get<std::string>();
  return d;
}

inline json scr_to_json(const ScrRecord& s) {
  return {{"id", s.scr_id},
          {"pref", concept_to_json(s.preferred_concept)},
          {"sub", concepts_to_json(s.subordinate_concepts)},
          {"mapped", s.mapped_descriptor_ids}};
}

inline ScrRecord scr_from_json(const json& j) {
  ScrRecord s;
  s.scr_id = j.at("id").get<std::string>();
  s.preferred_concept = concept_from_json(j.at("pref"));
  s.subordinate_concepts = concepts_from_json(j.at("sub"));
  s.mapped_descriptor_ids = j.at("mapped").get<std::vector<std::string>>();
  return s;
}

}  // namespace cache_json

/// Identity of one source file as seen by the cache.
struct SourceStamp {
  std::string path;
  std::uintmax_t size = 0;
  std::int64_t mtime = 0;

  friend bool operator==(const SourceStamp&, const SourceStamp&) = default;
};

inline SourceStamp stamp_of(const std::filesystem::path& p) {
  std::error_code ec;
  SourceStamp s;
  s.path = std::filesystem::absolute(p, ec).lexically_normal().string();
  s.size = std::filesystem::file_size(p, ec);
  if (ec) throw IoError("cannot stat " + p.string() + ": " + ec.message());
  auto t = std::filesystem::last_write_time(p, ec);
  if (ec) throw IoError("cannot stat " + p.string() + ": " + ec.message());
  s.mtime = static_cast<std::int64_t>(t.time_since_epoch().count());
  return s;
}

class VersionCache {
 public:
  explicit VersionCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path file_for(int year) const { return dir_ / ("version_" + std::to_string(year) + ".json"); }

  /// The cached version when its stamps match the given sources; nullopt otherwise
  /// (missing, stale or unreadable snapshots are treated as misses).
  std::optional<LoadedVersion> load(int year, const SourceStamp& desc, const SourceStamp& scr) const {
    using nlohmann::json;
    std::ifstream in(file_for(year), std::ios::binary);
    if (!in) return std::nullopt;
    try {
      json j = json::parse(in);
      if (j.at("format").get<int>() != cache_json::kFormat || j.at("year").get<int>() != year) return std::nullopt;
      if (!(stamp_from(j.at("descriptor_source")) == desc) || !(stamp_from(j.at("scr_source")) == scr))
        return std::nullopt;
      std::vector<Descriptor> descriptors;
      for (const auto& d : j.at("descriptors")) descriptors.push_back(cache_json::descriptor_from_json(d));
      std::vector<ScrRecord> scrs;
      for (const auto& s : j.at("scrs")) scrs.push_back(cache_json::scr_from_json(s));
      LoadedVersion out;
      const json& rep = j.at("report");
      out.report.year = year;
      for (const auto& s : rep.at("skipped"))
        out.report.skipped_records.push_back({s.at(0).get<std::string>(), s.at(1).get<std::string>()});
      out.report.warnings = rep.at("warnings").get<std::vector<std::string>>();
      out.version = MeshVersion::build(year, std::move(descriptors), std::move(scrs));
      out.report.descriptor_count = out.version->descriptors().size();
      out.report.scr_count = out.version->scrs().size();
      return out;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
  }

  void store(const LoadedVersion& v, const SourceStamp& desc, const SourceStamp& scr) const {
    using nlohmann::json;
    json descriptors = json::array();
    for (const auto& [id, d] : v.version->descriptors()) descriptors.push_back(cache_json::descriptor_to_json(d));
    json scrs = json::array();
    for (const auto& [id, s] : v.version->scrs()) scrs.push_back(cache_json::scr_to_json(s));
    json skipped = json::array();
    for (const auto& s : v.report.skipped_records) skipped.push_back(json::array({s.record_id, s.reason}));
    json j{{"format", cache_json::kFormat},
           {"year", v.version->year()},
           {"descriptor_source", stamp_to(desc)},
           {"scr_source", stamp_to(scr)},
           {"report", {{"skipped", skipped}, {"warnings", v.report.warnings}}},
           {"descriptors", std::move(descriptors)},
           {"scrs", std::move(scrs)}};

    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    auto path = file_for(v.version->year());
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + tmp.string());
      out << j.dump() << '\n';
      if (!out) throw IoError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }

 private:
  static nlohmann::json stamp_to(const SourceStamp& s) {
    return {{"path", s.path}, {"size", s.size}, {"mtime", s.mtime}};
  }
  static SourceStamp stamp_from(const nlohmann::json& j) {
    return {j.at("path").get<std::string>(), j.at("size").get<std::uintmax_t>(), j.at("mtime").get<std::int64_t>()};
  }

  std::filesystem::path dir_;
};

}  // namespace meshprov
