#pragma once

// Streaming reader for the descriptor and supplementary-record XML releases.
//
// Records are assembled one at a time from SAX events and handed to a callback,
// so memory stays proportional to a single record. Only the element subset the
// provenance analysis needs is captured; everything else is skipped without
// buffering. Elements are matched by their path below the record element, never
// by position, so element reordering between yearly DTDs is harmless.

#include <expat.h>

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "meshprov/error.hpp"
#include "meshprov/model.hpp"
#include "meshprov/text.hpp"

namespace meshprov {

struct SkippedRecord {
  std::string record_id;  // empty when the record had no identifier
  std::string reason;

  friend bool operator==(const SkippedRecord&, const SkippedRecord&) = default;
};

struct ParseDiagnostics {
  std::vector<SkippedRecord> skipped;
  std::vector<std::string> warnings;
};

template <typename Record>
struct ParsedRecords {
  std::vector<Record> records;
  std::vector<SkippedRecord> skipped;
  std::vector<std::string> warnings;
};

namespace detail {

/// Owns an expat parser and forwards events to a handler with on_start/on_end/on_text.
/// Exceptions raised by the handler stop the parse and are rethrown after expat returns.
template <typename Handler>
class ExpatDriver {
 public:
  explicit ExpatDriver(Handler& handler) : handler_(handler), parser_(XML_ParserCreate("UTF-8")) {
    if (!parser_) throw std::bad_alloc();
    XML_SetUserData(parser_, this);
    XML_SetElementHandler(parser_, &ExpatDriver::start_cb, &ExpatDriver::end_cb);
    XML_SetCharacterDataHandler(parser_, &ExpatDriver::text_cb);
  }
  ~ExpatDriver() { XML_ParserFree(parser_); }
  ExpatDriver(const ExpatDriver&) = delete;
  ExpatDriver& operator=(const ExpatDriver&) = delete;

  void run(std::istream& in, std::string_view source) {
    constexpr int kChunk = 1 << 16;
    bool done = false;
    while (!done) {
      void* buf = XML_GetBuffer(parser_, kChunk);
      if (!buf) throw std::bad_alloc();
      in.read(static_cast<char*>(buf), kChunk);
      auto got = static_cast<int>(in.gcount());
      if (in.bad()) throw IoError("read error in " + std::string(source));
      done = got < kChunk;
      if (XML_ParseBuffer(parser_, got, done) == XML_STATUS_ERROR) {
        if (pending_) std::rethrow_exception(pending_);
        auto offset = static_cast<std::int64_t>(XML_GetCurrentByteIndex(parser_));
        throw ParseError(std::string(source) + ": malformed XML at byte offset " + std::to_string(offset) +
                             " (line " + std::to_string(XML_GetCurrentLineNumber(parser_)) +
                             "): " + XML_ErrorString(XML_GetErrorCode(parser_)),
                         offset);
      }
    }
    if (pending_) std::rethrow_exception(pending_);
  }

 private:
  template <typename Fn>
  void guarded(Fn&& fn) {
    if (pending_) return;
    try {
      fn();
    } catch (...) {
      pending_ = std::current_exception();
      XML_StopParser(parser_, XML_FALSE);
    }
  }

  static void start_cb(void* self, const XML_Char* name, const XML_Char** atts) {
    auto* d = static_cast<ExpatDriver*>(self);
    d->guarded([&] { d->handler_.on_start(name, atts); });
  }
  static void end_cb(void* self, const XML_Char* name) {
    auto* d = static_cast<ExpatDriver*>(self);
    d->guarded([&] { d->handler_.on_end(name); });
  }
  static void text_cb(void* self, const XML_Char* s, int len) {
    auto* d = static_cast<ExpatDriver*>(self);
    d->guarded([&] { d->handler_.on_text(std::string_view(s, static_cast<std::size_t>(len))); });
  }

  Handler& handler_;
  XML_Parser parser_;
  std::exception_ptr pending_;
};

inline std::optional<std::string_view> attribute(const XML_Char** atts, std::string_view key) {
  for (int i = 0; atts && atts[i]; i += 2)
    if (key == atts[i]) return std::string_view(atts[i + 1]);
  return std::nullopt;
}

struct RawTerm {
  std::string text;
  bool preferred = false;
};

struct RawConcept {
  std::string ui;
  bool preferred = false;
  std::string name;
  std::vector<RawTerm> terms;
};

struct RawRelation {
  std::string name;
  std::string concept1;
  std::string concept2;
};

/// Concept-list handling shared by descriptor and SCR records. Paths are relative to the record element.
struct ConceptCollector {
  std::vector<RawConcept> concepts;
  std::vector<RawRelation> relations;

  void clear() {
    concepts.clear();
    relations.clear();
  }

  void start(std::string_view rel, const XML_Char** atts) {
    if (rel == "ConceptList/Concept") {
      RawConcept c;
      c.preferred = attribute(atts, "PreferredConceptYN").value_or("N") == "Y";
      concepts.push_back(std::move(c));
    } else if (rel == "ConceptList/Concept/TermList/Term" && !concepts.empty()) {
      RawTerm t;
      t.preferred = attribute(atts, "ConceptPreferredTermYN").value_or("N") == "Y";
      concepts.back().terms.push_back(std::move(t));
    } else if (rel == "ConceptList/Concept/ConceptRelationList/ConceptRelation") {
      RawRelation r;
      r.name = std::string(attribute(atts, "RelationName").value_or(""));
      relations.push_back(std::move(r));
    }
  }

  static bool captures(std::string_view rel) {
    return rel == "ConceptList/Concept/ConceptUI" || rel == "ConceptList/Concept/ConceptName/String" ||
           rel == "ConceptList/Concept/TermList/Term/String" ||
           rel == "ConceptList/Concept/ConceptRelationList/ConceptRelation/Concept1UI" ||
           rel == "ConceptList/Concept/ConceptRelationList/ConceptRelation/Concept2UI";
  }

  void end(std::string_view rel, std::string value) {
    if (concepts.empty()) return;
    RawConcept& c = concepts.back();
    if (rel == "ConceptList/Concept/ConceptUI") {
      c.ui = std::move(value);
    } else if (rel == "ConceptList/Concept/ConceptName/String") {
      c.name = std::move(value);
    } else if (rel == "ConceptList/Concept/TermList/Term/String" && !c.terms.empty()) {
      c.terms.back().text = std::move(value);
    } else if (rel.ends_with("/Concept1UI") && !relations.empty()) {
      relations.back().concept1 = std::move(value);
    } else if (rel.ends_with("/Concept2UI") && !relations.empty()) {
      relations.back().concept2 = std::move(value);
    }
  }

  /// Converts one raw concept, repairing term flags with warnings. Returns nullopt if unusable.
  static std::optional<Concept> build(const RawConcept& raw, const std::string& record_id,
                                      std::vector<std::string>& warnings) {
    if (raw.ui.empty()) {
      warnings.push_back(record_id + ": concept without ConceptUI ignored");
      return std::nullopt;
    }
    Concept c;
    c.concept_id = raw.ui;
    bool have_preferred = false;
    for (const auto& t : raw.terms) {
      if (t.text.empty()) continue;
      bool pref = t.preferred && !have_preferred;
      if (t.preferred && have_preferred)
        warnings.push_back(record_id + ": concept " + raw.ui + " has several preferred terms; keeping the first");
      have_preferred = have_preferred || pref;
      c.terms.push_back({t.text, pref});
    }
    if (c.terms.empty() && !raw.name.empty()) c.terms.push_back({raw.name, true});
    if (c.terms.empty()) {
      warnings.push_back(record_id + ": concept " + raw.ui + " has no terms; ignored");
      return std::nullopt;
    }
    if (!std::any_of(c.terms.begin(), c.terms.end(), [](const Term& t) { return t.is_preferred; })) {
      warnings.push_back(record_id + ": concept " + raw.ui + " has no preferred term; using the first");
      c.terms.front().is_preferred = true;
    }
    return c;
  }

  ConceptRelation relation_of(const std::string& concept_id) const {
    for (const auto& r : relations) {
      if (r.concept2 != concept_id) continue;
      if (r.name == "NRW") return ConceptRelation::narrower;
      if (r.name == "BRD") return ConceptRelation::broader;
      if (r.name == "REL") return ConceptRelation::related;
    }
    return ConceptRelation::related;
  }

  /// Splits collected concepts into preferred + subordinates. Returns false if there is no usable preferred concept.
  bool assemble(const std::string& record_id, Concept& preferred, std::vector<Concept>& subordinates,
                std::vector<std::string>& warnings, std::string& skip_reason) const {
    const RawConcept* pref_raw = nullptr;
    for (const auto& rc : concepts) {
      if (!rc.preferred) continue;
      if (pref_raw) {
        warnings.push_back(record_id + ": several concepts marked preferred; keeping the first");
        continue;
      }
      pref_raw = &rc;
    }
    if (!pref_raw) {
      skip_reason = "no concept with PreferredConceptYN=\"Y\"";
      return false;
    }
    auto pc = build(*pref_raw, record_id, warnings);
    if (!pc) {
      skip_reason = "preferred concept unusable";
      return false;
    }
    preferred = std::move(*pc);
    preferred.relation_to_preferred = ConceptRelation::preferred;
    std::set<std::string> seen{preferred.concept_id};
    for (const auto& rc : concepts) {
      if (&rc == pref_raw) continue;
      auto c = build(rc, record_id, warnings);
      if (!c) continue;
      if (!seen.insert(c->concept_id).second) {
        warnings.push_back(record_id + ": duplicate concept " + c->concept_id + " dropped");
        continue;
      }
      c->relation_to_preferred = relation_of(c->concept_id);
      subordinates.push_back(std::move(*c));
    }
    return true;
  }
};

/// Tracks the element path and the record boundary; subclasses see record-relative paths.
class RecordHandlerBase {
 public:
  explicit RecordHandlerBase(std::string record_element) : record_element_(std::move(record_element)) {}

  void on_text(std::string_view s) {
    if (capturing_) buffer_.append(s);
  }

 protected:
  /// Returns the path below the record element ("" for the record itself), or nullopt outside a record.
  std::optional<std::string_view> push(const XML_Char* name) {
    lengths_.push_back(path_.size());
    if (!path_.empty()) path_.push_back('/');
    path_.append(name);
    if (record_prefix_ == std::string::npos && record_element_ == name) {
      record_prefix_ = path_.size() + 1;
      return std::string_view();
    }
    return relative();
  }

  std::optional<std::string_view> current() const { return relative(); }

  /// Pops the current element; returns true when it closed the record.
  bool pop() {
    bool closes_record = record_prefix_ == path_.size() + 1;
    path_.resize(lengths_.back());
    lengths_.pop_back();
    if (closes_record) record_prefix_ = std::string::npos;
    return closes_record;
  }

  void begin_capture() {
    capturing_ = true;
    buffer_.clear();
  }
  std::string end_capture() {
    capturing_ = false;
    return text::collapse_whitespace(buffer_);
  }
  bool capturing() const { return capturing_; }

 private:
  std::optional<std::string_view> relative() const {
    if (record_prefix_ == std::string::npos) return std::nullopt;
    if (path_.size() < record_prefix_) return std::string_view();
    return std::string_view(path_).substr(record_prefix_);
  }

  std::string record_element_;
  std::string path_;
  std::vector<std::size_t> lengths_;
  std::size_t record_prefix_ = std::string::npos;
  bool capturing_ = false;
  std::string buffer_;
};

class DescriptorHandler : public RecordHandlerBase {
 public:
  using Sink = std::function<void(Descriptor&&)>;

  DescriptorHandler(Sink sink, ParseDiagnostics& diag)
      : RecordHandlerBase("DescriptorRecord"), sink_(std::move(sink)), diag_(diag) {}

  void on_start(const XML_Char* name, const XML_Char** atts) {
    auto rel = push(name);
    if (!rel) return;
    if (rel->empty()) {
      reset();
      return;
    }
    concepts_.start(*rel, atts);
    if (captures(*rel)) begin_capture();
  }

  void on_end(const XML_Char*) {
    auto rel = current();
    if (rel && !rel->empty() && capturing() && captures(*rel)) consume(std::string(*rel), end_capture());
    if (pop()) finish();
  }

 private:
  static bool captures(std::string_view rel) {
    return rel == "DescriptorUI" || rel == "DescriptorName/String" || rel == "TreeNumberList/TreeNumber" ||
           rel == "PublicMeSHNote" || rel == "PreviousIndexingList/PreviousIndexing" ||
           ConceptCollector::captures(rel);
  }

  void reset() {
    ui_.clear();
    name_.clear();
    trees_.clear();
    pmn_.clear();
    pi_.clear();
    concepts_.clear();
  }

  void consume(const std::string& rel, std::string value) {
    if (rel == "DescriptorUI") ui_ = std::move(value);
    else if (rel == "DescriptorName/String") name_ = std::move(value);
    else if (rel == "TreeNumberList/TreeNumber") trees_.push_back(std::move(value));
    else if (rel == "PublicMeSHNote") pmn_ = std::move(value);
    else if (rel == "PreviousIndexingList/PreviousIndexing") {
      if (!value.empty()) pi_.push_back(std::move(value));
    } else concepts_.end(rel, std::move(value));
  }

  void finish() {
    if (ui_.empty()) {
      diag_.skipped.push_back({"", "missing DescriptorUI"});
      diag_.warnings.push_back("descriptor record without DescriptorUI skipped");
      return;
    }
    Descriptor d;
    d.descriptor_id = ui_;
    std::string reason;
    if (!concepts_.assemble(ui_, d.preferred_concept, d.subordinate_concepts, diag_.warnings, reason)) {
      diag_.skipped.push_back({ui_, reason});
      diag_.warnings.push_back(ui_ + ": skipped, " + reason);
      return;
    }
    d.name = !name_.empty() ? name_ : d.preferred_concept.preferred_term()->text;
    for (const auto& t : trees_) {
      if (auto tn = TreeNumber::try_parse(t)) d.tree_numbers.push_back(*std::move(tn));
      else diag_.warnings.push_back(ui_ + ": invalid tree number '" + t + "' ignored");
    }
    if (!pmn_.empty()) d.pmn_text = pmn_;
    d.pi_notes = pi_;
    sink_(std::move(d));
  }

  Sink sink_;
  ParseDiagnostics& diag_;
  std::string ui_, name_, pmn_;
  std::vector<std::string> trees_, pi_;
  ConceptCollector concepts_;
};

class ScrHandler : public RecordHandlerBase {
 public:
  using Sink = std::function<void(ScrRecord&&)>;

  ScrHandler(Sink sink, ParseDiagnostics& diag)
      : RecordHandlerBase("SupplementalRecord"), sink_(std::move(sink)), diag_(diag) {}

  void on_start(const XML_Char* name, const XML_Char** atts) {
    auto rel = push(name);
    if (!rel) return;
    if (rel->empty()) {
      ui_.clear();
      mapped_.clear();
      concepts_.clear();
      return;
    }
    concepts_.start(*rel, atts);
    if (captures(*rel)) begin_capture();
  }

  void on_end(const XML_Char*) {
    auto rel = current();
    if (rel && !rel->empty() && capturing() && captures(*rel)) {
      std::string key(*rel);
      std::string value = end_capture();
      if (key == "SupplementalRecordUI") ui_ = std::move(value);
      else if (key == kMappedUi) {
        std::string_view id = value;
        while (!id.empty() && id.front() == '*') id.remove_prefix(1);
        if (!id.empty()) mapped_.emplace_back(id);
      } else concepts_.end(key, std::move(value));
    }
    if (pop()) finish();
  }

 private:
  static constexpr std::string_view kMappedUi = "HeadingMappedToList/HeadingMappedTo/DescriptorReferredTo/DescriptorUI";

  static bool captures(std::string_view rel) {
    return rel == "SupplementalRecordUI" || rel == kMappedUi || ConceptCollector::captures(rel);
  }

  void finish() {
    if (ui_.empty()) {
      diag_.skipped.push_back({"", "missing SupplementalRecordUI"});
      diag_.warnings.push_back("supplementary record without SupplementalRecordUI skipped");
      return;
    }
    if (mapped_.empty()) {
      diag_.skipped.push_back({ui_, "not mapped to any descriptor"});
      diag_.warnings.push_back(ui_ + ": skipped, no HeadingMappedTo descriptor");
      return;
    }
    ScrRecord s;
    s.scr_id = ui_;
    std::string reason;
    if (!concepts_.assemble(ui_, s.preferred_concept, s.subordinate_concepts, diag_.warnings, reason)) {
      diag_.skipped.push_back({ui_, reason});
      diag_.warnings.push_back(ui_ + ": skipped, " + reason);
      return;
    }
    for (auto& id : mapped_)
      if (std::find(s.mapped_descriptor_ids.begin(), s.mapped_descriptor_ids.end(), id) ==
          s.mapped_descriptor_ids.end())
        s.mapped_descriptor_ids.push_back(std::move(id));
    sink_(std::move(s));
  }

  Sink sink_;
  ParseDiagnostics& diag_;
  std::string ui_;
  std::vector<std::string> mapped_;
  ConceptCollector concepts_;
};

}  // namespace detail

/// Streams descriptor records to `sink`. Throws ParseError on malformed XML.
inline ParseDiagnostics stream_descriptor_file(std::istream& in, const std::function<void(Descriptor&&)>& sink,
                                               std::string_view source = "descriptor stream") {
  ParseDiagnostics diag;
  detail::DescriptorHandler handler(sink, diag);
  detail::ExpatDriver driver(handler);
  driver.run(in, source);
  return diag;
}

inline ParseDiagnostics stream_scr_file(std::istream& in, const std::function<void(ScrRecord&&)>& sink,
                                        std::string_view source = "supplementary stream") {
  ParseDiagnostics diag;
  detail::ScrHandler handler(sink, diag);
  detail::ExpatDriver driver(handler);
  driver.run(in, source);
  return diag;
}

inline ParsedRecords<Descriptor> parse_descriptor_file(std::istream& in,
                                                       std::string_view source = "descriptor stream") {
  ParsedRecords<Descriptor> out;
  auto diag = stream_descriptor_file(in, [&](Descriptor&& d) { out.records.push_back(std::move(d)); }, source);
  out.skipped = std::move(diag.skipped);
  out.warnings = std::move(diag.warnings);
  return out;
}

inline ParsedRecords<ScrRecord> parse_scr_file(std::istream& in, std::string_view source = "supplementary stream") {
  ParsedRecords<ScrRecord> out;
  auto diag = stream_scr_file(in, [&](ScrRecord&& s) { out.records.push_back(std::move(s)); }, source);
  out.skipped = std::move(diag.skipped);
  out.warnings = std::move(diag.warnings);
  return out;
}

struct ParseReport {
  int year = 0;
  std::size_t descriptor_count = 0;
  std::size_t scr_count = 0;
  std::vector<SkippedRecord> skipped_records;
  std::vector<std::string> warnings;

  friend bool operator==(const ParseReport&, const ParseReport&) = default;
};

/// Plain-text lines describing the report, one event per line.
inline std::vector<std::string> report_lines(const ParseReport& r) {
  std::vector<std::string> lines;
  lines.push_back("year " + std::to_string(r.year) + ": " + std::to_string(r.descriptor_count) + " descriptors, " +
                  std::to_string(r.scr_count) + " supplementary records, " +
                  std::to_string(r.skipped_records.size()) + " skipped, " + std::to_string(r.warnings.size()) +
                  " warnings");
  for (const auto& s : r.skipped_records)
    lines.push_back("year " + std::to_string(r.year) + ": skipped " + (s.record_id.empty() ? "<no id>" : s.record_id) +
                    ": " + s.reason);
  for (const auto& w : r.warnings) lines.push_back("year " + std::to_string(r.year) + ": warning: " + w);
  return lines;
}

struct LoadedVersion {
  VersionPtr version;
  ParseReport report;
};

/// Parses both release files of one year and builds the indexed version.
/// Throws IoError for unreadable files, ParseError for malformed XML and
/// IntegrityError when a concept belongs to two descriptors.
inline LoadedVersion load_version(int year, const std::filesystem::path& descriptor_path,
                                  const std::filesystem::path& scr_path) {
  auto open = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    return in;
  };
  LoadedVersion out;
  out.report.year = year;

  std::ifstream din = open(descriptor_path);
  auto desc = parse_descriptor_file(din, descriptor_path.string());
  std::ifstream sin = open(scr_path);
  auto scr = parse_scr_file(sin, scr_path.string());

  auto& rep = out.report;
  rep.skipped_records = desc.skipped;
  rep.skipped_records.insert(rep.skipped_records.end(), scr.skipped.begin(), scr.skipped.end());
  rep.warnings = desc.warnings;
  rep.warnings.insert(rep.warnings.end(), scr.warnings.begin(), scr.warnings.end());

  out.version = MeshVersion::build(year, std::move(desc.records), std::move(scr.records));
  rep.descriptor_count = out.version->descriptors().size();
  rep.scr_count = out.version->scrs().size();
  return out;
}

}  // namespace meshprov
