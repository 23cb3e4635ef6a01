#pragma once

// Domain model of one thesaurus release: descriptors, supplementary concept
// records, hierarchy positions, and the provenance vocabulary used to annotate
// newly introduced descriptors.

#include <algorithm>
#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "meshprov/error.hpp"
#include "meshprov/text.hpp"

namespace meshprov {

// ---------------------------------------------------------------------------
// TreeNumber
// ---------------------------------------------------------------------------

/// Dot-segmented position in a hierarchy tree, e.g. "C10.228.140.380".
/// The first segment is one uppercase letter followed by digits; the rest are digit strings.
class TreeNumber {
 public:
  static std::optional<TreeNumber> try_parse(std::string_view text) {
    auto parts = text::split(text::trim(text), '.');
    std::vector<std::string> segments;
    segments.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      std::string_view p = parts[i];
      if (p.empty()) return std::nullopt;
      std::string_view digits = p;
      if (i == 0) {
        if (p.size() < 2 || p[0] < 'A' || p[0] > 'Z') return std::nullopt;
        digits = p.substr(1);
      }
      if (!std::all_of(digits.begin(), digits.end(), text::is_digit)) return std::nullopt;
      segments.emplace_back(p);
    }
    return TreeNumber(std::move(segments));
  }

  static TreeNumber parse(std::string_view text) {
    auto t = try_parse(text);
    if (!t) throw PreconditionError("invalid tree number '" + std::string(text) + "'");
    return *std::move(t);
  }

  const std::vector<std::string>& segments() const { return segments_; }
  std::size_t depth() const { return segments_.size(); }
  char category_letter() const { return segments_.front().front(); }

  std::string str() const { return text::join(segments_, "."); }

  /// Tree number of the parent position; nullopt for a root.
  std::optional<TreeNumber> parent() const {
    if (segments_.size() < 2) return std::nullopt;
    return TreeNumber({segments_.begin(), segments_.end() - 1});
  }

  friend bool operator==(const TreeNumber&, const TreeNumber&) = default;
  friend auto operator<=>(const TreeNumber&, const TreeNumber&) = default;

 private:
  explicit TreeNumber(std::vector<std::string> segments) : segments_(std::move(segments)) {}

  std::vector<std::string> segments_;
};

/// True iff `shorter` is a proper prefix of `longer` at whole-segment granularity.
inline bool is_tree_prefix(const TreeNumber& shorter, const TreeNumber& longer) {
  const auto& a = shorter.segments();
  const auto& b = longer.segments();
  if (a.size() >= b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

// ---------------------------------------------------------------------------
// Concepts, descriptors, SCRs
// ---------------------------------------------------------------------------

struct Term {
  std::string text;
  bool is_preferred = false;

  friend bool operator==(const Term&, const Term&) = default;
};

enum class ConceptRelation { preferred, narrower, broader, related };

inline std::string_view to_string(ConceptRelation r) {
  switch (r) {
    case ConceptRelation::preferred: return "preferred";
    case ConceptRelation::narrower: return "narrower";
    case ConceptRelation::broader: return "broader";
    case ConceptRelation::related: return "related";
  }
  return "related";
}

struct Concept {
  std::string concept_id;
  std::vector<Term> terms;
  ConceptRelation relation_to_preferred = ConceptRelation::preferred;

  const Term* preferred_term() const {
    for (const auto& t : terms)
      if (t.is_preferred) return &t;
    return nullptr;
  }

  friend bool operator==(const Concept&, const Concept&) = default;
};

struct Descriptor {
  std::string descriptor_id;
  std::string name;
  Concept preferred_concept;
  std::vector<Concept> subordinate_concepts;
  std::vector<TreeNumber> tree_numbers;
  std::optional<std::string> pmn_text;
  std::vector<std::string> pi_notes;

  /// Preferred concept first, then subordinates in record order.
  template <typename Fn>
  void for_each_concept(Fn&& fn) const {
    fn(preferred_concept);
    for (const auto& c : subordinate_concepts) fn(c);
  }

  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

struct ScrRecord {
  std::string scr_id;
  Concept preferred_concept;
  std::vector<Concept> subordinate_concepts;
  std::vector<std::string> mapped_descriptor_ids;

  std::string name() const {
    const Term* t = preferred_concept.preferred_term();
    return t ? t->text : scr_id;
  }

  template <typename Fn>
  void for_each_concept(Fn&& fn) const {
    fn(preferred_concept);
    for (const auto& c : subordinate_concepts) fn(c);
  }

  friend bool operator==(const ScrRecord&, const ScrRecord&) = default;
};

/// Leading letters of the descriptor's tree numbers.
inline std::set<char> mesh_category_letters(const Descriptor& d) {
  std::set<char> letters;
  for (const auto& t : d.tree_numbers) letters.insert(t.category_letter());
  return letters;
}

/// Checks the structural rules of a descriptor: exactly one preferred term per
/// concept, a preferred concept marked as such, distinct concept ids.
inline void validate_descriptor(const Descriptor& d) {
  auto fail = [&](const std::string& why) {
    throw IntegrityError("descriptor " + d.descriptor_id + ": " + why);
  };
  if (d.descriptor_id.empty()) fail("empty descriptor id");
  if (d.preferred_concept.relation_to_preferred != ConceptRelation::preferred)
    fail("preferred concept is not marked preferred");
  std::set<std::string_view> ids;
  d.for_each_concept([&](const Concept& c) {
    auto preferred = std::count_if(c.terms.begin(), c.terms.end(), [](const Term& t) { return t.is_preferred; });
    if (preferred != 1) fail("concept " + c.concept_id + " must have exactly one preferred term");
    if (!ids.insert(c.concept_id).second) fail("duplicate concept id " + c.concept_id);
  });
  for (const auto& c : d.subordinate_concepts)
    if (c.relation_to_preferred == ConceptRelation::preferred)
      fail("subordinate concept " + c.concept_id + " is marked preferred");
}

// ---------------------------------------------------------------------------
// MeshVersion
// ---------------------------------------------------------------------------

/// Immutable snapshot of one annual release with lookup indexes.
/// Build with MeshVersion::build; safe to share between threads afterwards.
class MeshVersion {
 public:
  using IdSet = std::vector<std::string>;  // sorted, unique

  static std::shared_ptr<const MeshVersion> build(int year, std::vector<Descriptor> descriptors,
                                                  std::vector<ScrRecord> scrs) {
    auto v = std::shared_ptr<MeshVersion>(new MeshVersion());
    v->year_ = year;
    for (auto& d : descriptors) {
      validate_descriptor(d);
      std::string id = d.descriptor_id;
      if (!v->descriptors_.emplace(id, std::move(d)).second)
        throw IntegrityError("duplicate descriptor id " + id + " in version " + std::to_string(year));
    }
    for (auto& s : scrs) {
      if (s.mapped_descriptor_ids.empty())
        throw IntegrityError("SCR " + s.scr_id + " is not mapped to any descriptor");
      std::string id = s.scr_id;
      if (!v->scrs_.emplace(id, std::move(s)).second)
        throw IntegrityError("duplicate SCR id " + id + " in version " + std::to_string(year));
    }
    for (const auto& [id, d] : v->descriptors_) {
      d.for_each_concept([&](const Concept& c) {
        auto [it, inserted] = v->concept_to_descriptor_.emplace(c.concept_id, id);
        if (!inserted && it->second != id)
          throw IntegrityError("concept " + c.concept_id + " belongs to both descriptor " + it->second +
                               " and descriptor " + id + " in version " + std::to_string(year));
        for (const auto& t : c.terms) v->name_to_descriptor_[text::normalize_term(t.text)].push_back(id);
      });
    }
    for (const auto& [id, s] : v->scrs_) {
      s.for_each_concept([&](const Concept& c) {
        v->concept_to_scr_.emplace(c.concept_id, id);
        for (const auto& t : c.terms) v->name_to_scr_[text::normalize_term(t.text)].push_back(id);
      });
    }
    for (auto* index : {&v->name_to_descriptor_, &v->name_to_scr_}) {
      for (auto& [key, ids] : *index) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      }
    }
    return v;
  }

  int year() const { return year_; }
  const std::map<std::string, Descriptor>& descriptors() const { return descriptors_; }
  const std::map<std::string, ScrRecord>& scrs() const { return scrs_; }

  const Descriptor* find_descriptor(std::string_view id) const {
    auto it = descriptors_.find(std::string(id));
    return it == descriptors_.end() ? nullptr : &it->second;
  }
  const ScrRecord* find_scr(std::string_view id) const {
    auto it = scrs_.find(std::string(id));
    return it == scrs_.end() ? nullptr : &it->second;
  }
  bool has_descriptor(std::string_view id) const { return find_descriptor(id) != nullptr; }

  /// Descriptor holding the concept (as preferred or subordinate), if any.
  const Descriptor* descriptor_for_concept(std::string_view concept_id) const {
    auto it = concept_to_descriptor_.find(std::string(concept_id));
    return it == concept_to_descriptor_.end() ? nullptr : find_descriptor(it->second);
  }
  const ScrRecord* scr_for_concept(std::string_view concept_id) const {
    auto it = concept_to_scr_.find(std::string(concept_id));
    return it == concept_to_scr_.end() ? nullptr : find_scr(it->second);
  }

  /// Descriptor ids having a term whose normalized form equals normalize_term(name).
  const IdSet& descriptors_named(std::string_view name) const {
    return lookup(name_to_descriptor_, text::normalize_term(name));
  }
  const IdSet& scrs_named(std::string_view name) const { return lookup(name_to_scr_, text::normalize_term(name)); }

  const std::unordered_map<std::string, std::string>& index_concept_to_descriptor() const {
    return concept_to_descriptor_;
  }
  const std::unordered_map<std::string, std::string>& index_concept_to_scr() const { return concept_to_scr_; }
  const std::unordered_map<std::string, IdSet>& index_name_to_descriptor() const { return name_to_descriptor_; }
  const std::unordered_map<std::string, IdSet>& index_name_to_scr() const { return name_to_scr_; }

 private:
  MeshVersion() = default;

  static const IdSet& lookup(const std::unordered_map<std::string, IdSet>& index, const std::string& key) {
    static const IdSet empty;
    auto it = index.find(key);
    return it == index.end() ? empty : it->second;
  }

  int year_ = 0;
  std::map<std::string, Descriptor> descriptors_;
  std::map<std::string, ScrRecord> scrs_;
  std::unordered_map<std::string, std::string> concept_to_descriptor_;
  std::unordered_map<std::string, std::string> concept_to_scr_;
  std::unordered_map<std::string, IdSet> name_to_descriptor_;
  std::unordered_map<std::string, IdSet> name_to_scr_;
};

using VersionPtr = std::shared_ptr<const MeshVersion>;

// ---------------------------------------------------------------------------
// Provenance vocabulary
// ---------------------------------------------------------------------------

enum class RelationType { ancestor, descendant, unrelated, undefined };

inline std::string_view to_string(RelationType r) {
  switch (r) {
    case RelationType::ancestor: return "ancestor";
    case RelationType::descendant: return "descendant";
    case RelationType::unrelated: return "unrelated";
    case RelationType::undefined: return "undefined";
  }
  return "undefined";
}

/// Number of intermediate descriptors on a shortest hierarchy path; may be
/// infinite (no path) or undefined (counterpart absent from the reference version).
class Distance {
 public:
  struct Infinite {
    friend bool operator==(Infinite, Infinite) { return true; }
  };
  struct Undefined {
    friend bool operator==(Undefined, Undefined) { return true; }
  };

  static Distance finite(int n) {
    if (n < 0) throw PreconditionError("distance must be non-negative");
    return Distance(n);
  }
  static Distance infinite() { return Distance(Infinite{}); }
  static Distance undefined() { return Distance(Undefined{}); }

  bool is_finite() const { return std::holds_alternative<int>(value_); }
  bool is_infinite() const { return std::holds_alternative<Infinite>(value_); }
  bool is_undefined() const { return std::holds_alternative<Undefined>(value_); }
  int value() const { return std::get<int>(value_); }

  std::string str() const {
    if (is_finite()) return std::to_string(value());
    return is_infinite() ? "inf" : "undefined";
  }

  friend bool operator==(const Distance&, const Distance&) = default;

 private:
  template <typename T>
  explicit Distance(T v) : value_(v) {}

  std::variant<int, Infinite, Undefined> value_;
};

enum class ProvenanceCategory { cat1_old_concept = 1, cat2_old_scr = 2, cat3_new_pi_concept = 3, cat4_emerging = 4 };

enum class ProvenanceType {
  t0_emersion = 0,
  t1_succession = 1,
  t2_subdivision = 2,
  t3_submersion = 3,
  t4_overtopping = 4,
  t5_detachment = 5
};

inline int digit(ProvenanceCategory c) { return static_cast<int>(c); }
inline int digit(ProvenanceType t) { return static_cast<int>(t); }

inline std::optional<ProvenanceCategory> category_from_digit(int d) {
  if (d < 1 || d > 4) return std::nullopt;
  return static_cast<ProvenanceCategory>(d);
}
inline std::optional<ProvenanceType> type_from_digit(int d) {
  if (d < 0 || d > 5) return std::nullopt;
  return static_cast<ProvenanceType>(d);
}

inline constexpr ProvenanceCategory kAllCategories[] = {
    ProvenanceCategory::cat1_old_concept, ProvenanceCategory::cat2_old_scr,
    ProvenanceCategory::cat3_new_pi_concept, ProvenanceCategory::cat4_emerging};
inline constexpr ProvenanceType kAllTypes[] = {ProvenanceType::t0_emersion,    ProvenanceType::t1_succession,
                                               ProvenanceType::t2_subdivision, ProvenanceType::t3_submersion,
                                               ProvenanceType::t4_overtopping, ProvenanceType::t5_detachment};

inline std::string_view type_name(ProvenanceType t) {
  switch (t) {
    case ProvenanceType::t0_emersion: return "emersion";
    case ProvenanceType::t1_succession: return "succession";
    case ProvenanceType::t2_subdivision: return "subdivision";
    case ProvenanceType::t3_submersion: return "submersion";
    case ProvenanceType::t4_overtopping: return "overtopping";
    case ProvenanceType::t5_detachment: return "detachment";
  }
  return "emersion";
}

/// "<category>.<type>" pair. Emersion (type 0) pairs only with category 4, and category 4 only with emersion.
class ProvenanceCode {
 public:
  ProvenanceCode(ProvenanceCategory category, ProvenanceType type) : category_(category), type_(type) {
    bool emerging = category == ProvenanceCategory::cat4_emerging;
    bool emersion = type == ProvenanceType::t0_emersion;
    if (emerging != emersion)
      throw PreconditionError("invalid provenance code " + std::to_string(digit(category)) + "." +
                              std::to_string(digit(type)));
  }

  static ProvenanceCode emersion() { return {ProvenanceCategory::cat4_emerging, ProvenanceType::t0_emersion}; }

  static std::optional<ProvenanceCode> try_parse(std::string_view s) {
    s = text::trim(s);
    if (s.size() != 3 || s[1] != '.' || !text::is_digit(s[0]) || !text::is_digit(s[2])) return std::nullopt;
    auto c = category_from_digit(s[0] - '0');
    auto t = type_from_digit(s[2] - '0');
    if (!c || !t) return std::nullopt;
    if ((*c == ProvenanceCategory::cat4_emerging) != (*t == ProvenanceType::t0_emersion)) return std::nullopt;
    return ProvenanceCode(*c, *t);
  }

  ProvenanceCategory category() const { return category_; }
  ProvenanceType type() const { return type_; }
  std::string str() const { return std::to_string(digit(category_)) + "." + std::to_string(digit(type_)); }

  friend bool operator==(const ProvenanceCode&, const ProvenanceCode&) = default;
  friend auto operator<=>(const ProvenanceCode&, const ProvenanceCode&) = default;

 private:
  ProvenanceCategory category_;
  ProvenanceType type_;
};

enum class HostCoverage { explicit_concept, explicit_scr, implicit_pi };

inline std::string_view to_string(HostCoverage c) {
  switch (c) {
    case HostCoverage::explicit_concept: return "explicit_concept";
    case HostCoverage::explicit_scr: return "explicit_scr";
    case HostCoverage::implicit_pi: return "implicit_pi";
  }
  return "implicit_pi";
}

inline std::optional<HostCoverage> parse_coverage(std::string_view s) {
  if (s == "explicit_concept") return HostCoverage::explicit_concept;
  if (s == "explicit_scr") return HostCoverage::explicit_scr;
  if (s == "implicit_pi") return HostCoverage::implicit_pi;
  return std::nullopt;
}

struct PreviousHost {
  std::string descriptor_id;
  std::string name;
  HostCoverage coverage = HostCoverage::implicit_pi;

  friend bool operator==(const PreviousHost&, const PreviousHost&) = default;
};

/// A newly introduced descriptor annotated with its provenance.
struct NewDescriptorRecord {
  std::string descriptor_id;
  std::string name;
  int intro_year = 0;
  ProvenanceCategory category = ProvenanceCategory::cat4_emerging;
  std::vector<PreviousHost> hosts;
  std::set<ProvenanceCode> codes;
  std::vector<TreeNumber> tree_numbers;
  std::set<char> mesh_category_letters;

  /// Category 3 whose implicit hosts could not be resolved to any descriptor.
  bool unresolved_hosts() const {
    return category == ProvenanceCategory::cat3_new_pi_concept && hosts.empty();
  }

  std::set<ProvenanceType> types() const {
    std::set<ProvenanceType> out;
    for (const auto& c : codes) out.insert(c.type());
    return out;
  }

  friend bool operator==(const NewDescriptorRecord&, const NewDescriptorRecord&) = default;
};

enum class OverrideField { pmn_scr_resolution, pi_host_resolution };

inline std::string_view to_string(OverrideField f) {
  return f == OverrideField::pmn_scr_resolution ? "pmn_scr" : "pi_host";
}

inline std::optional<OverrideField> parse_override_field(std::string_view s) {
  if (s == "pmn_scr") return OverrideField::pmn_scr_resolution;
  if (s == "pi_host") return OverrideField::pi_host_resolution;
  return std::nullopt;
}

/// One manual confirmation. `source_row` is the 1-based line in the overrides file (0 when built in code).
struct OverrideEntry {
  std::string descriptor_id;
  OverrideField field = OverrideField::pmn_scr_resolution;
  std::vector<std::string> resolved_ids;
  int source_row = 0;

  friend bool operator==(const OverrideEntry&, const OverrideEntry&) = default;
};

}  // namespace meshprov
