#pragma once

// Provenance of a new descriptor: its category, its previous hosts in the
// release just before its introduction (version 0), and one provenance code per
// host from the host's current position in the reference release.

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "meshprov/error.hpp"
#include "meshprov/hierarchy.hpp"
#include "meshprov/model.hpp"
#include "meshprov/notes.hpp"

namespace meshprov {

/// Provenance type from the relation to a host; `gap` is required for ancestors and ignored otherwise.
inline ProvenanceType classify_type(RelationType rel, std::optional<int> gap) {
  switch (rel) {
    case RelationType::undefined: return ProvenanceType::t1_succession;
    case RelationType::ancestor:
      if (!gap) throw PreconditionError("classify_type: ancestor relation needs an ancestor gap");
      return *gap == 0 ? ProvenanceType::t2_subdivision : ProvenanceType::t3_submersion;
    case RelationType::descendant: return ProvenanceType::t4_overtopping;
    case RelationType::unrelated: return ProvenanceType::t5_detachment;
  }
  return ProvenanceType::t5_detachment;
}

/// Version 0 plus the services host finding needs: lazily built similarity
/// matchers and the manual overrides. Safe to share between threads.
class ExtractionContext {
 public:
  ExtractionContext(const MeshVersion& version0, const std::vector<OverrideEntry>& overrides = {})
      : version0_(version0) {
    for (const auto& o : overrides) overrides_[o.descriptor_id].push_back(o);
  }
  ExtractionContext(const ExtractionContext&) = delete;
  ExtractionContext& operator=(const ExtractionContext&) = delete;

  const MeshVersion& version0() const { return version0_; }

  const TermMatcher& scr_matcher() const {
    std::call_once(scr_once_, [&] { scr_matcher_ = TermMatcher::for_scrs(version0_); });
    return scr_matcher_;
  }
  const TermMatcher& descriptor_matcher() const {
    std::call_once(desc_once_, [&] { desc_matcher_ = TermMatcher::for_descriptors(version0_); });
    return desc_matcher_;
  }

  const std::vector<OverrideEntry>& overrides_for(const std::string& descriptor_id) const {
    static const std::vector<OverrideEntry> none;
    auto it = overrides_.find(descriptor_id);
    return it == overrides_.end() ? none : it->second;
  }

 private:
  const MeshVersion& version0_;
  std::map<std::string, std::vector<OverrideEntry>> overrides_;
  mutable std::once_flag scr_once_, desc_once_;
  mutable TermMatcher scr_matcher_, desc_matcher_;
};

struct HostFinding {
  ProvenanceCategory category = ProvenanceCategory::cat4_emerging;
  std::vector<PreviousHost> hosts;  // unique, ascending id
  std::vector<ReviewItem> reviews;
  std::vector<std::string> warnings;
  /// The PMN matched "X was indexed under Y" after the concept search failed.
  bool pmn_pattern = false;
  /// ...and X resolved to an SCR without manual help.
  bool pmn_auto_resolved = false;
};

namespace detail {

inline void add_host(HostFinding& f, const MeshVersion& version0, const std::string& id, HostCoverage coverage) {
  for (const auto& h : f.hosts)
    if (h.descriptor_id == id) return;
  const Descriptor* d = version0.find_descriptor(id);
  f.hosts.push_back({id, d ? d->name : id, coverage});
}

inline void finish_hosts(HostFinding& f) {
  std::sort(f.hosts.begin(), f.hosts.end(),
            [](const PreviousHost& a, const PreviousHost& b) { return a.descriptor_id < b.descriptor_id; });
}

/// Undoes a conjunction split when the whole note term names exactly one version 0 descriptor
/// ("Head and Neck Neoplasms (1990-2010)").
inline std::vector<PiEntry> rejoin_split_terms(const std::vector<PiEntry>& entries, const MeshVersion& version0) {
  std::vector<PiEntry> out;
  std::set<std::string> rejoined;
  for (const auto& e : entries) {
    if (e.note_term == e.descriptor_term) {
      out.push_back(e);
      continue;
    }
    if (version0.descriptors_named(e.note_term).size() == 1) {
      if (rejoined.insert(e.raw).second) {
        PiEntry whole = e;
        whole.descriptor_term = e.note_term;
        out.push_back(std::move(whole));
      }
      continue;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace detail

/// Category and previous hosts of new descriptor `d1` (as recorded in its
/// introduction year), checked in order: preferred concept held by a version 0
/// descriptor; preferred concept held by a version 0 SCR; PMN subject resolving
/// to a version 0 SCR; previous indexing notes; otherwise emerging.
inline HostFinding find_previous_hosts(const Descriptor& d1, const ExtractionContext& ctx) {
  const MeshVersion& v0 = ctx.version0();
  const auto& overrides = ctx.overrides_for(d1.descriptor_id);
  for (const auto& o : overrides) validate_override(o, v0);

  HostFinding f;
  const std::string& concept_id = d1.preferred_concept.concept_id;

  if (const Descriptor* holder = v0.descriptor_for_concept(concept_id)) {
    f.category = ProvenanceCategory::cat1_old_concept;
    if (holder->preferred_concept.concept_id == concept_id)
      f.warnings.push_back(d1.descriptor_id + ": preferred concept " + concept_id + " was the preferred concept of " +
                           holder->descriptor_id + " in " + std::to_string(v0.year()) + "; treated as old concept");
    detail::add_host(f, v0, holder->descriptor_id, HostCoverage::explicit_concept);
    return f;
  }

  auto from_scr = [&](const ScrRecord& scr) {
    f.category = ProvenanceCategory::cat2_old_scr;
    for (const auto& id : scr.mapped_descriptor_ids) detail::add_host(f, v0, id, HostCoverage::explicit_scr);
    detail::finish_hosts(f);
  };

  if (const ScrRecord* scr = v0.scr_for_concept(concept_id)) {
    from_scr(*scr);
    return f;
  }

  if (d1.pmn_text) {
    if (auto pmn = parse_pmn(*d1.pmn_text)) {
      f.pmn_pattern = true;
      std::vector<PendingResolution> pending{
          {d1.descriptor_id, ReviewKind::pmn_scr, pmn->scr_term,
           resolve_term_to_scr(pmn->scr_term, v0, ctx.scr_matcher(), d1.name)}};
      pending = apply_overrides(std::move(pending), overrides, v0);
      const Resolution& r = pending.front().resolution;
      if (const auto* exact = std::get_if<ExactMatch>(&r)) {
        if (!exact->ids.empty()) {
          f.pmn_auto_resolved = !exact->from_override;
          f.category = ProvenanceCategory::cat2_old_scr;
          for (const auto& scr_id : exact->ids)
            for (const auto& id : v0.find_scr(scr_id)->mapped_descriptor_ids)
              detail::add_host(f, v0, id, HostCoverage::explicit_scr);
          detail::finish_hosts(f);
          return f;
        }
      } else if (const auto* s = std::get_if<Suggestions>(&r)) {
        ReviewItem item = s->item;
        item.descriptor_id = d1.descriptor_id;
        f.reviews.push_back(std::move(item));
        f.warnings.push_back(d1.descriptor_id + ": PMN subject '" + pmn->scr_term +
                             "' needs review; no SCR accepted");
      }
    }
  }

  if (!d1.pi_notes.empty()) {
    f.category = ProvenanceCategory::cat3_new_pi_concept;
    auto entries = detail::rejoin_split_terms(parse_pi(d1.pi_notes, &f.warnings), v0);
    std::vector<PendingResolution> pending;
    for (const auto& term : select_current_pi_hosts(entries, v0.year()))
      pending.push_back({d1.descriptor_id, ReviewKind::pi_host, term,
                         resolve_term_to_descriptor(term, v0, ctx.descriptor_matcher())});
    pending = apply_overrides(std::move(pending), overrides, v0);
    for (const auto& p : pending) {
      if (const auto* exact = std::get_if<ExactMatch>(&p.resolution)) {
        for (const auto& id : exact->ids) detail::add_host(f, v0, id, HostCoverage::implicit_pi);
        continue;
      }
      if (const auto* s = std::get_if<Suggestions>(&p.resolution)) {
        ReviewItem item = s->item;
        item.descriptor_id = d1.descriptor_id;
        f.reviews.push_back(std::move(item));
      }
      f.warnings.push_back(d1.descriptor_id + ": previous indexing term '" + p.query_term +
                           "' not resolved; dropped from hosts");
    }
    if (f.hosts.empty())
      f.warnings.push_back(d1.descriptor_id + ": previous indexing present but no host resolved; flagged");
    detail::finish_hosts(f);
    return f;
  }

  f.category = ProvenanceCategory::cat4_emerging;
  return f;
}

/// Relation of one new descriptor to one of its hosts, kept for reporting.
struct HostRelation {
  std::string host_id;
  RelationType relation = RelationType::undefined;
  std::optional<int> ancestor_gap;
  Distance distance = Distance::undefined();
  ProvenanceCode code = ProvenanceCode::emersion();
  bool anomaly = false;

  friend bool operator==(const HostRelation&, const HostRelation&) = default;
};

struct Annotation {
  NewDescriptorRecord record;
  std::vector<HostRelation> relations;
  std::vector<ReviewItem> reviews;
  std::vector<std::string> warnings;
  bool pmn_pattern = false;
  bool pmn_auto_resolved = false;
};

/// Full annotation of new descriptor `d1` introduced in `intro_year`. Relations
/// and tree positions come from `reference`; distances are filled in when a
/// graph over the reference version is supplied.
inline Annotation annotate(const Descriptor& d1, int intro_year, const ExtractionContext& ctx,
                           const MeshVersion& reference, const HierarchyGraph* graph = nullptr) {
  const Descriptor* current = reference.find_descriptor(d1.descriptor_id);
  if (!current)
    throw PreconditionError("new descriptor " + d1.descriptor_id + " is absent from reference version " +
                            std::to_string(reference.year()));
  HostFinding found = find_previous_hosts(d1, ctx);

  Annotation a;
  a.warnings = std::move(found.warnings);
  a.reviews = std::move(found.reviews);
  a.pmn_pattern = found.pmn_pattern;
  a.pmn_auto_resolved = found.pmn_auto_resolved;

  NewDescriptorRecord& r = a.record;
  r.descriptor_id = d1.descriptor_id;
  r.name = current->name;
  r.intro_year = intro_year;
  r.category = found.category;
  r.hosts = std::move(found.hosts);
  r.tree_numbers = current->tree_numbers;
  r.mesh_category_letters = mesh_category_letters(*current);

  if (r.category == ProvenanceCategory::cat4_emerging) {
    r.codes.insert(ProvenanceCode::emersion());
    return a;
  }
  for (const auto& host : r.hosts) {
    HostRelation rel;
    rel.host_id = host.descriptor_id;
    auto result = relation_in(d1.descriptor_id, host.descriptor_id, reference);
    rel.relation = result.type;
    rel.anomaly = result.anomaly;
    if (result.anomaly)
      a.warnings.push_back(d1.descriptor_id + ": host " + host.descriptor_id +
                           " is both ancestor and descendant in the reference version; using ancestor");
    if (rel.relation == RelationType::ancestor)
      rel.ancestor_gap = ancestor_gap(*current, *reference.find_descriptor(host.descriptor_id));
    rel.code = ProvenanceCode(r.category, classify_type(rel.relation, rel.ancestor_gap));
    if (graph) rel.distance = hierarchy_distance(d1.descriptor_id, host.descriptor_id, *graph);
    r.codes.insert(rel.code);
    a.relations.push_back(std::move(rel));
  }
  return a;
}

/// Convenience overload building the extraction context from version 0 alone.
inline Annotation annotate(const Descriptor& d1, int intro_year, const MeshVersion& version0,
                           const MeshVersion& reference) {
  ExtractionContext ctx(version0);
  return annotate(d1, intro_year, ctx, reference);
}

}  // namespace meshprov
