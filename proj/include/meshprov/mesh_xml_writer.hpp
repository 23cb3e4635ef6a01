#pragma once

// Writes descriptors and SCRs back out in the release XML layout, limited to
// the elements the reader extracts. Used for fixtures and round-trip checks.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "meshprov/model.hpp"

namespace meshprov {

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string_view relation_code(ConceptRelation r) {
  switch (r) {
    case ConceptRelation::narrower: return "NRW";
    case ConceptRelation::broader: return "BRD";
    case ConceptRelation::related: return "REL";
    case ConceptRelation::preferred: return "";
  }
  return "";
}

inline void write_concepts(std::ostream& out, const Concept& preferred, const std::vector<Concept>& subordinates) {
  auto write_one = [&](const Concept& c, bool is_preferred) {
    out << "   <Concept PreferredConceptYN=\"" << (is_preferred ? 'Y' : 'N') << "\">\n";
    out << "    <ConceptUI>" << xml_escape(c.concept_id) << "</ConceptUI>\n";
    if (const Term* t = c.preferred_term())
      out << "    <ConceptName>\n     <String>" << xml_escape(t->text) << "</String>\n    </ConceptName>\n";
    if (!is_preferred) {
      out << "    <ConceptRelationList>\n     <ConceptRelation RelationName=\"" << relation_code(c.relation_to_preferred)
          << "\">\n      <Concept1UI>" << xml_escape(preferred.concept_id) << "</Concept1UI>\n      <Concept2UI>"
          << xml_escape(c.concept_id) << "</Concept2UI>\n     </ConceptRelation>\n    </ConceptRelationList>\n";
    }
    out << "    <TermList>\n";
    for (const auto& t : c.terms) {
      out << "     <Term ConceptPreferredTermYN=\"" << (t.is_preferred ? 'Y' : 'N')
          << "\" IsPermutedTermYN=\"N\" LexicalTag=\"NON\">\n      <String>" << xml_escape(t.text)
          << "</String>\n     </Term>\n";
    }
    out << "    </TermList>\n   </Concept>\n";
  };
  out << "  <ConceptList>\n";
  write_one(preferred, true);
  for (const auto& c : subordinates) write_one(c, false);
  out << "  </ConceptList>\n";
}

}  // namespace detail

inline void write_descriptor_xml(std::ostream& out, const std::vector<Descriptor>& descriptors, int year = 0) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!DOCTYPE DescriptorRecordSet SYSTEM \"desc" << year << ".dtd\">\n";
  out << "<DescriptorRecordSet LanguageCode=\"eng\">\n";
  for (const auto& d : descriptors) {
    using detail::xml_escape;
    out << " <DescriptorRecord DescriptorClass=\"1\">\n";
    out << "  <DescriptorUI>" << xml_escape(d.descriptor_id) << "</DescriptorUI>\n";
    out << "  <DescriptorName>\n   <String>" << xml_escape(d.name) << "</String>\n  </DescriptorName>\n";
    if (d.pmn_text) out << "  <PublicMeSHNote>" << xml_escape(*d.pmn_text) << "</PublicMeSHNote>\n";
    if (!d.pi_notes.empty()) {
      out << "  <PreviousIndexingList>\n";
      for (const auto& pi : d.pi_notes) out << "   <PreviousIndexing>" << xml_escape(pi) << "</PreviousIndexing>\n";
      out << "  </PreviousIndexingList>\n";
    }
    if (!d.tree_numbers.empty()) {
      out << "  <TreeNumberList>\n";
      for (const auto& t : d.tree_numbers) out << "   <TreeNumber>" << t.str() << "</TreeNumber>\n";
      out << "  </TreeNumberList>\n";
    }
    detail::write_concepts(out, d.preferred_concept, d.subordinate_concepts);
    out << " </DescriptorRecord>\n";
  }
  out << "</DescriptorRecordSet>\n";
}

inline void write_scr_xml(std::ostream& out, const std::vector<ScrRecord>& scrs, int year = 0) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!DOCTYPE SupplementalRecordSet SYSTEM \"supp" << year << ".dtd\">\n";
  out << "<SupplementalRecordSet LanguageCode=\"eng\">\n";
  for (const auto& s : scrs) {
    using detail::xml_escape;
    out << " <SupplementalRecord SCRClass=\"1\">\n";
    out << "  <SupplementalRecordUI>" << xml_escape(s.scr_id) << "</SupplementalRecordUI>\n";
    out << "  <SupplementalRecordName>\n   <String>" << xml_escape(s.name()) << "</String>\n  </SupplementalRecordName>\n";
    out << "  <HeadingMappedToList>\n";
    for (const auto& id : s.mapped_descriptor_ids) {
      out << "   <HeadingMappedTo>\n    <DescriptorReferredTo>\n     <DescriptorUI>" << xml_escape(id)
          << "</DescriptorUI>\n    </DescriptorReferredTo>\n   </HeadingMappedTo>\n";
    }
    out << "  </HeadingMappedToList>\n";
    detail::write_concepts(out, s.preferred_concept, s.subordinate_concepts);
    out << " </SupplementalRecord>\n";
  }
  out << "</SupplementalRecordSet>\n";
}

}  // namespace meshprov
