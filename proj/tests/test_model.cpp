#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "meshprov.hpp"

using namespace meshprov;

namespace {

Concept concept_of(const std::string& id, std::vector<std::string> terms,
                   ConceptRelation rel = ConceptRelation::preferred) {
  Concept c{id, {}, rel};
  for (std::size_t i = 0; i < terms.size(); ++i) c.terms.push_back({terms[i], i == 0});
  return c;
}

Descriptor descriptor(const std::string& id, const std::string& name, std::vector<std::string> trees,
                      const std::string& concept_id) {
  Descriptor d;
  d.descriptor_id = id;
  d.name = name;
  d.preferred_concept = concept_of(concept_id, {name});
  for (const auto& t : trees) d.tree_numbers.push_back(TreeNumber::parse(t));
  return d;
}

}  // namespace

TEST_CASE("tree numbers parse and serialize by segment") {
  auto t = TreeNumber::parse("C10.228.140.380.100");
  CHECK(t.depth() == 5);
  CHECK(t.segments().front() == "C10");
  CHECK(t.category_letter() == 'C');
  CHECK(t.str() == "C10.228.140.380.100");
  CHECK(t.parent()->str() == "C10.228.140.380");
  CHECK_FALSE(TreeNumber::parse("C10").parent());

  for (const char* bad : {"", "C", "10.228", "c10", "C10..1", "C10.", "C10.2a", "CC10", ".C10"})
    CHECK_FALSE(TreeNumber::try_parse(bad));
  CHECK_THROWS_AS(TreeNumber::parse("x"), PreconditionError);
}

TEST_CASE("is_tree_prefix works at segment granularity") {
  auto p = [](const char* a, const char* b) { return is_tree_prefix(TreeNumber::parse(a), TreeNumber::parse(b)); };
  CHECK(p("C10.228.140.380", "C10.228.140.380.100"));
  CHECK_FALSE(p("C10.228.140.380", "C10.228.140.380"));
  CHECK_FALSE(p("C10.5", "C10.55.100"));
  CHECK_FALSE(p("C10.228.140.380.100", "C10.228.140.380"));
  CHECK(p("C10", "C10.1.2.3"));
}

TEST_CASE("mesh category letters come from the first segment") {
  auto alz = descriptor("D1", "Alzheimer Disease", {"F03.615.400.100", "C10.228.140.380.100", "C10.574.945.249"}, "M1");
  CHECK(mesh_category_letters(alz) == std::set<char>{'C', 'F'});
  CHECK(mesh_category_letters(descriptor("D2", "Rootless", {}, "M2")).empty());
  CHECK(mesh_category_letters(descriptor("D3", "Receptors", {"D12.776.543"}, "M3")) == std::set<char>{'D'});
}

TEST_CASE("provenance codes pair emersion with category 4 only") {
  CHECK(ProvenanceCode(ProvenanceCategory::cat3_new_pi_concept, ProvenanceType::t5_detachment).str() == "3.5");
  CHECK(ProvenanceCode::emersion().str() == "4.0");
  CHECK_THROWS(ProvenanceCode(ProvenanceCategory::cat4_emerging, ProvenanceType::t2_subdivision));
  CHECK_THROWS(ProvenanceCode(ProvenanceCategory::cat1_old_concept, ProvenanceType::t0_emersion));
  CHECK(ProvenanceCode::try_parse("2.3")->type() == ProvenanceType::t3_submersion);
  for (const char* bad : {"4.1", "1.0", "5.1", "2.6", "2", "2.", ".2", "a.b", "2.2.2"})
    CHECK_FALSE(ProvenanceCode::try_parse(bad));
}

TEST_CASE("distance has three states") {
  CHECK(Distance::finite(0).str() == "0");
  CHECK(Distance::infinite().str() == "inf");
  CHECK(Distance::undefined().str() == "undefined");
  CHECK(Distance::finite(3).is_finite());
  CHECK(Distance::infinite() != Distance::undefined());
}

TEST_CASE("descriptor invariants are enforced") {
  auto d = descriptor("D1", "Dementia", {"F03.615.400"}, "M1");
  d.subordinate_concepts.push_back(concept_of("M2", {"Amentia"}, ConceptRelation::related));
  CHECK_NOTHROW(validate_descriptor(d));

  auto dup = d;
  dup.subordinate_concepts.push_back(concept_of("M1", {"Again"}, ConceptRelation::narrower));
  CHECK_THROWS_AS(validate_descriptor(dup), IntegrityError);

  auto bad_pref = d;
  bad_pref.preferred_concept.relation_to_preferred = ConceptRelation::narrower;
  CHECK_THROWS_AS(validate_descriptor(bad_pref), IntegrityError);

  auto bad_sub = d;
  bad_sub.subordinate_concepts.front().relation_to_preferred = ConceptRelation::preferred;
  CHECK_THROWS_AS(validate_descriptor(bad_sub), IntegrityError);

  auto two_preferred = d;
  two_preferred.preferred_concept.terms.push_back({"Other", true});
  CHECK_THROWS_AS(validate_descriptor(two_preferred), IntegrityError);
}

TEST_CASE("MeshVersion builds consistent indexes") {
  auto dementia = descriptor("D1", "Dementia", {"F03.615.400"}, "M1");
  dementia.preferred_concept.terms.push_back({"Amentia", false});
  dementia.subordinate_concepts.push_back(concept_of("M2", {"Familial Dementia"}, ConceptRelation::narrower));
  auto alz = descriptor("D2", "Alzheimer Disease", {"F03.615.400.100"}, "M3");
  ScrRecord scr{"C1", concept_of("M4", {"Adenocarcinoma of Lung"}), {}, {"D1", "D2"}};

  auto v = MeshVersion::build(2019, {dementia, alz}, {scr});
  CHECK(v->year() == 2019);
  CHECK(v->descriptors().size() == 2);
  CHECK(v->descriptor_for_concept("M2")->descriptor_id == "D1");
  CHECK(v->scr_for_concept("M4")->scr_id == "C1");
  CHECK(v->descriptors_named("  AMENTIA ") == MeshVersion::IdSet{"D1"});
  CHECK(v->scrs_named("\"adenocarcinoma of lung\"") == MeshVersion::IdSet{"C1"});
  CHECK(v->descriptors_named("nothing").empty());

  for (const auto& [concept_id, desc_id] : v->index_concept_to_descriptor()) {
    bool found = false;
    v->find_descriptor(desc_id)->for_each_concept([&](const Concept& c) { found = found || c.concept_id == concept_id; });
    CHECK(found);
  }
  for (const auto& [concept_id, scr_id] : v->index_concept_to_scr()) {
    bool found = false;
    v->find_scr(scr_id)->for_each_concept([&](const Concept& c) { found = found || c.concept_id == concept_id; });
    CHECK(found);
  }
}

TEST_CASE("MeshVersion rejects shared concepts, duplicate ids and unmapped SCRs") {
  auto a = descriptor("D1", "A", {"A01"}, "M1");
  auto b = descriptor("D2", "B", {"A02"}, "M1");
  try {
    MeshVersion::build(2020, {a, b}, {});
    FAIL("expected IntegrityError");
  } catch (const IntegrityError& e) {
    std::string what = e.what();
    CHECK(what.find("D1") != std::string::npos);
    CHECK(what.find("D2") != std::string::npos);
  }
  CHECK_THROWS_AS(MeshVersion::build(2020, {a, a}, {}), IntegrityError);
  ScrRecord unmapped{"C1", concept_of("M9", {"X"}), {}, {}};
  CHECK_THROWS_AS(MeshVersion::build(2020, {a}, {unmapped}), IntegrityError);
  CHECK_NOTHROW(MeshVersion::build(2020, {a}, {}));
}

TEST_CASE("text helpers") {
  CHECK(text::normalize_term("  \"Lung   Neoplasms\" ") == "lung neoplasms");
  CHECK(text::normalize_for_similarity("Receptors, Scavenger!") == "receptors scavenger");
  CHECK(text::utf8_decode("caf\xC3\xA9").size() == 4);
  CHECK(text::split_list(text::join_list(std::vector<std::string>{"a;b", "c\\d", ""})) == std::vector<std::string>{"a;b", "c\\d", ""});
  CHECK(text::split_list("").empty());
  CHECK(text::parse_int<int>("2019") == 2019);
  CHECK_FALSE(text::parse_int<int>("20x9"));
  CHECK(text::format_double(0.32) == "0.32");
  CHECK(text::ifind("Was Indexed Under", "indexed") == 4);
}

TEST_CASE("CSV quoting round-trips") {
  std::vector<csv::Row> rows{{"D1", "Receptors, Immunologic", "say \"hi\""}, {"D2", "multi\nline", ""}, {"", "", ""}};
  std::ostringstream out;
  csv::write_row(out, {"a", "b", "c"});
  for (const auto& r : rows) csv::write_row(out, r);
  CHECK(out.str().find("\"Receptors, Immunologic\"") != std::string::npos);
  CHECK(out.str().find("\"say \"\"hi\"\"\"") != std::string::npos);
  std::istringstream in(out.str());
  auto back = csv::read_all(in);
  REQUIRE(back.size() == 4);
  CHECK(back[1] == rows[0]);
  CHECK(back[2] == rows[1]);
  CHECK(back[3] == rows[2]);

  std::istringstream crlf("a,b\r\n1,2\r\n\r\n");
  auto parsed = csv::read_all(crlf);
  CHECK(parsed == std::vector<csv::Row>{{"a", "b"}, {"1", "2"}});

  std::istringstream unterminated("a,\"b\n");
  CHECK_THROWS(csv::read_all(unterminated));
}
