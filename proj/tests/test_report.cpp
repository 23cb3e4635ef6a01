#include <catch2/catch_amalgamated.hpp>

#include "meshprov.hpp"
#include "support/fixture.hpp"

using namespace meshprov;

namespace {

NewDescriptorRecord record(const std::string& id, int year, ProvenanceCategory cat, std::vector<std::string> codes,
                           std::vector<std::string> hosts = {}, std::vector<std::string> trees = {"C01.1"}) {
  NewDescriptorRecord r;
  r.descriptor_id = id;
  r.name = "Name " + id;
  r.intro_year = year;
  r.category = cat;
  for (const auto& h : hosts) r.hosts.push_back({h, "Host, " + h, HostCoverage::implicit_pi});
  for (const auto& c : codes) r.codes.insert(*ProvenanceCode::try_parse(c));
  for (const auto& t : trees) {
    r.tree_numbers.push_back(TreeNumber::parse(t));
    r.mesh_category_letters.insert(t[0]);
  }
  return r;
}

}  // namespace

TEST_CASE("annotation rows carry multi-valued fields") {
  auto r = record("D1", 2020, ProvenanceCategory::cat3_new_pi_concept, {"3.5", "3.2"}, {"D7", "D8"},
                  {"C13.703.420.491.500", "A01.378.800"});
  auto row = to_row(r);
  CHECK(row[3] == "3");
  CHECK(row[5] == "Host, D7;Host, D8");
  CHECK(row[7] == "3.2;3.5");
  CHECK(row[9] == "A;C");
  CHECK(record_from_row(row, "test") == r);
}

TEST_CASE("year files round-trip and sort by id") {
  auto dir = fixture::scratch("report-year");
  std::vector<NewDescriptorRecord> rs{
      record("D2", 2019, ProvenanceCategory::cat4_emerging, {"4.0"}),
      record("D1", 2019, ProvenanceCategory::cat2_old_scr, {"2.2"}, {"D5"}),
  };
  rs[0].name = "Comma, \"quoted\" name";
  write_year_csv(dir / "2019.csv", 2019, rs);
  auto back = read_year_csv(dir / "2019.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0] == rs[1]);
  CHECK(back[1] == rs[0]);

  write_year_csv(dir / "empty.csv", 2018, {});
  CHECK(fixture::slurp(dir / "empty.csv") ==
        "descriptor_id,name,intro_year,category,host_ids,host_names,host_coverage,codes,tree_numbers,mesh_categories\n");
  CHECK(read_year_csv(dir / "empty.csv").empty());
  CHECK_THROWS_AS(write_year_csv(dir / "x.csv", 2018, rs), PreconditionError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("aggregate counts a multi-code record once per category and once per type") {
  auto b = aggregate({record("D1", 2020, ProvenanceCategory::cat3_new_pi_concept, {"3.2", "3.5"}, {"D7", "D8"})}, 10);
  CHECK(b.record_count == 1);
  CHECK(b.category_totals.at(ProvenanceCategory::cat3_new_pi_concept) == 1);
  CHECK(b.type_totals.at(ProvenanceType::t2_subdivision) == 1);
  CHECK(b.type_totals.at(ProvenanceType::t5_detachment) == 1);
  CHECK(b.code_crosstab.at({ProvenanceCategory::cat3_new_pi_concept, ProvenanceType::t2_subdivision}) == 1);
  CHECK(b.multi_code_fraction == 1.0);
  CHECK(b.extension_ratio == Catch::Approx(0.1));
}

TEST_CASE("aggregate of nothing is all zero") {
  auto b = aggregate({}, 0, {2015, 2016});
  CHECK(b.record_count == 0);
  CHECK(b.years == std::vector<int>{2015, 2016});
  for (const auto& [k, v] : b.per_year_category_counts) CHECK(v == 0);
  for (const auto& [k, v] : b.type_totals) CHECK(v == 0);
  CHECK(b.multi_code_fraction == 0.0);
  CHECK(b.extension_ratio == 0.0);
}

TEST_CASE("annual spread reports population and sample deviation") {
  auto s = spread({2, 4, 4, 4, 5, 5, 7, 9});
  CHECK(s.mean == 5.0);
  CHECK(s.sd_population == 2.0);
  CHECK(s.sd_sample == Catch::Approx(std::sqrt(32.0 / 7.0)));
  auto one = spread({3});
  CHECK(one.sd_population == 0.0);
  CHECK(one.sd_sample == 0.0);
}

TEST_CASE("stats files are deterministic and read back") {
  std::vector<NewDescriptorRecord> rs{
      record("D1", 2015, ProvenanceCategory::cat1_old_concept, {"1.1"}, {"D9"}, {"B01.1"}),
      record("D2", 2016, ProvenanceCategory::cat2_old_scr, {"2.2", "2.3"}, {"D9", "D8"}),
      record("D3", 2016, ProvenanceCategory::cat4_emerging, {"4.0"}, {}, {"C01.2", "F03.1"}),
      record("D4", 2017, ProvenanceCategory::cat3_new_pi_concept, {}, {}, {}),
  };
  auto b = aggregate(rs, 100, {2015, 2016, 2017});
  CHECK(b.unresolved_host_records == 1);
  auto a = fixture::scratch("stats-a");
  auto c = fixture::scratch("stats-b");
  write_stats(b, a);
  write_stats(aggregate({rs[3], rs[1], rs[0], rs[2]}, 100, {2017, 2015, 2016}), c);
  CHECK(fixture::tree_contents(a) == fixture::tree_contents(c));
  for (const auto& name : stats_file_names()) CHECK(std::filesystem::is_regular_file(a / name));
  CHECK(read_stats(a) == b);

  auto crosstab = csv::read_file(a / "code_crosstab.csv");
  CHECK(crosstab.front() == csv::Row{"category", "0", "1", "2", "3", "4", "5", "total"});
  CHECK(crosstab.back().front() == "total");
  CHECK(crosstab.back().back() == "4");
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(c);
}

TEST_CASE("a one-year window gives one-column tables") {
  auto dir = fixture::scratch("stats-one");
  auto b = aggregate({record("D1", 2020, ProvenanceCategory::cat4_emerging, {"4.0"})}, 5, {2020});
  write_stats(b, dir);
  auto rows = csv::read_file(dir / "category_by_year.csv");
  CHECK(rows.front() == csv::Row{"category", "2020"});
  CHECK(rows.size() == 5);
  CHECK(read_stats(dir) == b);
  std::filesystem::remove_all(dir);
}

TEST_CASE("relations file lists one row per host") {
  auto dir = fixture::scratch("relations");
  HostRelation a{"D9", RelationType::ancestor, 0, Distance::finite(0),
                 ProvenanceCode(ProvenanceCategory::cat2_old_scr, ProvenanceType::t2_subdivision), false};
  HostRelation u{"D8", RelationType::undefined, std::nullopt, Distance::undefined(),
                 ProvenanceCode(ProvenanceCategory::cat2_old_scr, ProvenanceType::t1_succession), false};
  write_relations_csv(dir / "r.csv", {{"D1", a}, {"D1", u}});
  auto rows = csv::read_file(dir / "r.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == csv::Row{"D1", "D8", "undefined", "", "undefined", "2.1"});
  CHECK(rows[2] == csv::Row{"D1", "D9", "ancestor", "0", "0", "2.2"});
  std::filesystem::remove_all(dir);
}
