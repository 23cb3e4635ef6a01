#include <catch2/catch_amalgamated.hpp>

#include "support/fixture.hpp"
#include "support/properties.hpp"

using namespace meshprov;

namespace {

void require_ok(const props::PropertyResult& r) {
  INFO(r.failure);
  CHECK(r.ok);
  CHECK(r.cases > 0);
}

}  // namespace

TEST_CASE("tree prefix agrees with the segment oracle") { require_ok(props::check_tree_prefix_oracle(1)); }

TEST_CASE("relations, gaps and distances agree with all-pairs shortest paths") {
  require_ok(props::check_gap_vs_bfs(2));
}

TEST_CASE("random version pairs land in their intended category") { require_ok(props::check_random_version_pairs(3)); }

TEST_CASE("aggregated statistics agree with direct counts") { require_ok(props::check_random_stats(4)); }

TEST_CASE("random annotation records survive the CSV round trip") {
  std::mt19937_64 rng(5);
  auto dir = fixture::scratch("prop-csv");
  for (int round = 0; round < 20; ++round) {
    auto records = props::random_records(rng, 40);
    std::map<int, std::vector<NewDescriptorRecord>> by_year;
    for (auto& r : records) {
      r.name = "Name, \"" + r.descriptor_id + "\"\nline;two\\";
      for (auto& h : r.hosts) h.name = "Host; " + h.descriptor_id;
      by_year[r.intro_year].push_back(r);
    }
    for (auto& [year, rs] : by_year) {
      auto path = dir / (std::to_string(year) + ".csv");
      write_year_csv(path, year, rs);
      std::sort(rs.begin(), rs.end(), [](const auto& a, const auto& b) { return a.descriptor_id < b.descriptor_id; });
      CHECK(read_year_csv(path) == rs);
    }
  }
  std::filesystem::remove_all(dir);
}
