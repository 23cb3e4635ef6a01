#pragma once

// Multi-year orchestration: which descriptors are new in each release, and
// which of them survive to the reference release.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "meshprov/error.hpp"
#include "meshprov/model.hpp"

namespace meshprov {

/// Years [first_year, last_year] are analysed against reference_year.
/// Versions first_year - 1 (the baseline) through reference_year must be available.
struct StudyWindow {
  int first_year = 0;
  int last_year = 0;
  int reference_year = 0;

  int baseline_year() const { return first_year - 1; }

  void validate() const {
    if (!(first_year < last_year))
      throw ConfigError("study window: first_year (" + std::to_string(first_year) +
                        ") must be before last_year (" + std::to_string(last_year) + ")");
    if (!(last_year <= reference_year))
      throw ConfigError("study window: last_year (" + std::to_string(last_year) +
                        ") must not exceed reference_year (" + std::to_string(reference_year) + ")");
  }

  /// Every year whose release must be loaded.
  std::vector<int> required_years() const {
    std::vector<int> ys;
    for (int y = baseline_year(); y <= reference_year; ++y) ys.push_back(y);
    return ys;
  }
  std::vector<int> years() const {
    std::vector<int> ys;
    for (int y = first_year; y <= last_year; ++y) ys.push_back(y);
    return ys;
  }
};

/// Ids present in `current` and absent from `previous`.
/// Non-consecutive years are compared all the same; `warnings` receives a note.
inline std::set<std::string> identify_new_descriptors(const MeshVersion& previous, const MeshVersion& current,
                                                      std::vector<std::string>* warnings = nullptr) {
  if (warnings && previous.year() + 1 != current.year())
    warnings->push_back("comparing non-consecutive versions " + std::to_string(previous.year()) + " and " +
                        std::to_string(current.year()));
  std::set<std::string> fresh;
  for (const auto& [id, d] : current.descriptors())
    if (!previous.has_descriptor(id)) fresh.insert(id);
  return fresh;
}

/// Attributes each retained new descriptor to the first window year that introduced it.
/// Feed consecutive years in ascending order. Ids already present in the baseline
/// release, or already attributed, are not attributed again.
class NewDescriptorTracker {
 public:
  NewDescriptorTracker(const MeshVersion& baseline, const MeshVersion& reference) : reference_(reference) {
    for (const auto& [id, d] : baseline.descriptors()) seen_.insert(id);
  }

  std::set<std::string> advance(const MeshVersion& previous, const MeshVersion& current,
                                std::vector<std::string>& warnings) {
    std::set<std::string> retained;
    for (const auto& id : identify_new_descriptors(previous, current, &warnings)) {
      if (!seen_.insert(id).second) {
        warnings.push_back(id + " reappears in " + std::to_string(current.year()) +
                           " after removal; attributed to its earlier introduction");
        continue;
      }
      if (reference_.has_descriptor(id)) retained.insert(id);
    }
    return retained;
  }

 private:
  const MeshVersion& reference_;
  std::set<std::string> seen_;
};

/// Lookup of a loaded release by year; throws when the year is unavailable.
using VersionLookup = std::function<const MeshVersion&(int year)>;

/// New descriptors per window year that are still present in the reference release.
inline std::map<int, std::set<std::string>> retained_new_descriptors(const StudyWindow& window,
                                                                     const VersionLookup& versions,
                                                                     std::vector<std::string>* warnings = nullptr) {
  window.validate();
  std::vector<std::string> local;
  auto& sink = warnings ? *warnings : local;
  const MeshVersion& reference = versions(window.reference_year);
  NewDescriptorTracker tracker(versions(window.baseline_year()), reference);
  std::map<int, std::set<std::string>> out;
  for (int y = window.first_year; y <= window.last_year; ++y) out[y] = tracker.advance(versions(y - 1), versions(y), sink);
  return out;
}

/// VersionLookup over an in-memory map; missing years raise IoError naming the year.
inline VersionLookup lookup_from(const std::map<int, VersionPtr>& versions) {
  return [&versions](int year) -> const MeshVersion& {
    auto it = versions.find(year);
    if (it == versions.end() || !it->second) throw IoError("no version loaded for year " + std::to_string(year));
    return *it->second;
  };
}

}  // namespace meshprov
