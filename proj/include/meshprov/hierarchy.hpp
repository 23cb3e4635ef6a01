#pragma once

// Hierarchical relations between two descriptors of the reference release,
// derived entirely from the prefix structure of their tree numbers.

#include <algorithm>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "meshprov/error.hpp"
#include "meshprov/model.hpp"

namespace meshprov {

struct RelationResult {
  RelationType type = RelationType::undefined;
  /// Both prefix directions held (ancestor through one tree, descendant through another).
  bool anomaly = false;
};

/// Relation of d1 to d0 from their tree numbers alone: ancestor when some tree
/// number of d0 is a proper prefix of one of d1 (d0 sits above d1), descendant
/// for the converse, unrelated otherwise. Both directions at once resolve to
/// ancestor with `anomaly` set.
inline RelationResult relation_between(const Descriptor& d1, const Descriptor& d0) {
  bool d0_above = false;
  bool d0_below = false;
  for (const auto& t1 : d1.tree_numbers) {
    for (const auto& t0 : d0.tree_numbers) {
      d0_above = d0_above || is_tree_prefix(t0, t1);
      d0_below = d0_below || is_tree_prefix(t1, t0);
    }
  }
  if (d0_above) return {RelationType::ancestor, d0_below};
  if (d0_below) return {RelationType::descendant, false};
  return {RelationType::unrelated, false};
}

inline RelationResult relation_in(std::string_view d1_id, std::string_view d0_id, const MeshVersion& reference) {
  const Descriptor* d1 = reference.find_descriptor(d1_id);
  if (!d1)
    throw PreconditionError("descriptor " + std::string(d1_id) + " is absent from reference version " +
                            std::to_string(reference.year()));
  if (d1_id == d0_id) throw PreconditionError("relation of descriptor " + std::string(d1_id) + " with itself");
  const Descriptor* d0 = reference.find_descriptor(d0_id);
  if (!d0) return {RelationType::undefined, false};
  return relation_between(*d1, *d0);
}

/// Relation type of new descriptor d1 to previous host d0 in the reference version.
inline RelationType relation_type(std::string_view d1_id, std::string_view d0_id, const MeshVersion& reference) {
  return relation_in(d1_id, d0_id, reference).type;
}

/// Smallest number of tree levels strictly between a tree number of d0 and one
/// of d1 that extends it. 0 means d0 is a parent of d1.
inline int ancestor_gap(const Descriptor& d1, const Descriptor& d0) {
  std::optional<int> best;
  for (const auto& t1 : d1.tree_numbers) {
    for (const auto& t0 : d0.tree_numbers) {
      if (!is_tree_prefix(t0, t1)) continue;
      int gap = static_cast<int>(t1.depth()) - static_cast<int>(t0.depth()) - 1;
      if (!best || gap < *best) best = gap;
    }
  }
  if (!best)
    throw PreconditionError("ancestor_gap: no tree number of " + d0.descriptor_id + " is a prefix of one of " +
                            d1.descriptor_id);
  return *best;
}

/// Undirected parent-child graph over the descriptors of one version. An edge
/// joins two descriptors when a tree number of one is a tree number of the other
/// plus exactly one segment.
class HierarchyGraph {
 public:
  explicit HierarchyGraph(const MeshVersion& version) : version_(&version) {
    for (const auto& [id, d] : version.descriptors()) {
      index_.emplace(id, ids_.size());
      ids_.push_back(id);
    }
    std::unordered_map<std::string, std::size_t> by_tree;
    for (const auto& [id, d] : version.descriptors())
      for (const auto& t : d.tree_numbers) by_tree.emplace(t.str(), index_.at(id));
    adjacency_.resize(ids_.size());
    for (const auto& [id, d] : version.descriptors()) {
      std::size_t child = index_.at(id);
      for (const auto& t : d.tree_numbers) {
        auto parent = t.parent();
        if (!parent) continue;
        auto it = by_tree.find(parent->str());
        if (it == by_tree.end() || it->second == child) continue;
        adjacency_[child].push_back(it->second);
        adjacency_[it->second].push_back(child);
      }
    }
    for (auto& adj : adjacency_) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }

  const MeshVersion& version() const { return *version_; }

  /// Edges on a shortest path between the two descriptors; nullopt when disconnected.
  std::optional<int> path_edges(std::string_view from_id, std::string_view to_id) const {
    std::size_t from = index_.at(std::string(from_id));
    std::size_t to = index_.at(std::string(to_id));
    if (from == to) return 0;
    std::vector<int> dist(ids_.size(), -1);
    std::deque<std::size_t> queue{from};
    dist[from] = 0;
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : adjacency_[u]) {
        if (dist[v] >= 0) continue;
        dist[v] = dist[u] + 1;
        if (v == to) return dist[v];
        queue.push_back(v);
      }
    }
    return std::nullopt;
  }

  std::size_t node_count() const { return ids_.size(); }

 private:
  const MeshVersion* version_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Number of other descriptors on the shortest hierarchy path from d1 to d0.
inline Distance hierarchy_distance(std::string_view d1_id, std::string_view d0_id, const HierarchyGraph& graph) {
  const MeshVersion& reference = graph.version();
  if (!reference.has_descriptor(d1_id))
    throw PreconditionError("descriptor " + std::string(d1_id) + " is absent from reference version " +
                            std::to_string(reference.year()));
  if (d1_id == d0_id) throw PreconditionError("distance of descriptor " + std::string(d1_id) + " to itself");
  if (!reference.has_descriptor(d0_id)) return Distance::undefined();
  auto edges = graph.path_edges(d1_id, d0_id);
  if (!edges) return Distance::infinite();
  return Distance::finite(*edges - 1);
}

inline Distance hierarchy_distance(std::string_view d1_id, std::string_view d0_id, const MeshVersion& reference) {
  return hierarchy_distance(d1_id, d0_id, HierarchyGraph(reference));
}

}  // namespace meshprov
