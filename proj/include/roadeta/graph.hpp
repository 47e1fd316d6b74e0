#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "roadeta/errors.hpp"

namespace roadeta {

// Road classes. Priorities feed both feature vectors and route mining.
enum SegmentPriority : int { kLocal = 0, kArterial = 1, kHighway = 2 };

struct Segment {
  std::string id;
  double length_m = 0.0;  // > 0
  int priority = kLocal;  // 0 local, 1 arterial, 2 highway
};

// A small directed graph of road segments along a common route; the unit of
// prediction. Nodes are listed in traversal order and consecutive nodes must
// be connected by an edge.
struct Supersegment {
  std::string id;
  std::vector<std::string> nodes;                     // segment ids, traversal order
  std::vector<std::pair<int32_t, int32_t>> edges;     // (src_index, dst_index)
};

// Supersegment plus off-route neighbor segments. Combined node indexing is
// [base.nodes..., extra_nodes...]; labels stay defined over on-route nodes
// only.
struct ExtendedSupersegment {
  Supersegment base;
  std::vector<std::string> extra_nodes;
  std::vector<std::pair<int32_t, int32_t>> extra_edges;  // combined indexing
  std::vector<uint8_t> on_route_node;                    // |base.nodes| + |extra_nodes|
  std::vector<uint8_t> on_route_edge;                    // |base.edges| + |extra_edges|

  size_t num_nodes() const { return base.nodes.size() + extra_nodes.size(); }
  size_t num_route_nodes() const { return base.nodes.size(); }
  const std::string& node_id(size_t i) const {
    return i < base.nodes.size() ? base.nodes[i] : extra_nodes[i - base.nodes.size()];
  }
  std::pair<int32_t, int32_t> edge(size_t k) const {
    return k < base.edges.size() ? base.edges[k] : extra_edges[k - base.edges.size()];
  }
  size_t num_edges() const { return base.edges.size() + extra_edges.size(); }
};

struct RoadNetwork {
  std::vector<Segment> segments;
  std::unordered_map<std::string, int32_t> index_of;       // id -> dense index
  std::vector<std::pair<int32_t, int32_t>> adjacency;      // directed: a then b
  std::vector<std::vector<int32_t>> out_adj;               // derived
  std::vector<std::vector<int32_t>> in_adj;
  std::vector<int32_t> region;                             // partition label per segment

  int32_t require_index(const std::string& id) const {
    auto it = index_of.find(id);
    if (it == index_of.end()) throw UnknownSegment("unknown segment: " + id);
    return it->second;
  }
  void rebuild_adjacency_index();
};

void validate_segment(const Segment& s);

// Validates and assembles a supersegment from segments, an adjacency edge
// list (indices into `segments`), and a traversal order covering every
// segment exactly once. Throws DisconnectedRoute when consecutive ordered
// nodes lack an edge and DuplicateEdge on repeated edges.
Supersegment build_supersegment(const std::vector<Segment>& segments,
                                const std::vector<std::pair<int32_t, int32_t>>& edges,
                                const std::vector<int32_t>& order,
                                const std::string& id = "ss");

// Grows `ss` with every world segment within `hops` (undirected) adjacency
// steps of an on-route node. hops=0 returns the base graph with all flags
// true and no extra edges.
ExtendedSupersegment extend_supersegment(const RoadNetwork& world, const Supersegment& ss,
                                         int hops);

// Trivial wrapper so featurization can treat both graph kinds uniformly.
ExtendedSupersegment as_extended(const Supersegment& ss);

}  // namespace roadeta
