#include "roadeta/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace roadeta {

void validate_segment(const Segment& s) {
  if (s.length_m <= 0.0) throw InvalidParams("segment length must be > 0: " + s.id);
  if (s.priority < 0 || s.priority > 2) throw InvalidParams("segment priority must be 0..2: " + s.id);
}

void RoadNetwork::rebuild_adjacency_index() {
  out_adj.assign(segments.size(), {});
  in_adj.assign(segments.size(), {});
  for (auto [a, b] : adjacency) {
    out_adj[static_cast<size_t>(a)].push_back(b);
    in_adj[static_cast<size_t>(b)].push_back(a);
  }
}

Supersegment build_supersegment(const std::vector<Segment>& segments,
                                const std::vector<std::pair<int32_t, int32_t>>& edges,
                                const std::vector<int32_t>& order, const std::string& id) {
  const auto n = static_cast<int32_t>(segments.size());
  if (n == 0) throw InvalidParams("supersegment needs at least one segment");
  for (const auto& s : segments) validate_segment(s);
  for (auto [a, b] : edges)
    if (a < 0 || a >= n || b < 0 || b >= n) throw IndexOutOfRange("edge index out of range");
  if (static_cast<int32_t>(order.size()) != n)
    throw InvalidParams("traversal order must cover all nodes exactly once");
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (auto i : order) {
    if (i < 0 || i >= n || seen[static_cast<size_t>(i)])
      throw InvalidParams("traversal order must cover all nodes exactly once");
    seen[static_cast<size_t>(i)] = true;
  }

  std::set<std::pair<int32_t, int32_t>> edge_set;
  for (auto e : edges)
    if (!edge_set.insert(e).second)
      throw DuplicateEdge("duplicate edge (" + std::to_string(e.first) + "," +
                          std::to_string(e.second) + ")");

  // position of original index in traversal order
  std::vector<int32_t> pos(static_cast<size_t>(n));
  for (int32_t p = 0; p < n; ++p) pos[static_cast<size_t>(order[static_cast<size_t>(p)])] = p;

  Supersegment out;
  out.id = id;
  out.nodes.reserve(static_cast<size_t>(n));
  for (auto i : order) out.nodes.push_back(segments[static_cast<size_t>(i)].id);
  out.edges.reserve(edges.size());
  for (auto [a, b] : edges)
    out.edges.emplace_back(pos[static_cast<size_t>(a)], pos[static_cast<size_t>(b)]);
  std::sort(out.edges.begin(), out.edges.end());

  for (int32_t p = 0; p + 1 < n; ++p) {
    if (!std::binary_search(out.edges.begin(), out.edges.end(), std::make_pair(p, p + 1)))
      throw DisconnectedRoute("no edge between traversal positions " + std::to_string(p) +
                              " and " + std::to_string(p + 1));
  }
  return out;
}

ExtendedSupersegment as_extended(const Supersegment& ss) {
  ExtendedSupersegment out;
  out.base = ss;
  out.on_route_node.assign(ss.nodes.size(), 1);
  out.on_route_edge.assign(ss.edges.size(), 1);
  return out;
}

ExtendedSupersegment extend_supersegment(const RoadNetwork& world, const Supersegment& ss,
                                         int hops) {
  if (hops < 0) throw InvalidParams("hops must be >= 0");
  ExtendedSupersegment out = as_extended(ss);
  if (hops == 0) return out;

  std::vector<int32_t> route_idx;
  route_idx.reserve(ss.nodes.size());
  std::unordered_map<int32_t, int32_t> local_of;  // world index -> combined index
  for (size_t i = 0; i < ss.nodes.size(); ++i) {
    int32_t w = world.require_index(ss.nodes[i]);
    route_idx.push_back(w);
    local_of[w] = static_cast<int32_t>(i);
  }

  // BFS over undirected adjacency, up to `hops` steps from any route node
  std::vector<int> dist(world.segments.size(), -1);
  std::deque<int32_t> q;
  for (auto w : route_idx) {
    dist[static_cast<size_t>(w)] = 0;
    q.push_back(w);
  }
  std::vector<int32_t> extras;
  while (!q.empty()) {
    int32_t u = q.front();
    q.pop_front();
    int d = dist[static_cast<size_t>(u)];
    if (d >= hops) continue;
    auto visit = [&](int32_t v) {
      if (dist[static_cast<size_t>(v)] >= 0) return;
      dist[static_cast<size_t>(v)] = d + 1;
      extras.push_back(v);
      q.push_back(v);
    };
    for (auto v : world.out_adj[static_cast<size_t>(u)]) visit(v);
    for (auto v : world.in_adj[static_cast<size_t>(u)]) visit(v);
  }
  std::sort(extras.begin(), extras.end());
  for (auto w : extras) {
    local_of[w] = static_cast<int32_t>(ss.nodes.size() + out.extra_nodes.size());
    out.extra_nodes.push_back(world.segments[static_cast<size_t>(w)].id);
    out.on_route_node.push_back(0);
  }

  // induced adjacency among included nodes, minus edges already in the base
  std::set<std::pair<int32_t, int32_t>> base_edges(ss.edges.begin(), ss.edges.end());
  for (auto [a, b] : world.adjacency) {
    auto ia = local_of.find(a);
    auto ib = local_of.find(b);
    if (ia == local_of.end() || ib == local_of.end()) continue;
    std::pair<int32_t, int32_t> e{ia->second, ib->second};
    if (base_edges.count(e)) continue;
    out.extra_edges.push_back(e);
    out.on_route_edge.push_back(0);
  }
  std::sort(out.extra_edges.begin(), out.extra_edges.end());
  return out;
}

}  // namespace roadeta
