#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "roadeta/graph.hpp"
#include "roadeta/synth.hpp"

namespace roadeta {

// Node feature layout, per segment:
//   [0,17)   real-time speed, 2-minute windows ending at t-h (index 0 latest)
//   [17,34)  real-time travel time per window (length / speed)
//   [34,46)  historical speed, 8-minute windows: 5 before t-h, 7 after
//   [46,58)  historical travel time per window
//   58       length_m
//   59       priority ordinal
//   [60,64)  missing flags: rt speed, rt time, hist speed, hist time
// Extended graphs with route indicators append one more column (on-route).
inline constexpr int kRtWindows = 17;
inline constexpr int kRtWindowS = 120;
inline constexpr int kHistBefore = 5;
inline constexpr int kHistAfter = 7;
inline constexpr int kHistWindows = kHistBefore + kHistAfter;
inline constexpr int kHistWindowS = 480;
inline constexpr int kNodeCoreDims = 2 * kRtWindows + 2 * kHistWindows + 2;  // 60
inline constexpr int kNodeFlagDims = 4;
inline constexpr int kNodeBaseDims = kNodeCoreDims + kNodeFlagDims;  // 64
inline constexpr int kGlobalDims = kRtWindows + 1;                   // 17 ss times + flag
inline constexpr int kFeatureLayoutVersion = 1;

inline constexpr std::array<int, 5> kHorizonsS = {0, 600, 1200, 1800, 3600};

inline constexpr int kRtSpeedOffset = 0;
inline constexpr int kRtTimeOffset = kRtWindows;
inline constexpr int kHistSpeedOffset = 2 * kRtWindows;
inline constexpr int kHistTimeOffset = 2 * kRtWindows + kHistWindows;
inline constexpr int kLengthOffset = kNodeCoreDims - 2;
inline constexpr int kPriorityOffset = kNodeCoreDims - 1;
inline constexpr int kFlagsOffset = kNodeCoreDims;

// window w covers [t-h-(w+1)*120, t-h-w*120)
std::pair<int64_t, int64_t> rt_window_bounds(int64_t t, int horizon_s, int w);
// windows 0..4 before t-h, 5..11 after
std::pair<int64_t, int64_t> hist_window_bounds(int64_t t, int horizon_s, int w);

// Featurized snapshot of one supersegment at a departure time. Features are
// raw (unnormalized); labels cover on-route nodes in traversal order.
struct TraversalExample {
  std::string supersegment_id;
  int64_t departure_time_s = 0;
  int horizon_s = 0;

  std::vector<std::string> nodes;
  std::vector<std::pair<int32_t, int32_t>> edges;
  std::vector<uint8_t> on_route_node;
  std::vector<uint8_t> on_route_edge;

  int node_feature_dim = kNodeBaseDims;
  int edge_feature_dim = 1;
  std::vector<float> node_features;  // [nodes x node_feature_dim]
  std::vector<float> edge_features;  // [edges x edge_feature_dim]
  std::vector<float> global_features;  // [kGlobalDims]

  double y_ss = 0.0;
  std::vector<double> y_seg;  // per on-route node
  double f_ss = 0.0;
  std::vector<double> f_seg;

  size_t num_nodes() const { return nodes.size(); }
  size_t num_route_nodes() const { return y_seg.empty() ? nodes.size() : y_seg.size(); }
  float node_feature(size_t node, int col) const {
    return node_features[node * static_cast<size_t>(node_feature_dim) + static_cast<size_t>(col)];
  }
  std::vector<double> y_cum() const;
  std::vector<double> f_cum() const;
};

struct FeaturizeOptions {
  // append on-route indicator columns (extended-graph extra features)
  bool route_indicators = false;
};

// Fills features only; labels and free-flow fields are left zero. Real-time
// windows end at t - h. Missing windows are imputed (historical, then
// real-time, then free flow) and flagged, never a hard failure.
TraversalExample featurize(const SpeedField& field, const RoadNetwork& net,
                           const ExtendedSupersegment& graph, int64_t departure_s, int horizon_s,
                           const FeaturizeOptions& opts = {});

// featurize + exact ground-truth labels + free-flow times
TraversalExample make_example(const SpeedField& field, const RoadNetwork& net,
                              const ExtendedSupersegment& graph, int64_t departure_s,
                              int horizon_s, const FeaturizeOptions& opts = {});

}  // namespace roadeta
