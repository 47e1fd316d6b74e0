#include "roadeta/features.hpp"

#include <cmath>

namespace roadeta {

std::pair<int64_t, int64_t> rt_window_bounds(int64_t t, int horizon_s, int w) {
  int64_t base = t - horizon_s;
  return {base - static_cast<int64_t>(w + 1) * kRtWindowS,
          base - static_cast<int64_t>(w) * kRtWindowS};
}

std::pair<int64_t, int64_t> hist_window_bounds(int64_t t, int horizon_s, int w) {
  int64_t base = t - horizon_s;
  int64_t start = base + static_cast<int64_t>(w - kHistBefore) * kHistWindowS;
  return {start, start + kHistWindowS};
}

std::vector<double> TraversalExample::y_cum() const {
  std::vector<double> out(y_seg.size());
  double acc = 0.0;
  for (size_t i = 0; i < y_seg.size(); ++i) out[i] = (acc += y_seg[i]);
  return out;
}

std::vector<double> TraversalExample::f_cum() const {
  std::vector<double> out(f_seg.size());
  double acc = 0.0;
  for (size_t i = 0; i < f_seg.size(); ++i) out[i] = (acc += f_seg[i]);
  return out;
}

namespace {

struct WindowValue {
  double speed;
  bool imputed;
};

// imputation chain: historical at the same span, then live field, then free flow
WindowValue resolve_window(const SpeedField& field, int32_t seg, int64_t a, int64_t b,
                           bool prefer_live) {
  double primary = prefer_live ? field.mean_speed(seg, a, b) : field.hist_mean_speed(seg, a, b);
  if (std::isfinite(primary)) return {primary, false};
  double hist = field.hist_mean_speed(seg, a, b);
  if (std::isfinite(hist)) return {hist, true};
  double live = field.mean_speed(seg, a, b);
  if (std::isfinite(live)) return {live, true};
  return {static_cast<double>(field.free_flow[static_cast<size_t>(seg)]), true};
}

}  // namespace

TraversalExample featurize(const SpeedField& field, const RoadNetwork& net,
                           const ExtendedSupersegment& graph, int64_t departure_s, int horizon_s,
                           const FeaturizeOptions& opts) {
  TraversalExample ex;
  ex.supersegment_id = graph.base.id;
  ex.departure_time_s = departure_s;
  ex.horizon_s = horizon_s;

  const auto n = graph.num_nodes();
  const auto m = graph.num_edges();
  ex.nodes.reserve(n);
  for (size_t i = 0; i < n; ++i) ex.nodes.push_back(graph.node_id(i));
  ex.edges.reserve(m);
  for (size_t k = 0; k < m; ++k) ex.edges.push_back(graph.edge(k));
  ex.on_route_node = graph.on_route_node;
  ex.on_route_edge = graph.on_route_edge;

  ex.node_feature_dim = kNodeBaseDims + (opts.route_indicators ? 1 : 0);
  ex.edge_feature_dim = 1 + (opts.route_indicators ? 1 : 0);
  ex.node_features.assign(n * static_cast<size_t>(ex.node_feature_dim), 0.0f);
  ex.edge_features.assign(m * static_cast<size_t>(ex.edge_feature_dim), 0.0f);
  ex.global_features.assign(kGlobalDims, 0.0f);

  bool any_rt_imputed = false;
  for (size_t i = 0; i < n; ++i) {
    int32_t seg = net.require_index(ex.nodes[i]);
    double length = net.segments[static_cast<size_t>(seg)].length_m;
    float* row = ex.node_features.data() + i * static_cast<size_t>(ex.node_feature_dim);

    bool rt_imputed = false, hist_imputed = false;
    for (int w = 0; w < kRtWindows; ++w) {
      auto [a, b] = rt_window_bounds(departure_s, horizon_s, w);
      auto v = resolve_window(field, seg, a, b, /*prefer_live=*/true);
      rt_imputed |= v.imputed;
      row[kRtSpeedOffset + w] = static_cast<float>(v.speed);
      row[kRtTimeOffset + w] = static_cast<float>(length / v.speed);
    }
    for (int w = 0; w < kHistWindows; ++w) {
      auto [a, b] = hist_window_bounds(departure_s, horizon_s, w);
      auto v = resolve_window(field, seg, a, b, /*prefer_live=*/false);
      hist_imputed |= v.imputed;
      row[kHistSpeedOffset + w] = static_cast<float>(v.speed);
      row[kHistTimeOffset + w] = static_cast<float>(length / v.speed);
    }
    row[kLengthOffset] = static_cast<float>(length);
    row[kPriorityOffset] = static_cast<float>(net.segments[static_cast<size_t>(seg)].priority);
    row[kFlagsOffset + 0] = rt_imputed ? 1.0f : 0.0f;
    row[kFlagsOffset + 1] = rt_imputed ? 1.0f : 0.0f;
    row[kFlagsOffset + 2] = hist_imputed ? 1.0f : 0.0f;
    row[kFlagsOffset + 3] = hist_imputed ? 1.0f : 0.0f;
    if (opts.route_indicators) row[kNodeBaseDims] = ex.on_route_node[i] ? 1.0f : 0.0f;

    // supersegment-level real-time travel times sum over on-route nodes,
    // mirroring the segment window cadence
    if (ex.on_route_node[i]) {
      any_rt_imputed |= rt_imputed;
      for (int w = 0; w < kRtWindows; ++w) ex.global_features[w] += row[kRtTimeOffset + w];
    }
  }
  ex.global_features[kRtWindows] = any_rt_imputed ? 1.0f : 0.0f;

  for (size_t k = 0; k < m; ++k) {
    float* row = ex.edge_features.data() + k * static_cast<size_t>(ex.edge_feature_dim);
    row[0] = 1.0f;  // constant placeholder; keeps the edge update live
    if (opts.route_indicators) row[1] = ex.on_route_edge[k] ? 1.0f : 0.0f;
  }
  return ex;
}

TraversalExample make_example(const SpeedField& field, const RoadNetwork& net,
                              const ExtendedSupersegment& graph, int64_t departure_s,
                              int horizon_s, const FeaturizeOptions& opts) {
  TraversalExample ex = featurize(field, net, graph, departure_s, horizon_s, opts);
  auto truth = ground_truth_travel_time(field, net, graph.base, departure_s);
  ex.y_ss = truth.y_ss;
  ex.y_seg = std::move(truth.y_seg);
  ex.f_seg.reserve(graph.base.nodes.size());
  for (const auto& node : graph.base.nodes) {
    int32_t seg = net.require_index(node);
    double ff = field.free_flow[static_cast<size_t>(seg)];
    ex.f_seg.push_back(net.segments[static_cast<size_t>(seg)].length_m / ff);
  }
  for (double f : ex.f_seg) ex.f_ss += f;
  return ex;
}

}  // namespace roadeta
