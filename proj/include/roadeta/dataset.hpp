#pragma once

#include <string>
#include <vector>

#include "roadeta/features.hpp"

namespace roadeta {

struct Dataset {
  std::vector<TraversalExample> examples;

  bool empty() const { return examples.empty(); }
  size_t size() const { return examples.size(); }
};

// One record per line: supersegment_id, t, h, nodes[], edges[],
// node_features[][], global_features[], y_ss, y_seg[], f_ss, f_seg[]; plus
// edge_features[][]/on_route flags when present. A sidecar
// <path>.schema.json records the feature layout version.
void save_dataset(const std::string& path, const Dataset& ds);
Dataset load_dataset(const std::string& path);
void write_schema_sidecar(const std::string& dataset_path, const Dataset& ds);

struct SamplingParams {
  int32_t count = 1000;          // examples per horizon
  std::vector<int> horizons{kHorizonsS.begin(), kHorizonsS.end()};
  double test_fraction = 0.2;    // later days become the test split
  int extend_hops = 0;           // 0 = base supersegments
  bool route_indicators = false; // extended extra features
  int64_t end_margin_s = 3600;   // traversal must finish inside the field
};

struct SampledSplits {
  Dataset train;
  Dataset test;
  int64_t split_time_s = 0;  // max train departure < split_time_s <= min test departure
};

// Uniform over (supersegment, time) within each split's day range; labels
// from ground truth at t, features from windows ending at t - h.
SampledSplits sample_traversals(const RoadNetwork& net, const SpeedField& field,
                                const std::vector<Supersegment>& supersegments, uint64_t seed,
                                const SamplingParams& params);

}  // namespace roadeta
