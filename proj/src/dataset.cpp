#include "roadeta/dataset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "roadeta/rng.hpp"

namespace roadeta {

using nlohmann::json;

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open dataset for write: " + path);
  for (const auto& ex : ds.examples) {
    json j;
    j["supersegment_id"] = ex.supersegment_id;
    j["t"] = ex.departure_time_s;
    j["h"] = ex.horizon_s;
    j["nodes"] = ex.nodes;
    auto& edges = j["edges"] = json::array();
    for (auto [a, b] : ex.edges) edges.push_back({a, b});
    auto& nf = j["node_features"] = json::array();
    for (size_t i = 0; i < ex.num_nodes(); ++i) {
      json row = json::array();
      for (int c = 0; c < ex.node_feature_dim; ++c) row.push_back(ex.node_feature(i, c));
      nf.push_back(std::move(row));
    }
    j["global_features"] = ex.global_features;
    j["y_ss"] = ex.y_ss;
    j["y_seg"] = ex.y_seg;
    j["f_ss"] = ex.f_ss;
    j["f_seg"] = ex.f_seg;
    if (ex.edge_feature_dim != 1 || !std::all_of(ex.on_route_node.begin(), ex.on_route_node.end(),
                                                 [](uint8_t v) { return v != 0; })) {
      auto& ef = j["edge_features"] = json::array();
      for (size_t k = 0; k < ex.edges.size(); ++k) {
        json row = json::array();
        for (int c = 0; c < ex.edge_feature_dim; ++c)
          row.push_back(ex.edge_features[k * static_cast<size_t>(ex.edge_feature_dim) +
                                         static_cast<size_t>(c)]);
        ef.push_back(std::move(row));
      }
      j["on_route_node"] = ex.on_route_node;
      j["on_route_edge"] = ex.on_route_edge;
    }
    os << j.dump() << "\n";
  }
  if (!os) throw std::runtime_error("dataset write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open dataset: " + path);
  Dataset ds;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    TraversalExample ex;
    ex.supersegment_id = j.at("supersegment_id").get<std::string>();
    ex.departure_time_s = j.at("t").get<int64_t>();
    ex.horizon_s = j.at("h").get<int>();
    ex.nodes = j.at("nodes").get<std::vector<std::string>>();
    for (const auto& e : j.at("edges"))
      ex.edges.emplace_back(e.at(0).get<int32_t>(), e.at(1).get<int32_t>());
    const auto& nf = j.at("node_features");
    ex.node_feature_dim = nf.empty() ? kNodeBaseDims : static_cast<int>(nf[0].size());
    ex.node_features.reserve(nf.size() * static_cast<size_t>(ex.node_feature_dim));
    for (const auto& row : nf)
      for (const auto& v : row) ex.node_features.push_back(v.get<float>());
    ex.global_features = j.at("global_features").get<std::vector<float>>();
    ex.y_ss = j.at("y_ss").get<double>();
    ex.y_seg = j.at("y_seg").get<std::vector<double>>();
    ex.f_ss = j.at("f_ss").get<double>();
    ex.f_seg = j.at("f_seg").get<std::vector<double>>();
    if (j.contains("edge_features")) {
      const auto& ef = j["edge_features"];
      ex.edge_feature_dim = ef.empty() ? 1 : static_cast<int>(ef[0].size());
      for (const auto& row : ef)
        for (const auto& v : row) ex.edge_features.push_back(v.get<float>());
      ex.on_route_node = j.at("on_route_node").get<std::vector<uint8_t>>();
      ex.on_route_edge = j.at("on_route_edge").get<std::vector<uint8_t>>();
    } else {
      ex.edge_feature_dim = 1;
      ex.edge_features.assign(ex.edges.size(), 1.0f);
      ex.on_route_node.assign(ex.nodes.size(), 1);
      ex.on_route_edge.assign(ex.edges.size(), 1);
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

void write_schema_sidecar(const std::string& dataset_path, const Dataset& ds) {
  json j;
  j["format"] = "roadeta-dataset";
  j["layout_version"] = kFeatureLayoutVersion;
  j["node_feature_dim"] = ds.empty() ? kNodeBaseDims : ds.examples.front().node_feature_dim;
  j["edge_feature_dim"] = ds.empty() ? 1 : ds.examples.front().edge_feature_dim;
  j["global_feature_dim"] = kGlobalDims;
  j["rt_windows"] = kRtWindows;
  j["rt_window_s"] = kRtWindowS;
  j["hist_windows_before"] = kHistBefore;
  j["hist_windows_after"] = kHistAfter;
  j["hist_window_s"] = kHistWindowS;
  j["horizons_s"] = std::vector<int>(kHorizonsS.begin(), kHorizonsS.end());
  j["examples"] = ds.size();
  std::ofstream os(dataset_path + ".schema.json");
  if (!os) throw std::runtime_error("cannot write schema sidecar");
  os << j.dump(2) << "\n";
}

SampledSplits sample_traversals(const RoadNetwork& net, const SpeedField& field,
                                const std::vector<Supersegment>& supersegments, uint64_t seed,
                                const SamplingParams& params) {
  if (supersegments.empty()) throw InvalidParams("no supersegments to sample");
  if (params.count < 0 || params.test_fraction <= 0.0 || params.test_fraction >= 1.0)
    throw InvalidParams("bad sampling params");

  // pre-extend once per supersegment
  std::vector<ExtendedSupersegment> graphs;
  graphs.reserve(supersegments.size());
  for (const auto& ss : supersegments)
    graphs.push_back(params.extend_hops > 0 ? extend_supersegment(net, ss, params.extend_hops)
                                             : as_extended(ss));
  FeaturizeOptions fopts{.route_indicators = params.route_indicators};

  const int max_h = *std::max_element(params.horizons.begin(), params.horizons.end());
  const int64_t lead_margin = static_cast<int64_t>(max_h) + kRtWindows * kRtWindowS;
  const int64_t t_lo = field.start_s + lead_margin;
  const int64_t t_hi = field.end_s() - params.end_margin_s;
  if (t_hi <= t_lo) throw InvalidParams("speed field too short for sampling margins");
  const int64_t split_time =
      t_hi - static_cast<int64_t>(params.test_fraction * static_cast<double>(t_hi - t_lo));

  SampledSplits out;
  out.split_time_s = split_time;
  Rng rng(derive_seed(seed, "sampling"));
  for (int h : params.horizons) {
    for (int32_t i = 0; i < params.count; ++i) {
      const auto& g = graphs[static_cast<size_t>(
          rng.uniform_int(static_cast<int64_t>(graphs.size())))];
      bool to_test = rng.uniform() < params.test_fraction;
      int64_t lo = to_test ? split_time : t_lo;
      int64_t hi = to_test ? t_hi : split_time;
      int64_t t = lo + rng.uniform_int(hi - lo);
      auto ex = make_example(field, net, g, t, h, fopts);
      (to_test ? out.test : out.train).examples.push_back(std::move(ex));
    }
  }
  return out;
}

}  // namespace roadeta
