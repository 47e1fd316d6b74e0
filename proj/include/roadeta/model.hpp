#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "roadeta/checkpoint.hpp"
#include "roadeta/dataset.hpp"
#include "roadeta/tape.hpp"

namespace roadeta {

// Embedding vocabulary with hash-bucketed out-of-vocabulary rows. Lookups
// are stable across runs: in-vocab ids map to their row, everything else to
// ids.size() + fnv1a64(id) % oov_buckets.
struct Vocab {
  std::vector<std::string> ids;  // descending frequency
  std::unordered_map<std::string, int32_t> index;
  int32_t oov_buckets = 0;
  double build_coverage = 1.0;  // occurrence coverage measured when built

  int32_t rows() const { return static_cast<int32_t>(ids.size()) + oov_buckets; }
  bool contains(const std::string& id) const { return index.count(id) > 0; }
  int32_t lookup(const std::string& id) const;
  // fraction of occurrences that resolve in-vocab
  double coverage(const std::vector<std::pair<std::string, int64_t>>& counts) const;
};

// Keeps the most frequent ids until cumulative occurrence coverage reaches
// `target_coverage` (ties broken lexicographically for determinism).
Vocab build_vocab(std::vector<std::pair<std::string, int64_t>> counts, double target_coverage,
                  int32_t oov_buckets);

std::vector<std::pair<std::string, int64_t>> count_segment_ids(const Dataset& ds);
std::vector<std::pair<std::string, int64_t>> count_supersegment_ids(const Dataset& ds);

void save_vocab(const std::string& path, const Vocab& v);
Vocab load_vocab(const std::string& path);

// Per-channel z-score statistics from the training split, persisted with the
// model bundle.
struct NormStats {
  std::vector<double> node_mean, node_std;
  std::vector<double> global_mean, global_std;
};
NormStats compute_norm_stats(const Dataset& train);
void save_norm_stats(const std::string& path, const NormStats& s);
NormStats load_norm_stats(const std::string& path);

enum class ModelKind { GraphNet, DeepSets };
const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

struct ModelConfig {
  ModelKind kind = ModelKind::GraphNet;
  int horizon_s = 0;
  int latent = 64;
  int hidden = 64;
  int node_feature_dim = kNodeBaseDims;
  int edge_feature_dim = 1;
  int global_feature_dim = kGlobalDims;
  bool use_segment_embeddings = true;
  bool use_supersegment_embeddings = true;
  int segment_embedding_dim = 16;
  int supersegment_embedding_dim = 64;
  int segment_oov_buckets = 200;
  int supersegment_oov_buckets = 20;
  // aggregation kinds; more than one concatenates
  std::vector<ad::Reduce> agg_edge_to_node{ad::Reduce::Sum};
  std::vector<ad::Reduce> agg_edge_to_global{ad::Reduce::Sum};
  std::vector<ad::Reduce> agg_node_to_global{ad::Reduce::Sum};

  int node_input_dim() const {
    return node_feature_dim + (use_segment_embeddings ? segment_embedding_dim : 0);
  }
  int global_input_dim() const {
    return global_feature_dim + (use_supersegment_embeddings ? supersegment_embedding_dim : 0);
  }
};

void to_json_file(const std::string& path, const ModelConfig& cfg);
ModelConfig model_config_from_json_file(const std::string& path);

// uniform fan-in init for MLP weights, zero biases, small uniform embeddings
ad::ParamSet init_params(const ModelConfig& cfg, const Vocab& seg_vocab, const Vocab& ss_vocab,
                         uint64_t seed);

// A batch of examples flattened into one block-diagonal graph.
struct GraphBatch {
  int64_t num_graphs = 0, num_nodes = 0, num_edges = 0, num_route_nodes = 0;
  ad::Array node_feat, edge_feat, global_feat;  // normalized
  std::vector<int64_t> edge_src, edge_dst;      // combined node indexing
  std::vector<int64_t> node_graph, edge_graph;  // graph id per node / edge
  std::vector<int64_t> node_offset;             // [num_graphs+1], contiguous node ranges
  std::vector<int64_t> seg_rows, ss_rows;       // embedding rows
  std::vector<int64_t> route_nodes;             // combined indices of on-route nodes
  std::vector<int64_t> route_graph;             // graph id per route node
  std::vector<double> y_ss, f_ss;               // [num_graphs]
  std::vector<double> y_seg, y_cum, f_seg, f_cum;  // [num_route_nodes]
};

GraphBatch build_batch(const Dataset& ds, const std::vector<size_t>& indices,
                       const ModelConfig& cfg, const Vocab& seg_vocab, const Vocab& ss_vocab,
                       const NormStats& norm);

using LeafMap = std::map<std::string, ad::Tape::NodeId>;
LeafMap register_params(ad::Tape& tape, const ad::ParamSet& params);

struct ForwardOut {
  ad::Tape::NodeId pred_ss;     // [B,1] seconds
  ad::Tape::NodeId pred_seg;    // [R,1] on-route nodes, traversal order
  ad::Tape::NodeId pred_cum;    // [R,1]
  ad::Tape::NodeId node_latent; // [N,latent] processor (or node-MLP) output
};

// encode -> process x2 (shared parameters) -> decode. Heads emit free-flow
// relative outputs: yhat = f * (1 + net_output).
ForwardOut gn_forward(ad::Tape& tape, const LeafMap& leaves, const GraphBatch& batch,
                      const ModelConfig& cfg);
// node latents after encode + 2x process only (for unsupervised objectives);
// feature_perm, when given, permutes node feature rows (DGI corruption)
ad::Tape::NodeId gn_encode_process(ad::Tape& tape, const LeafMap& leaves, const GraphBatch& batch,
                                   const ModelConfig& cfg,
                                   const std::vector<int64_t>* feature_perm = nullptr);

// bag-of-segments baseline: per-node MLP, sum pool, graph MLP; edges unused
ForwardOut deepsets_forward(ad::Tape& tape, const LeafMap& leaves, const GraphBatch& batch,
                            const ModelConfig& cfg);

ForwardOut model_forward(ad::Tape& tape, const LeafMap& leaves, const GraphBatch& batch,
                         const ModelConfig& cfg);

struct Predictions {
  double y_ss = 0.0;
  std::vector<double> y_seg, y_cum;
};

// Everything needed to serve one horizon.
struct Model {
  ModelConfig config;
  ad::ParamSet params;
  Vocab seg_vocab, ss_vocab;
  NormStats norm;
};

std::vector<Predictions> predict(const Model& model, const Dataset& ds,
                                 const std::vector<size_t>& indices);
Predictions predict_one(const Model& model, const TraversalExample& ex);

// Bundle directory: params.bin, params_ema.bin, vocab_segment.txt,
// vocab_supersegment.txt, norm.json, config.json.
void save_bundle(const std::string& dir, const Model& model, const ad::ParamSet& ema_params);
Model load_bundle(const std::string& dir, bool use_ema = true);

}  // namespace roadeta
