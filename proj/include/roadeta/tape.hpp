#pragma once

#include <functional>
#include <string>
#include <vector>

#include "roadeta/array.hpp"

namespace roadeta::ad {

enum class Reduce { Sum, Mean, Min, Max, SqrtN };

const char* reduce_name(Reduce k);
Reduce reduce_from_name(const std::string& name);

// Reverse-mode tape over dense arrays. One tape per forward/backward pass;
// not shared across threads. Reductions and scatter-adds accumulate in
// ascending index order, which makes training bitwise reproducible.
class Tape {
 public:
  using NodeId = int32_t;

  // leaf holding a value; gradients accumulate here like everywhere else
  NodeId input(Array v);

  // [n,k] x [k,m] -> [n,m]
  NodeId matmul(NodeId a, NodeId b);
  // same shape, or [n,m] + [m] broadcast over rows
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  // elementwise, same shape
  NodeId mul(NodeId a, NodeId b);
  NodeId scale(NodeId a, double c);
  NodeId add_scalar(NodeId a, double c);
  NodeId relu(NodeId a);
  NodeId sigmoid(NodeId a);
  // log(1 + e^x), numerically stable
  NodeId softplus(NodeId a);
  // concat along columns; inputs must agree on rows
  NodeId concat_cols(const std::vector<NodeId>& parts);
  // columns [c0, c1)
  NodeId slice_cols(NodeId a, int64_t c0, int64_t c1);
  // out[r, :] = table[ids[r], :]; adjoint scatter-adds into table rows
  NodeId gather_rows(NodeId table, std::vector<int64_t> ids);
  // group rows of values by group id into [n_groups, cols]. Empty groups
  // yield zeros for every kind (and zero gradient for Min/Max). Min/Max
  // route the subgradient to the first extremal row by index.
  NodeId segment_reduce(NodeId values, std::vector<int64_t> groups, int64_t n_groups, Reduce kind);
  // rowwise dot: [n,m] . [n,m] -> [n,1]
  NodeId row_dot(NodeId a, NodeId b);
  // sum of all elements -> scalar
  NodeId sum(NodeId a);
  NodeId mean(NodeId a);
  // sum_i w[i] * a[i] with constant weights -> scalar
  NodeId dot_const(NodeId a, Array w);
  // elementwise Huber against constant targets; same shape as pred
  NodeId huber_vs_const(NodeId pred, Array target, double delta);

  void backward(NodeId loss);

  const Array& value(NodeId id) const { return values_[static_cast<size_t>(id)]; }
  const Array& grad(NodeId id) const { return grads_[static_cast<size_t>(id)]; }
  size_t num_nodes() const { return values_.size(); }

 private:
  struct Node {
    std::function<void(Tape&, NodeId)> backward;  // may be empty (leaf)
  };

  NodeId emplace(Array value, std::function<void(Tape&, NodeId)> bw);
  Array& grad_mut(NodeId id) { return grads_[static_cast<size_t>(id)]; }

  std::vector<Array> values_;
  std::vector<Array> grads_;
  std::vector<Node> nodes_;
};

}  // namespace roadeta::ad
