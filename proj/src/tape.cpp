#include "roadeta/tape.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

namespace roadeta::ad {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<EMat>;
using MapC = Eigen::Map<const EMat>;

const char* reduce_name(Reduce k) {
  switch (k) {
    case Reduce::Sum: return "sum";
    case Reduce::Mean: return "mean";
    case Reduce::Min: return "min";
    case Reduce::Max: return "max";
    case Reduce::SqrtN: return "sqrtn";
  }
  return "?";
}

Reduce reduce_from_name(const std::string& name) {
  if (name == "sum") return Reduce::Sum;
  if (name == "mean") return Reduce::Mean;
  if (name == "min") return Reduce::Min;
  if (name == "max") return Reduce::Max;
  if (name == "sqrtn") return Reduce::SqrtN;
  throw ConfigError("unknown aggregator: " + name);
}

Tape::NodeId Tape::emplace(Array value, std::function<void(Tape&, NodeId)> bw) {
  auto id = static_cast<NodeId>(values_.size());
  grads_.push_back(Array::zeros(value.shape));
  values_.push_back(std::move(value));
  nodes_.push_back(Node{std::move(bw)});
  return id;
}

Tape::NodeId Tape::input(Array v) { return emplace(std::move(v), nullptr); }

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  const Array& A = value(a);
  const Array& B = value(b);
  if (A.rank() != 2 || B.rank() != 2 || A.shape[1] != B.shape[0])
    throw ShapeMismatch("matmul shape mismatch");
  Array out = Array::zeros({A.shape[0], B.shape[1]});
  if (A.shape[0] > 0 && B.shape[1] > 0) {
    MapM(out.data.data(), out.shape[0], out.shape[1]).noalias() =
        MapC(A.data.data(), A.shape[0], A.shape[1]) * MapC(B.data.data(), B.shape[0], B.shape[1]);
  }
  return emplace(std::move(out), [a, b](Tape& t, NodeId self) {
    const Array& A = t.value(a);
    const Array& B = t.value(b);
    const Array& G = t.grad(self);
    if (A.shape[0] == 0 || B.shape[1] == 0) return;
    MapC g(G.data.data(), G.shape[0], G.shape[1]);
    MapM(t.grad_mut(a).data.data(), A.shape[0], A.shape[1]).noalias() +=
        g * MapC(B.data.data(), B.shape[0], B.shape[1]).transpose();
    MapM(t.grad_mut(b).data.data(), B.shape[0], B.shape[1]).noalias() +=
        MapC(A.data.data(), A.shape[0], A.shape[1]).transpose() * g;
  });
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  const Array& A = value(a);
  const Array& B = value(b);
  if (A.same_shape(B)) {
    Array out = A;
    for (int64_t i = 0; i < out.size(); ++i) out[i] += B[i];
    return emplace(std::move(out), [a, b](Tape& t, NodeId self) {
      const Array& G = t.grad(self);
      Array& ga = t.grad_mut(a);
      Array& gb = t.grad_mut(b);
      for (int64_t i = 0; i < G.size(); ++i) {
        ga[i] += G[i];
        gb[i] += G[i];
      }
    });
  }
  // row broadcast: [n,m] + [m]
  if (A.rank() == 2 && B.rank() == 1 && A.shape[1] == B.shape[0]) {
    Array out = A;
    int64_t n = A.shape[0], m = A.shape[1];
    for (int64_t r = 0; r < n; ++r)
      for (int64_t c = 0; c < m; ++c) out[r * m + c] += B[c];
    return emplace(std::move(out), [a, b, n, m](Tape& t, NodeId self) {
      const Array& G = t.grad(self);
      Array& ga = t.grad_mut(a);
      Array& gb = t.grad_mut(b);
      for (int64_t r = 0; r < n; ++r)
        for (int64_t c = 0; c < m; ++c) {
          ga[r * m + c] += G[r * m + c];
          gb[c] += G[r * m + c];
        }
    });
  }
  throw ShapeMismatch("add shape mismatch");
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) { return add(a, scale(b, -1.0)); }

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  const Array& A = value(a);
  const Array& B = value(b);
  if (!A.same_shape(B)) throw ShapeMismatch("mul shape mismatch");
  Array out = A;
  for (int64_t i = 0; i < out.size(); ++i) out[i] *= B[i];
  return emplace(std::move(out), [a, b](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    const Array& A = t.value(a);
    const Array& B = t.value(b);
    Array& ga = t.grad_mut(a);
    Array& gb = t.grad_mut(b);
    for (int64_t i = 0; i < G.size(); ++i) {
      ga[i] += G[i] * B[i];
      gb[i] += G[i] * A[i];
    }
  });
}

Tape::NodeId Tape::scale(NodeId a, double c) {
  Array out = value(a);
  for (auto& x : out.data) x *= c;
  return emplace(std::move(out), [a, c](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    Array& ga = t.grad_mut(a);
    for (int64_t i = 0; i < G.size(); ++i) ga[i] += c * G[i];
  });
}

Tape::NodeId Tape::add_scalar(NodeId a, double c) {
  Array out = value(a);
  for (auto& x : out.data) x += c;
  return emplace(std::move(out), [a](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    Array& ga = t.grad_mut(a);
    for (int64_t i = 0; i < G.size(); ++i) ga[i] += G[i];
  });
}

Tape::NodeId Tape::relu(NodeId a) {
  Array out = value(a);
  for (auto& x : out.data) x = x > 0.0 ? x : 0.0;
  return emplace(std::move(out), [a](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    const Array& A = t.value(a);
    Array& ga = t.grad_mut(a);
    // subgradient at exactly 0 is 0
    for (int64_t i = 0; i < G.size(); ++i)
      if (A[i] > 0.0) ga[i] += G[i];
  });
}

Tape::NodeId Tape::sigmoid(NodeId a) {
  Array out = value(a);
  for (auto& x : out.data) {
    if (x >= 0.0) {
      x = 1.0 / (1.0 + std::exp(-x));
    } else {
      double e = std::exp(x);
      x = e / (1.0 + e);
    }
  }
  return emplace(std::move(out), [a](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    const Array& Y = t.value(self);
    Array& ga = t.grad_mut(a);
    for (int64_t i = 0; i < G.size(); ++i) ga[i] += G[i] * Y[i] * (1.0 - Y[i]);
  });
}

Tape::NodeId Tape::softplus(NodeId a) {
  Array out = value(a);
  for (auto& x : out.data) x = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return emplace(std::move(out), [a](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    const Array& A = t.value(a);
    Array& ga = t.grad_mut(a);
    for (int64_t i = 0; i < G.size(); ++i) {
      double x = A[i];
      double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
      ga[i] += G[i] * s;
    }
  });
}

Tape::NodeId Tape::concat_cols(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw ShapeMismatch("concat of nothing");
  int64_t n = value(parts[0]).rows();
  int64_t m = 0;
  for (auto p : parts) {
    if (value(p).rank() != 2 || value(p).shape[0] != n)
      throw ShapeMismatch("concat_cols row mismatch");
    m += value(p).shape[1];
  }
  Array out = Array::zeros({n, m});
  int64_t off = 0;
  for (auto p : parts) {
    const Array& P = value(p);
    int64_t w = P.shape[1];
    for (int64_t r = 0; r < n; ++r)
      std::copy_n(P.data.begin() + r * w, w, out.data.begin() + r * m + off);
    off += w;
  }
  auto parts_copy = parts;
  return emplace(std::move(out), [parts_copy, n, m](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    int64_t off = 0;
    for (auto p : parts_copy) {
      Array& gp = t.grad_mut(p);
      int64_t w = t.value(p).shape[1];
      for (int64_t r = 0; r < n; ++r)
        for (int64_t c = 0; c < w; ++c) gp[r * w + c] += G[r * m + off + c];
      off += w;
    }
  });
}

Tape::NodeId Tape::slice_cols(NodeId a, int64_t c0, int64_t c1) {
  const Array& A = value(a);
  if (A.rank() != 2 || c0 < 0 || c1 > A.shape[1] || c0 > c1)
    throw IndexOutOfRange("slice_cols out of range");
  int64_t n = A.shape[0], m = A.shape[1], w = c1 - c0;
  Array out = Array::zeros({n, w});
  for (int64_t r = 0; r < n; ++r)
    std::copy_n(A.data.begin() + r * m + c0, w, out.data.begin() + r * w);
  return emplace(std::move(out), [a, c0, n, m, w](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    Array& ga = t.grad_mut(a);
    for (int64_t r = 0; r < n; ++r)
      for (int64_t c = 0; c < w; ++c) ga[r * m + c0 + c] += G[r * w + c];
  });
}

Tape::NodeId Tape::gather_rows(NodeId table, std::vector<int64_t> ids) {
  const Array& T = value(table);
  if (T.rank() != 2) throw ShapeMismatch("gather_rows expects rank-2 table");
  int64_t m = T.shape[1];
  for (auto id : ids)
    if (id < 0 || id >= T.shape[0]) throw IndexOutOfRange("gather_rows id out of range");
  Array out = Array::zeros({static_cast<int64_t>(ids.size()), m});
  for (size_t r = 0; r < ids.size(); ++r)
    std::copy_n(T.data.begin() + ids[r] * m, m, out.data.begin() + static_cast<int64_t>(r) * m);
  return emplace(std::move(out), [table, ids = std::move(ids), m](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    Array& gt = t.grad_mut(table);
    for (size_t r = 0; r < ids.size(); ++r)
      for (int64_t c = 0; c < m; ++c) gt[ids[r] * m + c] += G[static_cast<int64_t>(r) * m + c];
  });
}

Tape::NodeId Tape::segment_reduce(NodeId values, std::vector<int64_t> groups, int64_t n_groups,
                                  Reduce kind) {
  const Array& V = value(values);
  if (V.rank() != 2) throw ShapeMismatch("segment_reduce expects rank-2 values");
  int64_t n = V.shape[0], m = V.shape[1];
  if (static_cast<int64_t>(groups.size()) != n)
    throw ShapeMismatch("segment_reduce group ids length mismatch");
  for (auto g : groups)
    if (g < 0 || g >= n_groups) throw IndexOutOfRange("segment_reduce group id out of range");

  std::vector<int64_t> count(static_cast<size_t>(n_groups), 0);
  for (auto g : groups) ++count[static_cast<size_t>(g)];

  Array out = Array::zeros({n_groups, m});
  // first extremal row index per (group, col); -1 for untouched
  std::vector<int64_t> arg;
  if (kind == Reduce::Min || kind == Reduce::Max)
    arg.assign(static_cast<size_t>(n_groups * m), -1);

  switch (kind) {
    case Reduce::Sum:
    case Reduce::Mean:
    case Reduce::SqrtN:
      for (int64_t r = 0; r < n; ++r) {
        int64_t g = groups[static_cast<size_t>(r)];
        for (int64_t c = 0; c < m; ++c) out[g * m + c] += V[r * m + c];
      }
      if (kind != Reduce::Sum) {
        for (int64_t g = 0; g < n_groups; ++g) {
          int64_t cnt = count[static_cast<size_t>(g)];
          if (cnt == 0) continue;
          double denom = kind == Reduce::Mean ? static_cast<double>(cnt)
                                              : std::sqrt(static_cast<double>(cnt));
          for (int64_t c = 0; c < m; ++c) out[g * m + c] /= denom;
        }
      }
      break;
    case Reduce::Min:
    case Reduce::Max:
      for (int64_t r = 0; r < n; ++r) {
        int64_t g = groups[static_cast<size_t>(r)];
        for (int64_t c = 0; c < m; ++c) {
          double x = V[r * m + c];
          int64_t slot = g * m + c;
          bool better = arg[static_cast<size_t>(slot)] < 0 ||
                        (kind == Reduce::Min ? x < out[slot] : x > out[slot]);
          if (better) {
            out[slot] = x;
            arg[static_cast<size_t>(slot)] = r;
          }
        }
      }
      break;
  }

  return emplace(std::move(out), [values, groups = std::move(groups), count = std::move(count),
                                  arg = std::move(arg), n, m, kind](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    Array& gv = t.grad_mut(values);
    switch (kind) {
      case Reduce::Sum:
        for (int64_t r = 0; r < n; ++r) {
          int64_t g = groups[static_cast<size_t>(r)];
          for (int64_t c = 0; c < m; ++c) gv[r * m + c] += G[g * m + c];
        }
        break;
      case Reduce::Mean:
      case Reduce::SqrtN:
        for (int64_t r = 0; r < n; ++r) {
          int64_t g = groups[static_cast<size_t>(r)];
          double cnt = static_cast<double>(count[static_cast<size_t>(g)]);
          double denom = kind == Reduce::Mean ? cnt : std::sqrt(cnt);
          for (int64_t c = 0; c < m; ++c) gv[r * m + c] += G[g * m + c] / denom;
        }
        break;
      case Reduce::Min:
      case Reduce::Max:
        for (size_t slot = 0; slot < arg.size(); ++slot) {
          int64_t r = arg[slot];
          if (r < 0) continue;
          int64_t c = static_cast<int64_t>(slot) % m;
          gv[r * m + c] += G[static_cast<int64_t>(slot)];
        }
        break;
    }
  });
}

Tape::NodeId Tape::row_dot(NodeId a, NodeId b) {
  const Array& A = value(a);
  const Array& B = value(b);
  if (A.rank() != 2 || !A.same_shape(B)) throw ShapeMismatch("row_dot shape mismatch");
  int64_t n = A.shape[0], m = A.shape[1];
  Array out = Array::zeros({n, 1});
  for (int64_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (int64_t c = 0; c < m; ++c) s += A[r * m + c] * B[r * m + c];
    out[r] = s;
  }
  return emplace(std::move(out), [a, b, n, m](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    const Array& A = t.value(a);
    const Array& B = t.value(b);
    Array& ga = t.grad_mut(a);
    Array& gb = t.grad_mut(b);
    for (int64_t r = 0; r < n; ++r)
      for (int64_t c = 0; c < m; ++c) {
        ga[r * m + c] += G[r] * B[r * m + c];
        gb[r * m + c] += G[r] * A[r * m + c];
      }
  });
}

Tape::NodeId Tape::sum(NodeId a) {
  const Array& A = value(a);
  double s = 0.0;
  for (int64_t i = 0; i < A.size(); ++i) s += A[i];
  return emplace(Array::scalar(s), [a](Tape& t, NodeId self) {
    double g = t.grad(self)[0];
    Array& ga = t.grad_mut(a);
    for (int64_t i = 0; i < ga.size(); ++i) ga[i] += g;
  });
}

Tape::NodeId Tape::mean(NodeId a) {
  int64_t n = value(a).size();
  return scale(sum(a), n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
}

Tape::NodeId Tape::dot_const(NodeId a, Array w) {
  const Array& A = value(a);
  if (A.size() != w.size()) throw ShapeMismatch("dot_const length mismatch");
  double s = 0.0;
  for (int64_t i = 0; i < A.size(); ++i) s += A[i] * w[i];
  return emplace(Array::scalar(s), [a, w = std::move(w)](Tape& t, NodeId self) {
    double g = t.grad(self)[0];
    Array& ga = t.grad_mut(a);
    for (int64_t i = 0; i < ga.size(); ++i) ga[i] += g * w[i];
  });
}

Tape::NodeId Tape::huber_vs_const(NodeId pred, Array target, double delta) {
  const Array& P = value(pred);
  if (P.size() != target.size()) throw ShapeMismatch("huber target length mismatch");
  Array out = P;
  for (int64_t i = 0; i < out.size(); ++i) {
    double d = target[i] - P[i];
    out[i] = std::abs(d) <= delta ? 0.5 * d * d : delta * (std::abs(d) - 0.5 * delta);
  }
  return emplace(std::move(out), [pred, target = std::move(target), delta](Tape& t, NodeId self) {
    const Array& G = t.grad(self);
    const Array& P = t.value(pred);
    Array& gp = t.grad_mut(pred);
    for (int64_t i = 0; i < G.size(); ++i) {
      double d = target[i] - P[i];
      gp[i] += G[i] * -std::clamp(d, -delta, delta);
    }
  });
}

void Tape::backward(NodeId loss) {
  if (value(loss).size() != 1) throw NonScalarLoss("backward target must be scalar");
  for (auto& g : grads_) std::fill(g.data.begin(), g.data.end(), 0.0);
  grad_mut(loss)[0] = 1.0;
  for (auto id = static_cast<int64_t>(nodes_.size()) - 1; id >= 0; --id) {
    auto& node = nodes_[static_cast<size_t>(id)];
    if (node.backward) node.backward(*this, static_cast<NodeId>(id));
  }
}

}  // namespace roadeta::ad
