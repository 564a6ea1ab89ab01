#pragma once

#include <deque>
#include <functional>
#include <unordered_map>
#include <vector>

#include "roomforge/nn/params.hpp"
#include "roomforge/nn/tensor.hpp"
#include "roomforge/rng.hpp"

namespace roomforge::nn {

// Eager reverse-mode tape.  Ops compute values immediately and push a
// backward closure; backward() replays the closures in reverse creation
// order, which is a valid topological order.  One tape per training example
// keeps shapes exact without padding.
class Tape {
 public:
  using Id = int;

  explicit Tape(ParamStore* store = nullptr, Rng* rng = nullptr)
      : store_(store), rng_(rng) {}

  Id input(Tensor value);
  // leaf bound to a stored parameter; memoized so repeated use shares a node
  Id param(int index);

  [[nodiscard]] const Tensor& val(Id id) const { return nodes_[id].value; }
  [[nodiscard]] const Tensor& grad_of(Id id) const { return nodes_[id].grad; }
  [[nodiscard]] int node_count() const { return static_cast<int>(nodes_.size()); }

  // seeds d(loss)=1 and accumulates into ParamStore grads; loss must be 1x1
  void backward(Id loss);

  Id matmul(Id a, Id b);
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id add_scaled(Id a, Id b, double c);  // a + c*b
  Id add_rowvec(Id a, Id row);          // broadcast 1xC over rows
  Id mul_rowvec(Id a, Id row);
  Id scale(Id a, double c);
  Id hadamard(Id a, Id b);
  Id gelu(Id a);
  Id softmax_rows(Id a);
  Id layer_norm(Id a, Id gamma, Id beta, double eps = 1e-5);
  Id gather_rows(Id table, std::vector<int> rows);
  Id slice_cols(Id a, int begin, int count);
  Id concat_cols(const std::vector<Id>& parts);
  Id transpose(Id a);
  Id reshape(Id a, int rows, int cols);
  Id dropout(Id a, double rate);
  // out[i,:] = sum_j attn[i,j] * edge_vals[i*n+j,:]; attention over values
  // that differ per (query, key) pair instead of per key
  Id pair_attend(Id attn, Id edge_vals);

  // sum_i w[i] * (logsumexp(logits[i,:]) - logits[i, targets[i]]), 1x1
  Id cross_entropy(Id logits, std::vector<int> targets, std::vector<double> row_weights);
  // sum_i w[i] * sum_j (pred[i,j] - target[i,j])^2, 1x1
  Id mse(Id pred, Tensor target, std::vector<double> row_weights);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void()> back;  // empty for leaves
  };

  Id push(Tensor value, std::function<void()> back = {});
  Tensor& g(Id id) { return nodes_[id].grad; }

  std::deque<Node> nodes_;  // deque keeps val()/grad_of() references stable
  ParamStore* store_;
  Rng* rng_;
  std::unordered_map<int, Id> param_nodes_;
  std::vector<std::pair<int, Id>> bound_params_;  // (store index, node)
};

}  // namespace roomforge::nn
