#include "roomforge/nn/tape.hpp"

#include <cmath>
#include <memory>
#include <utility>

#include "roomforge/errors.hpp"

namespace roomforge::nn {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

void require(bool ok, const char* what) {
  if (!ok) throw Error(std::string("tape: ") + what);
}

}  // namespace

Tape::Id Tape::push(Tensor value, std::function<void()> back) {
  Node n;
  n.grad = Tensor::zeros(value.rows, value.cols);
  n.value = std::move(value);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size()) - 1;
}

Tape::Id Tape::input(Tensor value) { return push(std::move(value)); }

Tape::Id Tape::param(int index) {
  require(store_ != nullptr, "param() without a bound ParamStore");
  auto it = param_nodes_.find(index);
  if (it != param_nodes_.end()) return it->second;
  Id id = push((*store_)[index].value);
  param_nodes_.emplace(index, id);
  bound_params_.emplace_back(index, id);
  return id;
}

void Tape::backward(Id loss) {
  require(loss >= 0 && loss < node_count(), "backward on unknown node");
  require(nodes_[loss].value.rows == 1 && nodes_[loss].value.cols == 1,
          "loss must be a scalar");
  for (auto& n : nodes_) std::fill(n.grad.v.begin(), n.grad.v.end(), 0.0);
  nodes_[loss].grad.v[0] = 1.0;
  for (Id id = loss; id >= 0; --id)
    if (nodes_[id].back) nodes_[id].back();
  for (auto [index, node] : bound_params_) {
    auto& pg = (*store_)[index].grad;
    const auto& ng = nodes_[node].grad;
    for (size_t k = 0; k < pg.v.size(); ++k) pg.v[k] += ng.v[k];
  }
}

Tape::Id Tape::matmul(Id a, Id b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  require(A.cols == B.rows, "matmul shape mismatch");
  Tensor out(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      double aik = A.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) out.at(i, j) += aik * B.at(k, j);
    }
  Id id = push(std::move(out), [this, a, b, id = node_count()] {
    const Tensor& G = g(id);
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    Tensor& ga = g(a);
    Tensor& gb = g(b);
    // dA = G * B^T, dB = A^T * G
    for (int i = 0; i < A.rows; ++i)
      for (int j = 0; j < B.cols; ++j) {
        double gij = G.at(i, j);
        if (gij == 0.0) continue;
        for (int k = 0; k < A.cols; ++k) {
          ga.at(i, k) += gij * B.at(k, j);
          gb.at(k, j) += gij * A.at(i, k);
        }
      }
  });
  return id;
}

Tape::Id Tape::add(Id a, Id b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  require(A.same_shape(B), "add shape mismatch");
  Tensor out = A;
  for (size_t k = 0; k < out.v.size(); ++k) out.v[k] += B.v[k];
  return push(std::move(out), [this, a, b, id = node_count()] {
    const Tensor& G = g(id);
    for (size_t k = 0; k < G.v.size(); ++k) {
      g(a).v[k] += G.v[k];
      g(b).v[k] += G.v[k];
    }
  });
}

Tape::Id Tape::sub(Id a, Id b) { return add_scaled(a, b, -1.0); }

Tape::Id Tape::add_scaled(Id a, Id b, double c) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  require(A.same_shape(B), "add_scaled shape mismatch");
  Tensor out = A;
  for (size_t k = 0; k < out.v.size(); ++k) out.v[k] += c * B.v[k];
  return push(std::move(out), [this, a, b, c, id = node_count()] {
    const Tensor& G = g(id);
    for (size_t k = 0; k < G.v.size(); ++k) {
      g(a).v[k] += G.v[k];
      g(b).v[k] += c * G.v[k];
    }
  });
}

Tape::Id Tape::add_rowvec(Id a, Id row) {
  const Tensor& A = val(a);
  const Tensor& R = val(row);
  require(R.rows == 1 && R.cols == A.cols, "add_rowvec needs a 1xC row");
  Tensor out = A;
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) out.at(i, j) += R.at(0, j);
  return push(std::move(out), [this, a, row, id = node_count()] {
    const Tensor& G = g(id);
    Tensor& ga = g(a);
    Tensor& gr = g(row);
    for (int i = 0; i < G.rows; ++i)
      for (int j = 0; j < G.cols; ++j) {
        ga.at(i, j) += G.at(i, j);
        gr.at(0, j) += G.at(i, j);
      }
  });
}

Tape::Id Tape::mul_rowvec(Id a, Id row) {
  const Tensor& A = val(a);
  const Tensor& R = val(row);
  require(R.rows == 1 && R.cols == A.cols, "mul_rowvec needs a 1xC row");
  Tensor out = A;
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) out.at(i, j) *= R.at(0, j);
  return push(std::move(out), [this, a, row, id = node_count()] {
    const Tensor& G = g(id);
    const Tensor& A = val(a);
    const Tensor& R = val(row);
    Tensor& ga = g(a);
    Tensor& gr = g(row);
    for (int i = 0; i < G.rows; ++i)
      for (int j = 0; j < G.cols; ++j) {
        ga.at(i, j) += G.at(i, j) * R.at(0, j);
        gr.at(0, j) += G.at(i, j) * A.at(i, j);
      }
  });
}

Tape::Id Tape::scale(Id a, double c) {
  Tensor out = val(a);
  for (double& x : out.v) x *= c;
  return push(std::move(out), [this, a, c, id = node_count()] {
    const Tensor& G = g(id);
    for (size_t k = 0; k < G.v.size(); ++k) g(a).v[k] += c * G.v[k];
  });
}

Tape::Id Tape::hadamard(Id a, Id b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  require(A.same_shape(B), "hadamard shape mismatch");
  Tensor out = A;
  for (size_t k = 0; k < out.v.size(); ++k) out.v[k] *= B.v[k];
  return push(std::move(out), [this, a, b, id = node_count()] {
    const Tensor& G = g(id);
    const Tensor& A = val(a);
    const Tensor& B = val(b);
    for (size_t k = 0; k < G.v.size(); ++k) {
      g(a).v[k] += G.v[k] * B.v[k];
      g(b).v[k] += G.v[k] * A.v[k];
    }
  });
}

Tape::Id Tape::gelu(Id a) {
  const Tensor& A = val(a);
  Tensor out = A;
  for (double& x : out.v) x = 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
  return push(std::move(out), [this, a, id = node_count()] {
    const Tensor& G = g(id);
    const Tensor& A = val(a);
    Tensor& ga = g(a);
    for (size_t k = 0; k < G.v.size(); ++k) {
      double x = A.v[k];
      double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
      double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      ga.v[k] += G.v[k] * (cdf + x * pdf);
    }
  });
}

Tape::Id Tape::softmax_rows(Id a) {
  const Tensor& A = val(a);
  Tensor out(A.rows, A.cols);
  for (int i = 0; i < A.rows; ++i) {
    double m = A.at(i, 0);
    for (int j = 1; j < A.cols; ++j) m = std::max(m, A.at(i, j));
    double z = 0.0;
    for (int j = 0; j < A.cols; ++j) z += std::exp(A.at(i, j) - m);
    for (int j = 0; j < A.cols; ++j) out.at(i, j) = std::exp(A.at(i, j) - m) / z;
  }
  return push(std::move(out), [this, a, id = node_count()] {
    const Tensor& G = g(id);
    const Tensor& Y = val(id);
    Tensor& ga = g(a);
    for (int i = 0; i < Y.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < Y.cols; ++j) dot += G.at(i, j) * Y.at(i, j);
      for (int j = 0; j < Y.cols; ++j)
        ga.at(i, j) += Y.at(i, j) * (G.at(i, j) - dot);
    }
  });
}

Tape::Id Tape::layer_norm(Id a, Id gamma, Id beta, double eps) {
  const Tensor& A = val(a);
  const Tensor& Gm = val(gamma);
  const Tensor& Bt = val(beta);
  require(Gm.rows == 1 && Gm.cols == A.cols, "layer_norm gamma must be 1xC");
  require(Bt.rows == 1 && Bt.cols == A.cols, "layer_norm beta must be 1xC");
  Tensor out(A.rows, A.cols);
  for (int i = 0; i < A.rows; ++i) {
    double mean = 0.0;
    for (int j = 0; j < A.cols; ++j) mean += A.at(i, j);
    mean /= A.cols;
    double var = 0.0;
    for (int j = 0; j < A.cols; ++j) {
      double d = A.at(i, j) - mean;
      var += d * d;
    }
    var /= A.cols;
    double inv = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < A.cols; ++j)
      out.at(i, j) = (A.at(i, j) - mean) * inv * Gm.at(0, j) + Bt.at(0, j);
  }
  return push(std::move(out), [this, a, gamma, beta, eps, id = node_count()] {
    const Tensor& G = g(id);
    const Tensor& A = val(a);
    const Tensor& Gm = val(gamma);
    Tensor& ga = g(a);
    Tensor& gg = g(gamma);
    Tensor& gb = g(beta);
    const int C = A.cols;
    for (int i = 0; i < A.rows; ++i) {
      double mean = 0.0;
      for (int j = 0; j < C; ++j) mean += A.at(i, j);
      mean /= C;
      double var = 0.0;
      for (int j = 0; j < C; ++j) {
        double d = A.at(i, j) - mean;
        var += d * d;
      }
      var /= C;
      double inv = 1.0 / std::sqrt(var + eps);
      // dxhat, then the two coupling sums of the normalization
      double sum_dxhat = 0.0;
      double sum_dxhat_xhat = 0.0;
      for (int j = 0; j < C; ++j) {
        double xhat = (A.at(i, j) - mean) * inv;
        double dxhat = G.at(i, j) * Gm.at(0, j);
        sum_dxhat += dxhat;
        sum_dxhat_xhat += dxhat * xhat;
        gg.at(0, j) += G.at(i, j) * xhat;
        gb.at(0, j) += G.at(i, j);
      }
      for (int j = 0; j < C; ++j) {
        double xhat = (A.at(i, j) - mean) * inv;
        double dxhat = G.at(i, j) * Gm.at(0, j);
        ga.at(i, j) += inv * (dxhat - sum_dxhat / C - xhat * sum_dxhat_xhat / C);
      }
    }
  });
}

Tape::Id Tape::gather_rows(Id table, std::vector<int> rows) {
  const Tensor& T = val(table);
  Tensor out(static_cast<int>(rows.size()), T.cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < T.rows, "gather_rows index out of range");
    for (int j = 0; j < T.cols; ++j)
      out.at(static_cast<int>(i), j) = T.at(rows[i], j);
  }
  return push(std::move(out),
              [this, table, rows = std::move(rows), id = node_count()] {
                const Tensor& G = g(id);
                Tensor& gt = g(table);
                for (size_t i = 0; i < rows.size(); ++i)
                  for (int j = 0; j < G.cols; ++j)
                    gt.at(rows[i], j) += G.at(static_cast<int>(i), j);
              });
}

Tape::Id Tape::slice_cols(Id a, int begin, int count) {
  const Tensor& A = val(a);
  require(begin >= 0 && count >= 0 && begin + count <= A.cols,
          "slice_cols out of range");
  Tensor out(A.rows, count);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < count; ++j) out.at(i, j) = A.at(i, begin + j);
  return push(std::move(out), [this, a, begin, count, id = node_count()] {
    const Tensor& G = g(id);
    Tensor& ga = g(a);
    for (int i = 0; i < G.rows; ++i)
      for (int j = 0; j < count; ++j) ga.at(i, begin + j) += G.at(i, j);
  });
}

Tape::Id Tape::concat_cols(const std::vector<Id>& parts) {
  require(!parts.empty(), "concat_cols needs at least one part");
  int rows = val(parts[0]).rows;
  int cols = 0;
  for (Id p : parts) {
    require(val(p).rows == rows, "concat_cols row mismatch");
    cols += val(p).cols;
  }
  Tensor out(rows, cols);
  int off = 0;
  for (Id p : parts) {
    const Tensor& P = val(p);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < P.cols; ++j) out.at(i, off + j) = P.at(i, j);
    off += P.cols;
  }
  return push(std::move(out), [this, parts, id = node_count()] {
    const Tensor& G = g(id);
    int off = 0;
    for (Id p : parts) {
      Tensor& gp = g(p);
      for (int i = 0; i < G.rows; ++i)
        for (int j = 0; j < gp.cols; ++j) gp.at(i, j) += G.at(i, off + j);
      off += gp.cols;
    }
  });
}

Tape::Id Tape::transpose(Id a) {
  const Tensor& A = val(a);
  Tensor out(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) out.at(j, i) = A.at(i, j);
  return push(std::move(out), [this, a, id = node_count()] {
    const Tensor& G = g(id);
    Tensor& ga = g(a);
    for (int i = 0; i < G.rows; ++i)
      for (int j = 0; j < G.cols; ++j) ga.at(j, i) += G.at(i, j);
  });
}

Tape::Id Tape::reshape(Id a, int rows, int cols) {
  const Tensor& A = val(a);
  require(static_cast<size_t>(rows) * cols == A.size(), "reshape size mismatch");
  Tensor out(rows, cols);
  out.v = A.v;
  return push(std::move(out), [this, a, id = node_count()] {
    const Tensor& G = g(id);
    Tensor& ga = g(a);
    for (size_t k = 0; k < G.v.size(); ++k) ga.v[k] += G.v[k];
  });
}

Tape::Id Tape::dropout(Id a, double rate) {
  if (rate <= 0.0) return a;
  require(rate < 1.0, "dropout rate must be below 1");
  require(rng_ != nullptr, "dropout needs a bound rng");
  const Tensor& A = val(a);
  auto mask = std::make_shared<std::vector<double>>(A.size());
  double keep = 1.0 - rate;
  for (auto& m : *mask) m = rng_->uniform01() < keep ? 1.0 / keep : 0.0;
  Tensor out = A;
  for (size_t k = 0; k < out.v.size(); ++k) out.v[k] *= (*mask)[k];
  return push(std::move(out), [this, a, mask, id = node_count()] {
    const Tensor& G = g(id);
    Tensor& ga = g(a);
    for (size_t k = 0; k < G.v.size(); ++k) ga.v[k] += G.v[k] * (*mask)[k];
  });
}

Tape::Id Tape::pair_attend(Id attn, Id edge_vals) {
  const Tensor& A = val(attn);
  const Tensor& E = val(edge_vals);
  const int n = A.rows;
  require(A.cols == n, "pair_attend needs a square attention matrix");
  require(E.rows == n * n, "pair_attend needs n*n pair values");
  Tensor out(n, E.cols);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double aij = A.at(i, j);
      if (aij == 0.0) continue;
      for (int k = 0; k < E.cols; ++k) out.at(i, k) += aij * E.at(i * n + j, k);
    }
  return push(std::move(out), [this, attn, edge_vals, n, id = node_count()] {
    const Tensor& G = g(id);
    const Tensor& A = val(attn);
    const Tensor& E = val(edge_vals);
    Tensor& ga = g(attn);
    Tensor& ge = g(edge_vals);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        double aij = A.at(i, j);
        for (int k = 0; k < E.cols; ++k) {
          double gik = G.at(i, k);
          acc += gik * E.at(i * n + j, k);
          ge.at(i * n + j, k) += aij * gik;
        }
        ga.at(i, j) += acc;
      }
  });
}

Tape::Id Tape::cross_entropy(Id logits, std::vector<int> targets,
                             std::vector<double> row_weights) {
  const Tensor& L = val(logits);
  require(static_cast<int>(targets.size()) == L.rows, "cross_entropy target count");
  require(static_cast<int>(row_weights.size()) == L.rows, "cross_entropy weight count");
  double total = 0.0;
  for (int i = 0; i < L.rows; ++i) {
    if (row_weights[i] == 0.0) continue;
    require(targets[i] >= 0 && targets[i] < L.cols, "cross_entropy target range");
    double m = L.at(i, 0);
    for (int j = 1; j < L.cols; ++j) m = std::max(m, L.at(i, j));
    double z = 0.0;
    for (int j = 0; j < L.cols; ++j) z += std::exp(L.at(i, j) - m);
    total += row_weights[i] * (std::log(z) + m - L.at(i, targets[i]));
  }
  Tensor out(1, 1);
  out.v[0] = total;
  return push(std::move(out), [this, logits, targets = std::move(targets),
                               row_weights = std::move(row_weights),
                               id = node_count()] {
    double go = g(id).v[0];
    if (go == 0.0) return;
    const Tensor& L = val(logits);
    Tensor& gl = g(logits);
    for (int i = 0; i < L.rows; ++i) {
      double w = row_weights[i];
      if (w == 0.0) continue;
      double m = L.at(i, 0);
      for (int j = 1; j < L.cols; ++j) m = std::max(m, L.at(i, j));
      double z = 0.0;
      for (int j = 0; j < L.cols; ++j) z += std::exp(L.at(i, j) - m);
      for (int j = 0; j < L.cols; ++j) {
        double p = std::exp(L.at(i, j) - m) / z;
        gl.at(i, j) += go * w * (p - (j == targets[i] ? 1.0 : 0.0));
      }
    }
  });
}

Tape::Id Tape::mse(Id pred, Tensor target, std::vector<double> row_weights) {
  const Tensor& P = val(pred);
  require(P.same_shape(target), "mse shape mismatch");
  require(static_cast<int>(row_weights.size()) == P.rows, "mse weight count");
  double total = 0.0;
  for (int i = 0; i < P.rows; ++i) {
    if (row_weights[i] == 0.0) continue;
    for (int j = 0; j < P.cols; ++j) {
      double d = P.at(i, j) - target.at(i, j);
      total += row_weights[i] * d * d;
    }
  }
  Tensor out(1, 1);
  out.v[0] = total;
  return push(std::move(out), [this, pred, target = std::move(target),
                               row_weights = std::move(row_weights),
                               id = node_count()] {
    double go = g(id).v[0];
    if (go == 0.0) return;
    const Tensor& P = val(pred);
    Tensor& gp = g(pred);
    for (int i = 0; i < P.rows; ++i) {
      double w = row_weights[i];
      if (w == 0.0) continue;
      for (int j = 0; j < P.cols; ++j)
        gp.at(i, j) += go * w * 2.0 * (P.at(i, j) - target.at(i, j));
    }
  });
}

}  // namespace roomforge::nn
