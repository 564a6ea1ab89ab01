#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace roomforge::nn {

// dense row-major matrix; vectors are 1xN or Nx1 as context demands
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }
  static Tensor filled(int r, int c, double value) {
    Tensor t(r, c);
    for (double& x : t.v) x = value;
    return t;
  }

  [[nodiscard]] size_t size() const { return v.size(); }
  [[nodiscard]] bool same_shape(const Tensor& o) const {
    return rows == o.rows && cols == o.cols;
  }

  double& at(int r, int c) {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return v[static_cast<size_t>(r) * cols + c];
  }
  [[nodiscard]] double at(int r, int c) const {
    assert(r >= 0 && r < rows && c >= 0 && c < cols);
    return v[static_cast<size_t>(r) * cols + c];
  }
};

}  // namespace roomforge::nn
