#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ranklimits {

// Dense n-by-n storage shared by probability matrices, win counters and
// per-round observation grids. Row major; bounds are the caller's problem.
template <class T>
class SquareMatrix {
 public:
  SquareMatrix() = default;

  explicit SquareMatrix(int n, T fill = T{}) : n_(n) {
    if (n < 0) throw std::invalid_argument("SquareMatrix: negative size");
    cells_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill);
  }

  int size() const noexcept { return n_; }

  T& operator()(int i, int j) noexcept { return cells_[index(i, j)]; }
  const T& operator()(int i, int j) const noexcept { return cells_[index(i, j)]; }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<T> cells_;
};

}  // namespace ranklimits
