#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sentinel {

/// Dense row-major matrix of doubles; one sample per row.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  void push_row(std::span<const double> values)
  {
    if (rows == 0 && cols == 0) {
      cols = values.size();
    }
    data.insert(data.end(), values.begin(), values.end());
    ++rows;
  }
};

} // namespace sentinel
