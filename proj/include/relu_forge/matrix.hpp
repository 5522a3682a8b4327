#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "relu_forge/errors.hpp"

namespace relu_forge {

// Dense row-major matrix of doubles. Networks here are small and explicit,
// so a plain vector with an index map beats pulling in a linear-algebra
// dependency.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols, row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows = init.size();
    cols = rows ? init.begin()->size() : 0;
    data.reserve(rows * cols);
    for (const auto& row : init) {
      if (row.size() != cols) throw shape_error("Matrix: ragged initializer");
      data.insert(data.end(), row.begin(), row.end());
    }
  }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  // this * other
  Matrix mul(const Matrix& other) const {
    if (cols != other.rows) throw shape_error("Matrix::mul: inner dimensions differ");
    Matrix out(rows, other.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < other.cols; ++j) out(i, j) += a * other(k, j);
      }
    return out;
  }

  std::vector<double> mul(const std::vector<double>& v) const {
    if (cols != v.size()) throw shape_error("Matrix::mul: vector length differs from cols");
    std::vector<double> out(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      double acc = 0.0;
      const double* row = data.data() + i * cols;
      for (std::size_t j = 0; j < cols; ++j) acc += row[j] * v[j];
      out[i] = acc;
    }
    return out;
  }
};

}  // namespace relu_forge
