#pragma once

#include <cstddef>
#include <vector>

namespace mfnet {

/// Square symmetric matrix stored as its lower triangle (row-major), so that
/// (i, j) and (j, i) address the same element.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * (n + 1) / 2, fill) {}

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[index(i, j)]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[index(i, j)]; }

  /// Row i of the lower triangle: elements (i, 0..i).
  const double* row(std::size_t i) const noexcept { return data_.data() + i * (i + 1) / 2; }
  double* row(std::size_t i) noexcept { return data_.data() + i * (i + 1) / 2; }

  const std::vector<double>& packed() const noexcept { return data_; }
  std::vector<double>& packed() noexcept { return data_; }

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  static std::size_t index(std::size_t i, std::size_t j) noexcept {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace mfnet
