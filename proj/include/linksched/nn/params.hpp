#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linksched/nn/tensor.hpp"

namespace linksched::nn {

/// Named parameter tensors in declaration order. The flat view concatenates
/// every tensor's row-major data in that order.
class ParamSet {
 public:
  Matrix& add(std::string name, std::size_t rows, std::size_t cols);

  bool contains(std::string_view name) const;
  Matrix& operator[](std::string_view name);
  const Matrix& operator[](std::string_view name) const;

  std::size_t count() const noexcept { return entries_.size(); }
  const std::string& name(std::size_t i) const { return entries_.at(i).first; }
  Matrix& tensor(std::size_t i) { return entries_.at(i).second; }
  const Matrix& tensor(std::size_t i) const { return entries_.at(i).second; }

  std::size_t flat_size() const;
  std::vector<double> flatten() const;
  // Throws ShapeError when the length disagrees with flat_size().
  void unflatten(std::span<const double> flat);

  // Same layout, all zeros.
  ParamSet zeros_like() const;
  bool same_layout(const ParamSet& other) const;

  bool operator==(const ParamSet&) const = default;

 private:
  std::vector<std::pair<std::string, Matrix>> entries_;
};

}  // namespace linksched::nn
