#include "linksched/nn/params.hpp"

#include <algorithm>

#include "linksched/errors.hpp"

namespace linksched::nn {

Matrix& ParamSet::add(std::string name, std::size_t rows, std::size_t cols) {
  if (contains(name)) throw ShapeError("ParamSet: duplicate tensor '" + name + "'");
  entries_.emplace_back(std::move(name), Matrix(rows, cols));
  return entries_.back().second;
}

bool ParamSet::contains(std::string_view name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == name; });
}

Matrix& ParamSet::operator[](std::string_view name) {
  for (auto& e : entries_)
    if (e.first == name) return e.second;
  throw ShapeError("ParamSet: no tensor named '" + std::string(name) + "'");
}

const Matrix& ParamSet::operator[](std::string_view name) const {
  return const_cast<ParamSet&>(*this)[name];
}

std::size_t ParamSet::flat_size() const {
  std::size_t total = 0;
  for (const auto& e : entries_) total += e.second.size();
  return total;
}

std::vector<double> ParamSet::flatten() const {
  std::vector<double> flat;
  flat.reserve(flat_size());
  for (const auto& e : entries_) flat.insert(flat.end(), e.second.data().begin(), e.second.data().end());
  return flat;
}

void ParamSet::unflatten(std::span<const double> flat) {
  if (flat.size() != flat_size())
    throw ShapeError("ParamSet::unflatten: expected " + std::to_string(flat_size()) +
                     " values, got " + std::to_string(flat.size()));
  std::size_t offset = 0;
  for (auto& e : entries_) {
    auto dst = e.second.data();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), dst.size(), dst.begin());
    offset += dst.size();
  }
}

ParamSet ParamSet::zeros_like() const {
  ParamSet z;
  for (const auto& e : entries_) z.add(e.first, e.second.rows(), e.second.cols());
  return z;
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (count() != other.count()) return false;
  for (std::size_t i = 0; i < count(); ++i)
    if (name(i) != other.name(i) || tensor(i).rows() != other.tensor(i).rows() ||
        tensor(i).cols() != other.tensor(i).cols())
      return false;
  return true;
}

}  // namespace linksched::nn
