#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "synlstm/tensor.hpp"

namespace synlstm {

// Ordered collection of named learnable tensors.
class ParamStore {
 public:
  // Registers a zero-initialised parameter. Names must be unique.
  ad::Tensor& add(const std::string& name, ad::Shape shape);
  // Uniform Glorot initialisation: limit sqrt(6 / (fan_in + fan_out)) with
  // fan_out = rows and fan_in = cols.
  ad::Tensor& add_glorot(const std::string& name, std::size_t rows, std::size_t cols,
                         std::mt19937_64& rng);

  const ad::Tensor& get(const std::string& name) const;
  ad::Tensor& get(const std::string& name);
  bool contains(const std::string& name) const;

  std::vector<std::pair<std::string, ad::Tensor>>& entries() { return entries_; }
  const std::vector<std::pair<std::string, ad::Tensor>>& entries() const { return entries_; }
  std::size_t total_size() const;

  void clear_grads();

 private:
  std::vector<std::pair<std::string, ad::Tensor>> entries_;
};

}  // namespace synlstm
