#include "synlstm/params.hpp"

#include <cmath>

#include "synlstm/error.hpp"

namespace synlstm {

ad::Tensor& ParamStore::add(const std::string& name, ad::Shape shape) {
  if (contains(name)) throw ContractError("duplicate parameter '" + name + "'");
  entries_.emplace_back(name, ad::Tensor(std::move(shape), true));
  return entries_.back().second;
}

ad::Tensor& ParamStore::add_glorot(const std::string& name, std::size_t rows, std::size_t cols,
                                   std::mt19937_64& rng) {
  ad::Tensor& t = add(name, ad::Shape{rows, cols});
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : t.data_mut()) v = dist(rng);
  return t;
}

const ad::Tensor& ParamStore::get(const std::string& name) const {
  for (const auto& [n, t] : entries_) {
    if (n == name) return t;
  }
  throw ContractError("unknown parameter '" + name + "'");
}

ad::Tensor& ParamStore::get(const std::string& name) {
  return const_cast<ad::Tensor&>(static_cast<const ParamStore&>(*this).get(name));
}

bool ParamStore::contains(const std::string& name) const {
  for (const auto& [n, t] : entries_) {
    if (n == name) return true;
  }
  return false;
}

std::size_t ParamStore::total_size() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.size();
  return n;
}

void ParamStore::clear_grads() {
  for (auto& [name, t] : entries_) t.clear_grad();
}

}  // namespace synlstm
