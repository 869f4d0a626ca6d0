#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace synlstm::ad {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

namespace detail {
struct Storage {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until populated
  bool requires_grad = false;
  std::uint64_t tape_id = 0;  // id of the tape that produced this value; 0 for leaves
};
}  // namespace detail

// Dense row-major array of doubles with an optional gradient accumulator.
//
// Tensor is a shared handle: copies alias the same storage. Use clone() for a
// detached deep copy. Rank 0, 1 and 2 are supported; a rank-1 tensor of length
// n is viewed as a 1 x n row where an operation needs rows and columns.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false);

  bool defined() const noexcept { return static_cast<bool>(s_); }

  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const { return s_->data.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const { return s_->data; }
  std::span<double> data_mut() const { return s_->data; }
  double item() const;
  double at(std::size_t r, std::size_t c) const { return s_->data[r * cols() + c]; }
  double operator[](std::size_t i) const { return s_->data[i]; }

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool on) const { s_->requires_grad = on; }

  bool has_grad() const { return !s_->grad.empty() || s_->data.empty(); }
  std::span<const double> grad() const { return s_->grad; }
  // Allocates a zero gradient if none is present.
  std::span<double> grad_mut() const;
  void zero_grad() const;
  void clear_grad() const { s_->grad.clear(); }

  Tensor clone() const;
  bool same_storage(const Tensor& other) const noexcept { return s_ == other.s_; }

  detail::Storage& storage() const { return *s_; }

 private:
  std::shared_ptr<detail::Storage> s_;
};

}  // namespace synlstm::ad
