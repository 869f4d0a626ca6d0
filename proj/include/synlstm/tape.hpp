#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

#include "synlstm/tensor.hpp"

namespace synlstm::ad {

// Ordered record of executed primitives for one forward pass.
//
// Results that depend on at least one requires_grad input are recorded together
// with a closure that pushes the result's gradient into its inputs. backward()
// replays the records in reverse execution order, which is a reverse
// topological order of the computation graph. A tape supports one backward per
// reset(); tapes are single-threaded.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers `out` as computed from `inputs`. When no input requires a
  // gradient, nothing is recorded and `out` is returned as a constant.
  Tensor record(Tensor out, std::initializer_list<Tensor> inputs, BackwardFn fn);
  Tensor record(Tensor out, std::vector<Tensor> inputs, BackwardFn fn);

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
  // requires_grad ancestor. Leaf gradients accumulate across tapes until
  // cleared; intermediate gradients start at zero.
  void backward(const Tensor& loss);

  // Drops all records and re-arms backward().
  void reset();

  std::size_t size() const noexcept { return nodes_.size(); }
  bool backward_done() const noexcept { return done_; }
  std::uint64_t id() const noexcept { return id_; }

 private:
  struct Node {
    Tensor out;
    std::vector<Tensor> inputs;
    BackwardFn fn;
  };
  std::vector<Node> nodes_;
  std::uint64_t id_;
  bool done_ = false;
};

}  // namespace synlstm::ad
