#include "synlstm/tape.hpp"

#include <atomic>

#include "synlstm/error.hpp"

namespace synlstm::ad {
namespace {
std::uint64_t next_tape_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}
}  // namespace

Tape::Tape() : id_(next_tape_id()) {}

Tensor Tape::record(Tensor out, std::initializer_list<Tensor> inputs, BackwardFn fn) {
  return record(std::move(out), std::vector<Tensor>(inputs), std::move(fn));
}

Tensor Tape::record(Tensor out, std::vector<Tensor> inputs, BackwardFn fn) {
  if (done_) throw StateError("recording on a tape after backward(); call reset() first");
  bool needs = false;
  for (const Tensor& t : inputs) needs = needs || t.requires_grad();
  out.set_requires_grad(needs);
  if (!needs) return out;
  out.storage().tape_id = id_;
  nodes_.push_back(Node{out, std::move(inputs), std::move(fn)});
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (done_) throw StateError("backward() called twice on the same tape without reset()");
  if (!loss.defined() || loss.size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        (loss.defined() ? shape_string(loss.shape()) : std::string("<undefined>")));
  }
  if (!loss.requires_grad() || loss.storage().tape_id != id_) {
    throw ContractError("loss was not produced on this tape");
  }
  for (Node& n : nodes_) {
    n.out.zero_grad();
    for (Tensor& in : n.inputs) {
      if (in.requires_grad()) in.grad_mut();
    }
  }
  Tensor seed = loss;
  seed.grad_mut()[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->fn();
  done_ = true;
}

void Tape::reset() {
  nodes_.clear();
  done_ = false;
  id_ = next_tape_id();
}

}  // namespace synlstm::ad
