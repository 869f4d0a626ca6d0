#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "synlstm/config.hpp"
#include "synlstm/model.hpp"
#include "synlstm/vocab.hpp"

namespace synlstm {

struct TrainingSummary {
  double best_dev_f1 = 0.0;
  std::size_t best_epoch = 0;  // 0 = the initial parameters
  std::vector<double> loss_curve;
  std::vector<double> dev_f1_curve;
  friend bool operator==(const TrainingSummary&, const TrainingSummary&) = default;
};

// Self-contained model snapshot (deep copy of every parameter).
struct Checkpoint {
  ModelConfig config;
  Vocabulary vocab;
  std::vector<std::pair<std::string, ad::Tensor>> tensors;
  TrainingSummary summary;
};

Checkpoint snapshot(const Model& model, TrainingSummary summary = {});
// Rebuilds the model and copies the stored values; name or shape mismatches
// raise FormatError.
Model restore(const Checkpoint& ckpt);
void load_parameters(Model& model, const Checkpoint& ckpt);

// Binary layout:
//   "SYNL" | u16 version | u64 n | n bytes of JSON metadata |
//   per tensor: u64 name length | name | u64 rank | u64 dims[rank] | f64 values
// All integers and doubles little-endian.
inline constexpr std::uint16_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace synlstm
