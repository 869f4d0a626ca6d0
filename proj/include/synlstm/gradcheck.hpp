#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "synlstm/config.hpp"
#include "synlstm/corpus.hpp"

namespace synlstm {

// |a - n| / max(|a|, |n|, floor)
double relative_error(double analytic, double numeric, double floor = 1e-6);

struct GradCheckOptions {
  std::size_t sentences = 5;
  std::size_t tokens = 3;
  double step = 1e-5;
  std::uint64_t seed = 7;
};

struct GradCheckResult {
  Variant variant = Variant::syn_lstm_crf;
  std::size_t checked = 0;  // parameter entries compared
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
};

// Small random sentences over a toy vocabulary with random trees and valid
// BIOES labels.
Corpus random_corpus(std::size_t sentences, std::size_t tokens, std::uint64_t seed);

// The base config with hidden size 8, small embedding widths and dropout off.
ModelConfig gradcheck_config(const ModelConfig& base, Variant variant);

// Compares every parameter entry's analytic gradient of the batch NLL with a
// central finite difference.
GradCheckResult gradcheck_variant(const ModelConfig& base, Variant variant,
                                  const GradCheckOptions& options = {});
std::vector<GradCheckResult> gradcheck_all(const ModelConfig& base,
                                           const GradCheckOptions& options = {});

}  // namespace synlstm
