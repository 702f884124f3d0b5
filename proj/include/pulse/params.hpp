#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "pulse/embedding.hpp"

namespace pulse::pipeline {

/// Everything one analysis run depends on. `embedding_source` is either the
/// configuration the vectors were trained with or the path of a pretrained
/// word2vec text file.
struct PipelineParams {
  double threshold = 0.85;  // minimum relevancy for a graph edge
  double damping = 0.85;    // TextRank damping factor
  int window = 2;           // keyword co-occurrence window
  int tag_cap = 5;          // max tags per group
  std::variant<embedding::TrainingConfig, std::string> embedding_source;
  std::int64_t seed = 42;
  bool deterministic = false;
};

}  // namespace pulse::pipeline
