#pragma once

#include "pulse/corpus.hpp"
#include "pulse/embedding.hpp"
#include "pulse/insights.hpp"
#include "pulse/params.hpp"

namespace pulse::pipeline {

/// Runs the full analysis: pairwise relevancy, thresholded graph,
/// connected components, per-group tags, bundle assembly. Comments without
/// a comment vector are excluded from the graph and listed in the bundle
/// with a reason; a warning is added when they exceed half the corpus.
/// With params.deterministic set, timings and the timestamp are fixed so
/// identical inputs produce byte-identical saved bundles.
insights::AnalysisBundle analyze(const corpus::Corpus& corpus,
                                 const embedding::EmbeddingModel& model,
                                 const PipelineParams& params);

}  // namespace pulse::pipeline
