#include "pulse/pipeline.hpp"

#include <chrono>
#include <ctime>

#include "pulse/errors.hpp"
#include "pulse/grouping.hpp"
#include "pulse/keywords.hpp"
#include "pulse/similarity.hpp"
#include "pulse/version.hpp"

namespace pulse::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

insights::AnalysisBundle analyze(const corpus::Corpus& corpus,
                                 const embedding::EmbeddingModel& model,
                                 const PipelineParams& params) {
  if (corpus.comments.empty()) throw ValidationError("empty corpus");
  if (params.threshold < 0.0 || params.threshold > 1.0) {
    throw ValidationError("threshold must be in [0, 1], got " +
                          std::to_string(params.threshold));
  }
  if (params.damping < 0.0 || params.damping >= 1.0) {
    throw ValidationError("damping must be in [0, 1), got " +
                          std::to_string(params.damping));
  }
  if (params.window < 1) throw ValidationError("window must be >= 1");
  if (params.tag_cap < 1) throw ValidationError("tag_cap must be >= 1");

  insights::AnalysisBundle bundle;
  bundle.corpus = corpus;
  bundle.params = params;
  bundle.tool_version = kToolVersion;

  const auto total_start = Clock::now();

  auto start = Clock::now();
  std::vector<std::string> with_vectors;
  for (const auto& comment : corpus.comments) {
    if (comment.tokens.empty()) {
      bundle.excluded.push_back({comment.id, "empty token list"});
    } else if (!embedding::comment_vector(model, comment.tokens)) {
      bundle.excluded.push_back({comment.id, "no tokens in embedding vocabulary"});
    } else {
      with_vectors.push_back(comment.id);
    }
  }
  const auto scores = similarity::pairwise_relevancy(corpus, model);
  bundle.timings.relevancy_ms = ms_since(start);

  if (bundle.excluded.size() * 2 > corpus.comments.size()) {
    bundle.warnings.push_back(
        "more than 50% of comments lack a comment vector (" +
        std::to_string(bundle.excluded.size()) + " of " +
        std::to_string(corpus.comments.size()) +
        "); the embedding model may not cover this corpus");
  }

  start = Clock::now();
  const auto graph = grouping::build_graph(scores, with_vectors, params.threshold);
  bundle.timings.graph_ms = ms_since(start);

  start = Clock::now();
  bundle.groups = grouping::connected_components(graph);
  bundle.timings.components_ms = ms_since(start);

  start = Clock::now();
  keywords::KeywordParams kw;
  kw.window = params.window;
  kw.damping = params.damping;
  kw.tag_cap = params.tag_cap;
  bundle.tags.reserve(bundle.groups.size());
  for (const auto& group : bundle.groups) {
    bundle.tags.push_back(keywords::assign_tags(group, corpus, kw, &bundle.warnings));
  }
  bundle.timings.tags_ms = ms_since(start);
  bundle.timings.total_ms = ms_since(total_start);

  if (params.deterministic) {
    bundle.timings = {};
    bundle.created_at = "1970-01-01T00:00:00Z";
  } else {
    bundle.created_at = utc_now();
  }
  return bundle;
}

}  // namespace pulse::pipeline
