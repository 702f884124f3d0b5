#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pulse/corpus.hpp"
#include "pulse/embedding.hpp"

namespace pulse::similarity {

/// Relevancy between two comments. Pairs are canonical: a is the
/// lexicographically smaller id.
struct RelevancyScore {
  std::string a;
  std::string b;
  double score;
};

/// u.v / (|u||v|), clamped to [-1, 1]. Throws ValidationError on dimension
/// mismatch or zero-norm input.
double cosine(std::span<const double> u, std::span<const double> v);

/// One score per unordered pair of comments that both have a defined,
/// nonzero-norm comment vector; sorted by (a, b). Comments without vectors
/// contribute no pairs.
std::vector<RelevancyScore> pairwise_relevancy(const corpus::Corpus& corpus,
                                               const embedding::EmbeddingModel& model);

/// Debug export: `a,b,score` with 6 decimal places.
void write_scores_csv(const std::vector<RelevancyScore>& scores, std::ostream& out);

}  // namespace pulse::similarity
