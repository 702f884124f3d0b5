#include "pulse/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pulse/errors.hpp"

namespace pulse::similarity {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine: dimension mismatch (" + std::to_string(u.size()) +
                          " vs " + std::to_string(v.size()) + ")");
  }
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t d = 0; d < u.size(); ++d) {
    uv += u[d] * v[d];
    uu += u[d] * u[d];
    vv += v[d] * v[d];
  }
  if (uu == 0.0 || vv == 0.0) throw ValidationError("cosine: zero-norm vector");
  return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::vector<RelevancyScore> pairwise_relevancy(const corpus::Corpus& corpus,
                                               const embedding::EmbeddingModel& model) {
  struct Entry {
    const std::string* id;
    std::vector<double> vec;
  };
  std::vector<Entry> entries;
  for (const auto& comment : corpus.comments) {
    auto vec = embedding::comment_vector(model, comment.tokens);
    if (!vec) continue;
    double norm2 = 0.0;
    for (const double x : *vec) norm2 += x * x;
    if (norm2 == 0.0) continue;
    entries.push_back({&comment.id, std::move(*vec)});
  }

  std::vector<RelevancyScore> scores;
  scores.reserve(entries.size() * (entries.size() + 1) / 2);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      const double score = cosine(entries[i].vec, entries[j].vec);
      const bool ordered = *entries[i].id < *entries[j].id;
      scores.push_back({ordered ? *entries[i].id : *entries[j].id,
                        ordered ? *entries[j].id : *entries[i].id, score});
    }
  }
  std::sort(scores.begin(), scores.end(), [](const auto& x, const auto& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return scores;
}

void write_scores_csv(const std::vector<RelevancyScore>& scores, std::ostream& out) {
  out << "a,b,score\n";
  char buf[32];
  for (const auto& s : scores) {
    std::snprintf(buf, sizeof buf, "%.6f", s.score);
    out << s.a << ',' << s.b << ',' << buf << '\n';
  }
}

}  // namespace pulse::similarity
