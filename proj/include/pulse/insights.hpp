#pragma once

#include <string>
#include <vector>

#include "pulse/corpus.hpp"
#include "pulse/grouping.hpp"
#include "pulse/keywords.hpp"
#include "pulse/params.hpp"

namespace pulse::insights {

struct ExcludedComment {
  std::string id;
  std::string reason;
};

struct StageTimings {
  double relevancy_ms = 0.0;
  double graph_ms = 0.0;
  double components_ms = 0.0;
  double tags_ms = 0.0;
  double total_ms = 0.0;
};

/// The persisted end-to-end result. `tags[i]` belongs to `groups[i]`
/// (tags[i].group_id == groups[i].id).
struct AnalysisBundle {
  corpus::Corpus corpus;
  std::vector<grouping::Group> groups;
  std::vector<keywords::TagAssignment> tags;
  pipeline::PipelineParams params;
  std::vector<ExcludedComment> excluded;
  std::vector<std::string> warnings;
  StageTimings timings;
  std::string created_at;    // ISO 8601 UTC
  std::string tool_version;
};

/// Frequency report: for each tag, the number of comments in groups that
/// carry it. Sorted descending by count, ties lexicographic.
struct TagReport {
  struct Row {
    std::string tag;
    std::int64_t comment_count;
  };
  std::vector<Row> rows;
};

struct CombinationRow {
  std::vector<std::string> tags;  // a group's ordered tag tuple
  std::int64_t comment_count;
};

/// All comments in groups whose tag list contains `tag`; the query term is
/// preprocessed with the corpus rules first (pass the stopword set the
/// corpus was ingested with). Sorted by id; unknown tags give an empty
/// result.
std::vector<corpus::Comment> comments_by_tag(
    const AnalysisBundle& bundle, std::string_view tag,
    const corpus::StopwordSet& stopwords = corpus::builtin_stopwords());

/// Comments in groups whose tag set includes every queried tag. Throws
/// ValidationError on an empty query set.
std::vector<corpus::Comment> comments_by_combination(
    const AnalysisBundle& bundle, const std::vector<std::string>& tags,
    const corpus::StopwordSet& stopwords = corpus::builtin_stopwords());

/// Each group contributes its full tag tuple with frequency equal to its
/// member count; identical tag sets merge (counts summed, tuple order from
/// the larger group). Returns the k_top highest and k_bottom lowest rows.
std::vector<CombinationRow> combination_report(const AnalysisBundle& bundle,
                                               int k_top, int k_bottom);

TagReport tag_frequency(const AnalysisBundle& bundle);

/// Distinct tags across all groups, sorted.
std::vector<std::string> all_tags(const AnalysisBundle& bundle);

/// Known tags sharing a prefix with `tag` (either direction), for the
/// "tag not found" notice.
std::vector<std::string> near_match_tags(const AnalysisBundle& bundle,
                                         std::string_view tag);

/// JSON round-trip. load throws ParseError on corrupt files and
/// MigrationError when the file was written by a newer tool version.
void save_bundle(const AnalysisBundle& bundle, const std::string& path);
AnalysisBundle load_bundle(const std::string& path);

}  // namespace pulse::insights
