#include "pulse/insights.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "pulse/errors.hpp"
#include "pulse/version.hpp"

namespace pulse::insights {

namespace {

using nlohmann::json;

// The query term goes through the same normalization as comment text, so
// "FEEDBACK!!" matches the tag "feedback". Queries that normalize to
// anything other than a single token can never match a tag.
std::optional<std::string> normalize_query(std::string_view term,
                                           const corpus::StopwordSet& stopwords) {
  const auto tokens = corpus::preprocess(term, stopwords);
  if (tokens.size() != 1) return std::nullopt;
  return tokens.front();
}

std::vector<corpus::Comment> collect_members(const AnalysisBundle& bundle,
                                             const std::vector<const grouping::Group*>& groups) {
  std::unordered_set<std::string> ids;
  for (const auto* g : groups) ids.insert(g->member_ids.begin(), g->member_ids.end());
  std::vector<corpus::Comment> out;
  out.reserve(ids.size());
  for (const auto& c : bundle.corpus.comments) {
    if (ids.count(c.id)) out.push_back(c);
  }
  std::sort(out.begin(), out.end(),
            [](const corpus::Comment& x, const corpus::Comment& y) { return x.id < y.id; });
  return out;
}

bool group_has_tag(const keywords::TagAssignment& tags, const std::string& term) {
  return std::any_of(tags.tags.begin(), tags.tags.end(),
                     [&](const keywords::Tag& t) { return t.term == term; });
}

}  // namespace

std::vector<corpus::Comment> comments_by_tag(const AnalysisBundle& bundle,
                                             std::string_view tag,
                                             const corpus::StopwordSet& stopwords) {
  const auto term = normalize_query(tag, stopwords);
  if (!term) return {};
  std::vector<const grouping::Group*> hits;
  for (std::size_t i = 0; i < bundle.groups.size(); ++i) {
    if (group_has_tag(bundle.tags[i], *term)) hits.push_back(&bundle.groups[i]);
  }
  return collect_members(bundle, hits);
}

std::vector<corpus::Comment> comments_by_combination(const AnalysisBundle& bundle,
                                                     const std::vector<std::string>& tags,
                                                     const corpus::StopwordSet& stopwords) {
  if (tags.empty()) throw ValidationError("combination query needs at least one tag");
  std::set<std::string> wanted;
  for (const auto& raw : tags) {
    const auto term = normalize_query(raw, stopwords);
    if (!term) return {};  // a degenerate term can never match
    wanted.insert(*term);
  }
  std::vector<const grouping::Group*> hits;
  for (std::size_t i = 0; i < bundle.groups.size(); ++i) {
    const auto& assignment = bundle.tags[i];
    const bool superset = std::all_of(wanted.begin(), wanted.end(), [&](const auto& t) {
      return group_has_tag(assignment, t);
    });
    if (superset) hits.push_back(&bundle.groups[i]);
  }
  return collect_members(bundle, hits);
}

std::vector<CombinationRow> combination_report(const AnalysisBundle& bundle,
                                               int k_top, int k_bottom) {
  if (k_top < 0 || k_bottom < 0) throw ValidationError("k_top/k_bottom must be >= 0");

  // The tuple order comes from the largest contributing group; equal sizes
  // keep the earlier group's order.
  struct Merged {
    CombinationRow row;
    std::int64_t largest_group = 0;
  };
  std::map<std::vector<std::string>, Merged> merged;
  for (std::size_t i = 0; i < bundle.groups.size(); ++i) {
    if (bundle.tags[i].tags.empty()) continue;
    std::vector<std::string> tuple;
    tuple.reserve(bundle.tags[i].tags.size());
    for (const auto& t : bundle.tags[i].tags) tuple.push_back(t.term);
    std::vector<std::string> key = tuple;
    std::sort(key.begin(), key.end());
    const auto size = static_cast<std::int64_t>(bundle.groups[i].member_ids.size());
    auto [it, inserted] = merged.try_emplace(std::move(key), Merged{{tuple, size}, size});
    if (!inserted) {
      it->second.row.comment_count += size;
      if (size > it->second.largest_group) {
        it->second.largest_group = size;
        it->second.row.tags = std::move(tuple);
      }
    }
  }

  std::vector<CombinationRow> rows;
  rows.reserve(merged.size());
  for (auto& [key, m] : merged) rows.push_back(std::move(m.row));
  std::sort(rows.begin(), rows.end(), [](const CombinationRow& x, const CombinationRow& y) {
    if (x.comment_count != y.comment_count) return x.comment_count > y.comment_count;
    return x.tags < y.tags;
  });

  const std::size_t top = std::min<std::size_t>(k_top, rows.size());
  const std::size_t bottom = std::min<std::size_t>(k_bottom, rows.size());
  if (top + bottom >= rows.size()) return rows;
  std::vector<CombinationRow> out(rows.begin(), rows.begin() + top);
  out.insert(out.end(), rows.end() - bottom, rows.end());
  return out;
}

TagReport tag_frequency(const AnalysisBundle& bundle) {
  std::map<std::string, std::int64_t> counts;
  for (std::size_t i = 0; i < bundle.groups.size(); ++i) {
    const auto members = static_cast<std::int64_t>(bundle.groups[i].member_ids.size());
    for (const auto& t : bundle.tags[i].tags) counts[t.term] += members;
  }
  TagReport report;
  report.rows.reserve(counts.size());
  for (const auto& [tag, count] : counts) report.rows.push_back({tag, count});
  std::sort(report.rows.begin(), report.rows.end(),
            [](const TagReport::Row& x, const TagReport::Row& y) {
              if (x.comment_count != y.comment_count)
                return x.comment_count > y.comment_count;
              return x.tag < y.tag;
            });
  return report;
}

std::vector<std::string> all_tags(const AnalysisBundle& bundle) {
  std::set<std::string> tags;
  for (const auto& assignment : bundle.tags)
    for (const auto& t : assignment.tags) tags.insert(t.term);
  return {tags.begin(), tags.end()};
}

std::vector<std::string> near_match_tags(const AnalysisBundle& bundle,
                                         std::string_view tag) {
  std::vector<std::string> out;
  for (const auto& known : all_tags(bundle)) {
    if (known.starts_with(tag) || tag.starts_with(known)) out.push_back(known);
  }
  return out;
}

namespace {

json params_to_json(const pipeline::PipelineParams& p) {
  json j{{"threshold", p.threshold}, {"damping", p.damping},      {"window", p.window},
         {"tag_cap", p.tag_cap},     {"seed", p.seed},            {"deterministic", p.deterministic}};
  if (const auto* path = std::get_if<std::string>(&p.embedding_source)) {
    j["embedding"] = {{"pretrained", *path}};
  } else {
    const auto& c = std::get<embedding::TrainingConfig>(p.embedding_source);
    j["embedding"] = {{"config",
                       {{"mode", c.mode == embedding::Mode::kSkipGram ? "skipgram" : "cbow"},
                        {"dim", c.dim},
                        {"window", c.window},
                        {"negative", c.negative},
                        {"epochs", c.epochs},
                        {"initial_lr", c.initial_lr},
                        {"min_count", c.min_count},
                        {"subsample_t", c.subsample_t},
                        {"seed", c.seed}}}};
  }
  return j;
}

pipeline::PipelineParams params_from_json(const json& j) {
  pipeline::PipelineParams p;
  p.threshold = j.at("threshold").get<double>();
  p.damping = j.at("damping").get<double>();
  p.window = j.at("window").get<int>();
  p.tag_cap = j.at("tag_cap").get<int>();
  p.seed = j.at("seed").get<std::int64_t>();
  p.deterministic = j.at("deterministic").get<bool>();
  const json& e = j.at("embedding");
  if (e.contains("pretrained")) {
    p.embedding_source = e.at("pretrained").get<std::string>();
  } else {
    const json& c = e.at("config");
    embedding::TrainingConfig cfg;
    cfg.mode = c.at("mode").get<std::string>() == "cbow" ? embedding::Mode::kCbow
                                                         : embedding::Mode::kSkipGram;
    cfg.dim = c.at("dim").get<int>();
    cfg.window = c.at("window").get<int>();
    cfg.negative = c.at("negative").get<int>();
    cfg.epochs = c.at("epochs").get<int>();
    cfg.initial_lr = c.at("initial_lr").get<double>();
    cfg.min_count = c.at("min_count").get<int>();
    cfg.subsample_t = c.at("subsample_t").get<double>();
    cfg.seed = c.at("seed").get<std::int64_t>();
    p.embedding_source = cfg;
  }
  return p;
}

std::array<long, 3> parse_version(const std::string& v) {
  std::array<long, 3> parts{0, 0, 0};
  std::istringstream in(v);
  char dot1 = 0, dot2 = 0;
  if (!(in >> parts[0] >> dot1 >> parts[1] >> dot2 >> parts[2]) || dot1 != '.' ||
      dot2 != '.') {
    throw ParseError("unrecognized tool_version: " + v);
  }
  return parts;
}

}  // namespace

void save_bundle(const AnalysisBundle& bundle, const std::string& path) {
  json groups = json::array();
  for (std::size_t i = 0; i < bundle.groups.size(); ++i) {
    json tags = json::array();
    for (const auto& t : bundle.tags[i].tags) {
      tags.push_back({{"term", t.term}, {"score", t.score}});
    }
    groups.push_back({{"id", bundle.groups[i].id},
                      {"members", bundle.groups[i].member_ids},
                      {"tags", std::move(tags)}});
  }
  json comments = json::array();
  for (const auto& c : bundle.corpus.comments) {
    comments.push_back({{"id", c.id}, {"text", c.raw_text}, {"tokens", c.tokens}});
  }
  json excluded = json::array();
  for (const auto& e : bundle.excluded) {
    excluded.push_back({{"id", e.id}, {"reason", e.reason}});
  }
  const json doc{
      {"tool_version", bundle.tool_version},
      {"created_at", bundle.created_at},
      {"params", params_to_json(bundle.params)},
      {"corpus", {{"source", bundle.corpus.source}, {"comments", std::move(comments)}}},
      {"groups", std::move(groups)},
      {"excluded", std::move(excluded)},
      {"warnings", bundle.warnings},
      {"timings",
       {{"relevancy_ms", bundle.timings.relevancy_ms},
        {"graph_ms", bundle.timings.graph_ms},
        {"components_ms", bundle.timings.components_ms},
        {"tags_ms", bundle.timings.tags_ms},
        {"total_ms", bundle.timings.total_ms}}}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

AnalysisBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open bundle: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupt bundle: ") + e.what());
  }

  try {
    AnalysisBundle bundle;
    bundle.tool_version = doc.at("tool_version").get<std::string>();
    const auto file_v = parse_version(bundle.tool_version);
    const auto tool_v = parse_version(kToolVersion);
    if (file_v > tool_v) {
      throw MigrationError("bundle written by version " + bundle.tool_version +
                           ", this tool is " + std::string(kToolVersion));
    }
    bundle.created_at = doc.at("created_at").get<std::string>();
    bundle.params = params_from_json(doc.at("params"));
    bundle.corpus.source = doc.at("corpus").at("source").get<std::string>();
    for (const auto& c : doc.at("corpus").at("comments")) {
      bundle.corpus.comments.push_back({c.at("id").get<std::string>(),
                                        c.at("text").get<std::string>(),
                                        c.at("tokens").get<std::vector<std::string>>()});
    }
    for (const auto& g : doc.at("groups")) {
      grouping::Group group;
      group.id = g.at("id").get<int>();
      group.member_ids = g.at("members").get<std::vector<std::string>>();
      keywords::TagAssignment tags;
      tags.group_id = group.id;
      for (const auto& t : g.at("tags")) {
        tags.tags.push_back({t.at("term").get<std::string>(), t.at("score").get<double>()});
      }
      bundle.groups.push_back(std::move(group));
      bundle.tags.push_back(std::move(tags));
    }
    for (const auto& e : doc.at("excluded")) {
      bundle.excluded.push_back({e.at("id").get<std::string>(),
                                 e.at("reason").get<std::string>()});
    }
    bundle.warnings = doc.at("warnings").get<std::vector<std::string>>();
    const json& t = doc.at("timings");
    bundle.timings = {t.at("relevancy_ms").get<double>(), t.at("graph_ms").get<double>(),
                      t.at("components_ms").get<double>(), t.at("tags_ms").get<double>(),
                      t.at("total_ms").get<double>()};

    std::unordered_set<std::string> known;
    known.reserve(bundle.corpus.comments.size());
    for (const auto& c : bundle.corpus.comments) known.insert(c.id);
    for (const auto& g : bundle.groups) {
      for (const auto& id : g.member_ids) {
        if (!known.count(id)) {
          throw ValidationError("group " + std::to_string(g.id) +
                                " references unknown comment id: " + id);
        }
      }
    }
    return bundle;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed bundle: ") + e.what());
  }
}

}  // namespace pulse::insights
