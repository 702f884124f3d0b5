// pulse: turn pulse-survey comments into grouped, tagged, queryable insight.
//
// Exit codes: 0 success, 1 I/O failure, 2 validation/parse/usage error.

#include <sys/ioctl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "pulse/corpus.hpp"
#include "pulse/embedding.hpp"
#include "pulse/errors.hpp"
#include "pulse/insights.hpp"
#include "pulse/pipeline.hpp"
#include "pulse/version.hpp"

namespace {

using nlohmann::json;
using namespace pulse;

corpus::StopwordSet active_stopwords() {
  if (const char* path = std::getenv("PULSE_STOPWORDS")) {
    return corpus::load_stopwords(path);
  }
  return corpus::builtin_stopwords();
}

std::vector<std::vector<std::string>> read_token_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream split(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (split >> tok) tokens.push_back(tok);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  return sentences;
}

corpus::InputFormat detect_format(const std::string& path, const std::string& flag) {
  if (flag == "csv") return corpus::InputFormat::kCsv;
  if (flag == "jsonl") return corpus::InputFormat::kJsonl;
  if (path.ends_with(".csv")) return corpus::InputFormat::kCsv;
  if (path.ends_with(".jsonl") || path.ends_with(".ndjson"))
    return corpus::InputFormat::kJsonl;
  throw ValidationError("cannot infer input format from `" + path +
                        "`; pass --input-format csv|jsonl");
}

int terminal_width() {
  winsize ws{};
  if (isatty(STDOUT_FILENO) && ioctl(STDOUT_FILENO, TIOCGWINSZ, &ws) == 0 &&
      ws.ws_col > 20) {
    return ws.ws_col;
  }
  return 80;
}

void print_bar_rows(const std::vector<std::pair<std::string, std::int64_t>>& rows,
                    int width) {
  if (rows.empty()) return;
  std::size_t label_width = 0;
  std::int64_t max_count = 1;
  for (const auto& [label, count] : rows) {
    label_width = std::max(label_width, label.size());
    max_count = std::max(max_count, count);
  }
  const int digits = static_cast<int>(std::to_string(max_count).size());
  const int bar_room = std::max(8, width - static_cast<int>(label_width) - digits - 4);
  for (const auto& [label, count] : rows) {
    const int len = static_cast<int>((count * bar_room + max_count - 1) / max_count);
    std::cout << label << std::string(label_width - label.size() + 2, ' ')
              << std::string(std::max(len, count > 0 ? 1 : 0), '#') << ' ' << count
              << '\n';
  }
}

struct EmbedTrainArgs {
  std::string input, out, mode = "skipgram";
  embedding::TrainingConfig cfg;
  bool deterministic = false;
  unsigned threads = 0;
};

int cmd_embed_train(const EmbedTrainArgs& args) {
  embedding::TrainingConfig cfg = args.cfg;
  cfg.mode = args.mode == "cbow" ? embedding::Mode::kCbow : embedding::Mode::kSkipGram;
  const auto sentences = read_token_file(args.input);
  embedding::TrainStats stats;
  const auto model = embedding::train(
      sentences, cfg, {.deterministic = args.deterministic, .threads = args.threads},
      &stats);
  embedding::save_word2vec_text(model, args.out);
  std::cout << "trained " << model.size() << " words, dim " << cfg.dim << ", "
            << stats.total_pairs << " pairs";
  if (!stats.epoch_mean_loss.empty()) {
    std::cout << ", final epoch loss " << stats.epoch_mean_loss.back();
  }
  std::cout << "\nwrote " << args.out << '\n';
  return 0;
}

int cmd_embed_check(const std::string& vectors) {
  const auto model = embedding::load_word2vec_text(vectors);
  std::cout << "ok: " << model.size() << " words, dim " << model.dim << '\n';
  return 0;
}

struct AnalyzeArgs {
  std::string input, vectors, out, input_format = "auto";
  std::string scores_csv, edges_csv, groups_json;
  pipeline::PipelineParams params;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const auto stopwords = active_stopwords();
  corpus::LoadReport report;
  const auto corpus = corpus::ingest(args.input, detect_format(args.input, args.input_format),
                                     &report, stopwords);
  const auto model = embedding::load_word2vec_text(args.vectors);

  pipeline::PipelineParams params = args.params;
  params.embedding_source = args.vectors;
  const auto bundle = pipeline::analyze(corpus, model, params);
  insights::save_bundle(bundle, args.out);

  if (!args.scores_csv.empty() || !args.edges_csv.empty() || !args.groups_json.empty()) {
    const auto scores = similarity::pairwise_relevancy(corpus, model);
    if (!args.scores_csv.empty()) {
      std::ofstream out(args.scores_csv);
      if (!out) throw IoError("cannot open output file: " + args.scores_csv);
      similarity::write_scores_csv(scores, out);
    }
    if (!args.edges_csv.empty() || !args.groups_json.empty()) {
      std::vector<std::string> with_vectors;
      for (const auto& c : corpus.comments) {
        if (embedding::comment_vector(model, c.tokens)) with_vectors.push_back(c.id);
      }
      const auto graph = grouping::build_graph(scores, with_vectors, params.threshold);
      if (!args.edges_csv.empty()) {
        std::ofstream out(args.edges_csv);
        if (!out) throw IoError("cannot open output file: " + args.edges_csv);
        grouping::write_edges_csv(graph, out);
      }
      if (!args.groups_json.empty()) {
        std::ofstream out(args.groups_json);
        if (!out) throw IoError("cannot open output file: " + args.groups_json);
        grouping::write_groups_json(bundle.groups, out);
      }
    }
  }

  for (const auto& id : report.empty_text_ids) {
    std::cerr << "note: comment " << id << " has empty text\n";
  }
  for (const auto& warning : bundle.warnings) std::cerr << "warning: " << warning << '\n';
  if (!bundle.params.deterministic) {
    std::cerr << "timings: relevancy " << bundle.timings.relevancy_ms << " ms, graph "
              << bundle.timings.graph_ms << " ms, components "
              << bundle.timings.components_ms << " ms, tags " << bundle.timings.tags_ms
              << " ms, total " << bundle.timings.total_ms << " ms\n";
  }

  std::cout << "comments: " << bundle.corpus.comments.size() << " ("
            << bundle.excluded.size() << " excluded)\n"
            << "groups: " << bundle.groups.size() << '\n';
  const auto freq = insights::tag_frequency(bundle);
  std::cout << "top tags:";
  for (std::size_t i = 0; i < freq.rows.size() && i < 5; ++i) {
    std::cout << (i ? ", " : " ") << freq.rows[i].tag << " (" << freq.rows[i].comment_count
              << ")";
  }
  std::cout << "\nbundle: " << args.out << '\n';
  return 0;
}

void print_comments(const std::vector<corpus::Comment>& comments,
                    const std::string& format) {
  if (format == "json") {
    json arr = json::array();
    for (const auto& c : comments) arr.push_back({{"id", c.id}, {"text", c.raw_text}});
    std::cout << arr.dump(2) << '\n';
    return;
  }
  for (const auto& c : comments) std::cout << c.id << '\t' << c.raw_text << '\n';
}

int cmd_query_tag(const std::string& bundle_path, const std::string& term,
                  const std::string& format) {
  const auto stopwords = active_stopwords();
  const auto bundle = insights::load_bundle(bundle_path);
  const auto comments = insights::comments_by_tag(bundle, term, stopwords);
  print_comments(comments, format);
  if (format != "json") {
    std::cout << comments.size() << " comments";
    if (comments.empty()) {
      std::cout << "; no tag '" << term << "'";
      const auto near = insights::near_match_tags(bundle, term);
      if (!near.empty()) {
        std::cout << " (near matches:";
        for (std::size_t i = 0; i < near.size() && i < 5; ++i)
          std::cout << (i ? ", " : " ") << near[i];
        std::cout << ")";
      }
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_query_combo(const std::string& bundle_path, const std::string& terms,
                    const std::string& format) {
  const auto stopwords = active_stopwords();
  std::vector<std::string> tags;
  std::istringstream split(terms);
  std::string tag;
  while (std::getline(split, tag, ',')) {
    if (!tag.empty()) tags.push_back(tag);
  }
  const auto bundle = insights::load_bundle(bundle_path);
  const auto comments = insights::comments_by_combination(bundle, tags, stopwords);
  print_comments(comments, format);
  if (format != "json") std::cout << comments.size() << " comments\n";
  return 0;
}

int cmd_report_tags(const std::string& bundle_path, const std::string& format, int width) {
  const auto bundle = insights::load_bundle(bundle_path);
  const auto report = insights::tag_frequency(bundle);
  if (format == "json") {
    json arr = json::array();
    for (const auto& row : report.rows) {
      arr.push_back({{"tag", row.tag}, {"comment_count", row.comment_count}});
    }
    std::cout << arr.dump(2) << '\n';
    return 0;
  }
  if (report.rows.empty()) {
    std::cout << "no tags\n";
    return 0;
  }
  std::vector<std::pair<std::string, std::int64_t>> rows;
  for (const auto& row : report.rows) rows.emplace_back(row.tag, row.comment_count);
  print_bar_rows(rows, width > 0 ? width : terminal_width());
  return 0;
}

int cmd_report_combos(const std::string& bundle_path, int top, int bottom,
                      const std::string& format, int width) {
  const auto bundle = insights::load_bundle(bundle_path);
  const auto rows = insights::combination_report(bundle, top, bottom);
  if (format == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      arr.push_back({{"tags", row.tags}, {"comment_count", row.comment_count}});
    }
    std::cout << arr.dump(2) << '\n';
    return 0;
  }
  if (rows.empty()) {
    std::cout << "no tags\n";
    return 0;
  }
  std::vector<std::pair<std::string, std::int64_t>> bars;
  for (const auto& row : rows) {
    std::string label;
    for (const auto& t : row.tags) {
      if (!label.empty()) label += ", ";
      label += t;
    }
    bars.emplace_back(std::move(label), row.comment_count);
  }
  print_bar_rows(bars, width > 0 ? width : terminal_width());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse survey comment analytics"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // embed
  auto* embed = app.add_subcommand("embed", "train or inspect word vectors");
  embed->require_subcommand(1);

  EmbedTrainArgs train_args;
  auto* embed_train = embed->add_subcommand("train", "train vectors from a tokens file");
  embed_train->add_option("--input", train_args.input, "tokens file, one sentence per line")
      ->required();
  embed_train->add_option("--out", train_args.out, "output word2vec text file")->required();
  embed_train->add_option("--mode", train_args.mode, "skipgram|cbow")
      ->check(CLI::IsMember({"skipgram", "cbow"}));
  embed_train->add_option("--dim", train_args.cfg.dim, "vector dimensionality");
  embed_train->add_option("--window", train_args.cfg.window, "context window");
  embed_train->add_option("--negative", train_args.cfg.negative, "negative samples per pair");
  embed_train->add_option("--epochs", train_args.cfg.epochs, "training epochs");
  embed_train->add_option("--lr", train_args.cfg.initial_lr, "initial learning rate");
  embed_train->add_option("--min-count", train_args.cfg.min_count, "min word frequency");
  embed_train->add_option("--subsample", train_args.cfg.subsample_t,
                          "frequent-word subsampling threshold (0 disables)");
  embed_train->add_option("--seed", train_args.cfg.seed, "rng seed");
  embed_train->add_flag("--deterministic", train_args.deterministic,
                        "single worker, bit-reproducible output");
  embed_train->add_option("--threads", train_args.threads, "worker threads (0 = auto)");

  std::string check_vectors;
  auto* embed_check = embed->add_subcommand("check", "validate a word2vec text file");
  embed_check->add_option("--vectors", check_vectors, "vector file")->required();

  // analyze
  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "run the full comment analysis");
  analyze->add_option("--input", analyze_args.input, "comments file (.csv or .jsonl)")
      ->required();
  analyze->add_option("--vectors", analyze_args.vectors, "word2vec text file")->required();
  analyze->add_option("--out", analyze_args.out, "output bundle path")->required();
  analyze->add_option("--input-format", analyze_args.input_format, "csv|jsonl|auto")
      ->check(CLI::IsMember({"csv", "jsonl", "auto"}));
  analyze->add_option("--threshold", analyze_args.params.threshold,
                      "relevancy threshold for graph edges");
  analyze->add_option("--damping", analyze_args.params.damping, "TextRank damping factor");
  analyze->add_option("--window", analyze_args.params.window, "keyword co-occurrence window");
  analyze->add_option("--tag-cap", analyze_args.params.tag_cap, "max tags per group");
  analyze->add_option("--seed", analyze_args.params.seed, "rng seed recorded in the bundle");
  analyze->add_flag("--deterministic", analyze_args.params.deterministic,
                    "byte-reproducible bundle (fixed timestamp, zeroed timings)");
  analyze->add_option("--scores-csv", analyze_args.scores_csv,
                      "also export all pairwise relevancy scores");
  analyze->add_option("--edges-csv", analyze_args.edges_csv, "also export graph edges");
  analyze->add_option("--groups-json", analyze_args.groups_json, "also export raw groups");

  // query
  auto* query = app.add_subcommand("query", "retrieve comments by tag");
  query->require_subcommand(1);
  std::string query_bundle, query_term, query_format = "text";

  auto* query_tag = query->add_subcommand("tag", "comments whose group carries a tag");
  query_tag->add_option("term", query_term, "tag to look up")->required();
  query_tag->add_option("--bundle", query_bundle, "analysis bundle")->required();
  query_tag->add_option("--format", query_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* query_combo =
      query->add_subcommand("combo", "comments whose group carries all given tags");
  query_combo->add_option("terms", query_term, "comma-separated tags")->required();
  query_combo->add_option("--bundle", query_bundle, "analysis bundle")->required();
  query_combo->add_option("--format", query_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  // report
  auto* report = app.add_subcommand("report", "tag frequency and combination reports");
  report->require_subcommand(1);
  std::string report_bundle, report_format = "text";
  int report_top = 3, report_bottom = 3, report_width = 0;

  auto* report_tags = report->add_subcommand("tags", "tag frequency report");
  report_tags->add_option("--bundle", report_bundle, "analysis bundle")->required();
  report_tags->add_option("--format", report_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  report_tags->add_option("--width", report_width, "chart width (default: terminal)");

  auto* report_combos =
      report->add_subcommand("combos", "most/least frequent tag combinations");
  report_combos->add_option("--bundle", report_bundle, "analysis bundle")->required();
  report_combos->add_option("--top", report_top, "highest-count rows to show");
  report_combos->add_option("--bottom", report_bottom, "lowest-count rows to show");
  report_combos->add_option("--format", report_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  report_combos->add_option("--width", report_width, "chart width (default: terminal)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (embed_train->parsed()) return cmd_embed_train(train_args);
    if (embed_check->parsed()) return cmd_embed_check(check_vectors);
    if (analyze->parsed()) return cmd_analyze(analyze_args);
    if (query_tag->parsed()) return cmd_query_tag(query_bundle, query_term, query_format);
    if (query_combo->parsed())
      return cmd_query_combo(query_bundle, query_term, query_format);
    if (report_tags->parsed())
      return cmd_report_tags(report_bundle, report_format, report_width);
    if (report_combos->parsed()) {
      return cmd_report_combos(report_bundle, report_top, report_bottom, report_format,
                               report_width);
    }
    std::cerr << "error: no command\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {  // validation, parse, migration
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
