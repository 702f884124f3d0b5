#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace pulse::corpus {

/// One survey response: the raw text as submitted plus its normalized
/// token list.
struct Comment {
  std::string id;
  std::string raw_text;
  std::vector<std::string> tokens;
};

struct Corpus {
  std::vector<Comment> comments;
  std::string source;  // file path or label

  const Comment* find(std::string_view id) const;
};

enum class InputFormat { kCsv, kJsonl };

/// Non-fatal observations made while ingesting a file. Comments with empty
/// text are retained in the corpus but flagged here.
struct LoadReport {
  std::vector<std::string> empty_text_ids;
};

using StopwordSet = std::unordered_set<std::string>;

/// The bundled 127-word English stopword list (see data/stopwords_en.txt,
/// which mirrors this list verbatim).
const StopwordSet& builtin_stopwords();

/// One token per line, UTF-8. Blank lines are ignored.
StopwordSet load_stopwords(const std::string& path);

/// Normalizes a raw comment into tokens:
///   1. simple case folding (see fold_case below)
///   2. delete digit characters
///   3. replace punctuation and symbols with a space, except '-' and '\''
///      flanked by letters on both sides
///   4. split on whitespace
///   5. drop stopwords and empty tokens
/// Deterministic and locale-independent; any UTF-8 input is accepted and
/// degenerate inputs yield an empty list.
std::vector<std::string> preprocess(std::string_view raw_text,
                                    const StopwordSet& stopwords = builtin_stopwords());

/// Reads comments from a CSV file (header `id,text`, RFC 4180 quoting) or a
/// JSONL file (one {"id": ..., "text": ...} object per line). Tokens are
/// populated via preprocess. Throws IoError, ParseError or ValidationError.
Corpus ingest(const std::string& path, InputFormat format,
              LoadReport* report = nullptr,
              const StopwordSet& stopwords = builtin_stopwords());

// Character model behind preprocess. The classifier is fixed in code rather
// than taken from the platform so identical bytes tokenize identically
// everywhere. Coverage: case folding handles ASCII, Latin-1, Latin
// Extended-A, Greek and basic Cyrillic; digits are ASCII 0-9; punctuation
// covers ASCII plus the common Unicode punctuation/symbol blocks. Code
// points outside those ranges count as letters.
char32_t fold_case(char32_t cp);
bool is_ascii_digit(char32_t cp);
bool is_whitespace(char32_t cp);
bool is_letter(char32_t cp);

}  // namespace pulse::corpus
