#include "pulse/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pulse/errors.hpp"

namespace pulse::corpus {

namespace {

// The classic 127-word English list, frozen for reproducibility.
// data/stopwords_en.txt carries the same words, one per line.
constexpr std::array<const char*, 127> kStopwords = {
    "i",          "me",      "my",      "myself",  "we",        "our",
    "ours",       "ourselves", "you",   "your",    "yours",     "yourself",
    "yourselves", "he",      "him",     "his",     "himself",   "she",
    "her",        "hers",    "herself", "it",      "its",       "itself",
    "they",       "them",    "their",   "theirs",  "themselves", "what",
    "which",      "who",     "whom",    "this",    "that",      "these",
    "those",      "am",      "is",      "are",     "was",       "were",
    "be",         "been",    "being",   "have",    "has",       "had",
    "having",     "do",      "does",    "did",     "doing",     "a",
    "an",         "the",     "and",     "but",     "if",        "or",
    "because",    "as",      "until",   "while",   "of",        "at",
    "by",         "for",     "with",    "about",   "against",   "between",
    "into",       "through", "during",  "before",  "after",     "above",
    "below",      "to",      "from",    "up",      "down",      "in",
    "out",        "on",      "off",     "over",    "under",     "again",
    "further",    "then",    "once",    "here",    "there",     "when",
    "where",      "why",     "how",     "all",     "any",       "both",
    "each",       "few",     "more",    "most",    "other",     "some",
    "such",       "no",      "nor",     "not",     "only",      "own",
    "same",       "so",      "than",    "too",     "very",      "s",
    "t",          "can",     "will",    "just",    "don",       "should",
    "now"};

constexpr char32_t kInvalid = 0xFFFD;

// Strict UTF-8 decode of the code point starting at `i`; advances `i`.
// Invalid sequences yield kInvalid and advance one byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kInvalid;
  }
  if (i + len > s.size()) {
    ++i;
    return kInvalid;
  }
  for (int k = 1; k < len; ++k) {
    const unsigned char bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return kInvalid;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                        (len == 4 && cp < 0x10000);
  if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return kInvalid;
  }
  i += len;
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

}  // namespace

char32_t fold_case(char32_t cp) {
  if (in(cp, U'A', U'Z')) return cp + 0x20;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;  // Latin-1
  // Latin Extended-A: alternating upper/lower pairs.
  if (in(cp, 0x100, 0x137) && cp % 2 == 0) return cp + 1;
  if (in(cp, 0x139, 0x148) && cp % 2 == 1) return cp + 1;
  if (in(cp, 0x14A, 0x177) && cp % 2 == 0) return cp + 1;
  if (cp == 0x178) return 0xFF;  // Y with diaeresis
  if (in(cp, 0x179, 0x17E) && cp % 2 == 1) return cp + 1;
  if (in(cp, 0x391, 0x3A1)) return cp + 0x20;  // Greek
  if (in(cp, 0x3A3, 0x3AB)) return cp + 0x20;
  if (in(cp, 0x400, 0x40F)) return cp + 0x50;  // Cyrillic
  if (in(cp, 0x410, 0x42F)) return cp + 0x20;
  return cp;
}

bool is_ascii_digit(char32_t cp) { return in(cp, U'0', U'9'); }

bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return in(cp, 0x2000, 0x200A);
  }
}

bool is_letter(char32_t cp) {
  if (cp < 0x80) return in(cp, U'a', U'z') || in(cp, U'A', U'Z');
  if (cp < 0x100) {
    return in(cp, 0xC0, 0xFF) && cp != 0xD7 && cp != 0xF7;
  }
  if (is_whitespace(cp)) return false;
  // Punctuation and symbol blocks; everything else >= U+0100 is a letter.
  if (in(cp, 0x2000, 0x206F)) return false;   // general punctuation
  if (in(cp, 0x2070, 0x209F)) return false;   // super/subscripts
  if (in(cp, 0x20A0, 0x20CF)) return false;   // currency
  if (in(cp, 0x2100, 0x2BFF)) return false;   // letterlike..misc symbols
  if (in(cp, 0x2E00, 0x2E7F)) return false;   // supplemental punctuation
  if (in(cp, 0x3000, 0x303F)) return false;   // CJK punctuation
  if (in(cp, 0xE000, 0xF8FF)) return false;   // private use
  if (in(cp, 0xFE10, 0xFE6F)) return false;   // small/vertical/compat forms
  if (in(cp, 0xFF00, 0xFFFF)) return false;   // fullwidth forms, specials
  if (in(cp, 0x1F000, 0x1FFFF)) return false; // emoji and symbol planes
  return true;
}

const StopwordSet& builtin_stopwords() {
  static const StopwordSet set(kStopwords.begin(), kStopwords.end());
  return set;
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword list: " + path);
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) set.insert(line);
  }
  return set;
}

std::vector<std::string> preprocess(std::string_view raw_text,
                                    const StopwordSet& stopwords) {
  // Fold case and strip digits in one decoding pass.
  std::vector<char32_t> cps;
  cps.reserve(raw_text.size());
  for (std::size_t i = 0; i < raw_text.size();) {
    const char32_t cp = fold_case(decode_utf8(raw_text, i));
    if (!is_ascii_digit(cp)) cps.push_back(cp);
  }

  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty() && !stopwords.count(current)) tokens.push_back(current);
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (is_letter(cp)) {
      encode_utf8(cp, current);
      continue;
    }
    const bool joiner = (cp == U'-' || cp == U'\'') && i > 0 &&
                        i + 1 < cps.size() && is_letter(cps[i - 1]) &&
                        is_letter(cps[i + 1]);
    if (joiner) {
      current.push_back(static_cast<char>(cp));
    } else {
      flush();  // whitespace and all other punctuation/symbols split
    }
  }
  flush();
  return tokens;
}

const Comment* Corpus::find(std::string_view id) const {
  for (const Comment& c : comments) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

namespace {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line;  // 1-based line the record starts on
};

// RFC 4180 reader. Quoted fields may contain commas, escaped quotes ("")
// and newlines; records end at an unquoted newline.
std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t i = 0;
  std::size_t line = 1;
  // Skip a UTF-8 BOM if present.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < text.size()) {
    CsvRecord rec;
    rec.line = line;
    bool done = false;
    while (!done) {
      std::string field;
      if (i < text.size() && text[i] == '"') {
        ++i;
        while (true) {
          if (i >= text.size()) throw ParseError("unterminated quoted field", rec.line);
          const char c = text[i];
          if (c == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
            ++i;
          }
        }
        if (i < text.size() && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
          throw ParseError("unexpected character after closing quote", line);
        }
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
          if (text[i] == '"') throw ParseError("stray quote in unquoted field", line);
          field.push_back(text[i]);
          ++i;
        }
      }
      rec.fields.push_back(std::move(field));
      if (i >= text.size()) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {  // \r, \n or \r\n: record terminator
        if (text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        ++line;
        done = true;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

Corpus ingest_csv(const std::string& path, std::string_view text,
                  LoadReport* report, const StopwordSet& stopwords) {
  const auto records = parse_csv(text);
  if (records.empty()) throw ParseError("missing header `id,text`", 1);
  const auto& header = records.front().fields;
  if (header.size() != 2 || header[0] != "id" || header[1] != "text") {
    throw ParseError("header must be exactly `id,text`", records.front().line);
  }
  Corpus corpus;
  corpus.source = path;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 2) {
      throw ParseError("expected 2 fields, got " + std::to_string(rec.fields.size()),
                       rec.line);
    }
    Comment c;
    c.id = rec.fields[0];
    c.raw_text = rec.fields[1];
    if (c.id.empty()) throw ValidationError("empty comment id on line " +
                                            std::to_string(rec.line));
    if (!seen.insert(c.id).second) throw ValidationError("duplicate comment id: " + c.id);
    c.tokens = preprocess(c.raw_text, stopwords);
    if (report && c.raw_text.empty()) report->empty_text_ids.push_back(c.id);
    corpus.comments.push_back(std::move(c));
  }
  return corpus;
}

Corpus ingest_jsonl(const std::string& path, std::string_view text,
                    LoadReport* report, const StopwordSet& stopwords) {
  Corpus corpus;
  corpus.source = path;
  std::unordered_set<std::string> seen;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    ++line;
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (raw.find_first_not_of(" \t") == std::string_view::npos) continue;
    nlohmann::json obj = nlohmann::json::parse(raw, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw ParseError("invalid JSON object", line);
    }
    if (!obj.contains("id") || !obj["id"].is_string() || !obj.contains("text") ||
        !obj["text"].is_string()) {
      throw ParseError("object must have string fields `id` and `text`", line);
    }
    Comment c;
    c.id = obj["id"].get<std::string>();
    c.raw_text = obj["text"].get<std::string>();
    if (c.id.empty()) throw ValidationError("empty comment id on line " +
                                            std::to_string(line));
    if (!seen.insert(c.id).second) throw ValidationError("duplicate comment id: " + c.id);
    c.tokens = preprocess(c.raw_text, stopwords);
    if (report && c.raw_text.empty()) report->empty_text_ids.push_back(c.id);
    corpus.comments.push_back(std::move(c));
  }
  return corpus;
}

}  // namespace

Corpus ingest(const std::string& path, InputFormat format, LoadReport* report,
              const StopwordSet& stopwords) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return format == InputFormat::kCsv ? ingest_csv(path, text, report, stopwords)
                                     : ingest_jsonl(path, text, report, stopwords);
}

}  // namespace pulse::corpus
