#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hasqa {

/// Byte range [begin, end) of a token inside its raw text.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct Tokenized {
  std::vector<std::string> tokens;
  std::vector<CharSpan> offsets;
};

/// Lowercases, splits on whitespace, and splits leading and trailing
/// punctuation characters off each piece as one-character tokens.
Tokenized tokenize(std::string_view text);

/// Matching form of a token: lowercase with leading/trailing punctuation
/// stripped. Punctuation-only tokens normalize to the empty string.
std::string normalizeToken(std::string_view token);
/// Normalized non-empty tokens of `text`, in order.
std::vector<std::string> normalizedTokens(std::string_view text);
/// Normalized form of tokens[begin..end] joined by single spaces; this is the
/// key answer strings are grouped and matched by.
std::string normalizedSpanText(const std::vector<std::string>& tokens, std::size_t begin,
                               std::size_t end);

/// Inclusive token-index span.
struct SpanLabel {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const SpanLabel&, const SpanLabel&) = default;
  friend auto operator<=>(const SpanLabel&, const SpanLabel&) = default;
};

struct Paragraph {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  std::vector<CharSpan> offsets;
  std::vector<SpanLabel> labels;

  std::size_t length() const { return tokens.size(); }
  bool positive() const { return !labels.empty(); }
  /// Raw text covered by tokens [start, end].
  std::string rawSpan(std::size_t start, std::size_t end) const;
};

struct QAExample {
  std::string id;
  std::string questionText;
  std::vector<std::string> question;
  std::vector<std::string> answers;
  std::vector<Paragraph> paragraphs;
};

using Dataset = std::vector<QAExample>;

/// Every occurrence of any answer as a whole-token subsequence of the
/// paragraph's normalized tokens, sorted by (start, end) without duplicates.
std::vector<SpanLabel> labelSpans(const Paragraph& paragraph,
                                  const std::vector<std::string>& answers);

/// Builds a paragraph from raw text: tokenizes, truncates to maxTokens
/// (0 = unlimited), and labels against the answers.
Paragraph makeParagraph(std::string id, std::string text, const std::vector<std::string>& answers,
                        std::size_t maxTokens = 0);

struct CorpusStats {
  std::size_t examples = 0;
  std::size_t paragraphs = 0;
  std::size_t negativeParagraphs = 0;
  std::size_t labeledSpans = 0;
  /// Share of paragraphs without any answer span.
  double negParagraphRatio = 0.0;
  /// Mean span count over paragraphs that contain the answer.
  double avgAnswerSpanCount = 0.0;
  /// Same count averaged over all paragraphs.
  double avgAnswerSpanCountAll = 0.0;
};

/// Rejects an empty dataset.
CorpusStats corpusStats(const Dataset& dataset);

struct LoadLimits {
  std::size_t maxParagraphs = 20;
  std::size_t maxParagraphTokens = 400;
};

/// Parses one JSONL record; errors name the offending field.
QAExample parseExample(std::string_view line, const LoadLimits& limits);
std::string serializeExample(const QAExample& example);

/// Loads a JSONL dataset. Malformed lines are rejected with their 1-based line number.
Dataset loadDataset(const std::string& path, const LoadLimits& limits = {});
void writeDataset(const std::string& path, const Dataset& dataset);

}  // namespace hasqa
