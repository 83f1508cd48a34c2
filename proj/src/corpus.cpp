#include "hasqa/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "hasqa/error.hpp"
#include "json.hpp"

namespace hasqa {
namespace {

bool isSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool isPunct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string lowerCopy(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

}  // namespace

Tokenized tokenize(std::string_view text) {
  Tokenized out;
  auto emit = [&](std::size_t b, std::size_t e) {
    out.tokens.push_back(lowerCopy(text.substr(b, e - b)));
    out.offsets.push_back({b, e});
  };
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && isSpace(text[i])) ++i;
    if (i == text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !isSpace(text[j])) ++j;
    std::size_t b = i, e = j;
    while (b < e && isPunct(text[b])) {
      emit(b, b + 1);
      ++b;
    }
    std::size_t coreEnd = e;
    while (coreEnd > b && isPunct(text[coreEnd - 1])) --coreEnd;
    if (coreEnd > b) emit(b, coreEnd);
    for (std::size_t k = coreEnd; k < e; ++k) emit(k, k + 1);
    i = j;
  }
  return out;
}

std::string normalizeToken(std::string_view token) {
  std::size_t b = 0, e = token.size();
  while (b < e && isPunct(token[b])) ++b;
  while (e > b && isPunct(token[e - 1])) --e;
  return lowerCopy(token.substr(b, e - b));
}

std::vector<std::string> normalizedTokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text).tokens) {
    auto n = normalizeToken(t);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

std::string normalizedSpanText(const std::vector<std::string>& tokens, std::size_t begin,
                               std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i <= end && i < tokens.size(); ++i) {
    auto n = normalizeToken(tokens[i]);
    if (n.empty()) continue;
    if (!out.empty()) out += ' ';
    out += n;
  }
  return out;
}

std::string Paragraph::rawSpan(std::size_t start, std::size_t end) const {
  if (start > end || end >= offsets.size()) {
    throw Error("span (" + std::to_string(start) + "," + std::to_string(end) +
                ") outside paragraph " + id);
  }
  return text.substr(offsets[start].begin, offsets[end].end - offsets[start].begin);
}

std::vector<SpanLabel> labelSpans(const Paragraph& paragraph,
                                  const std::vector<std::string>& answers) {
  std::vector<std::string> norm;
  norm.reserve(paragraph.tokens.size());
  for (const auto& t : paragraph.tokens) norm.push_back(normalizeToken(t));

  std::vector<SpanLabel> spans;
  for (const auto& answer : answers) {
    const auto target = normalizedTokens(answer);
    if (target.empty() || target.size() > norm.size()) continue;
    for (std::size_t s = 0; s + target.size() <= norm.size(); ++s) {
      if (std::equal(target.begin(), target.end(), norm.begin() + static_cast<std::ptrdiff_t>(s))) {
        spans.push_back({s, s + target.size() - 1});
      }
    }
  }
  std::sort(spans.begin(), spans.end());
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  return spans;
}

Paragraph makeParagraph(std::string id, std::string text, const std::vector<std::string>& answers,
                        std::size_t maxTokens) {
  Paragraph p;
  p.id = std::move(id);
  auto tok = tokenize(text);
  if (maxTokens > 0 && tok.tokens.size() > maxTokens) {
    tok.tokens.resize(maxTokens);
    tok.offsets.resize(maxTokens);
    text.resize(tok.offsets.back().end);
  }
  p.text = std::move(text);
  p.tokens = std::move(tok.tokens);
  p.offsets = std::move(tok.offsets);
  p.labels = labelSpans(p, answers);
  return p;
}

CorpusStats corpusStats(const Dataset& dataset) {
  if (dataset.empty()) throw Error("corpusStats: empty dataset");
  CorpusStats s;
  s.examples = dataset.size();
  std::size_t positiveSpans = 0;
  for (const auto& ex : dataset) {
    for (const auto& p : ex.paragraphs) {
      ++s.paragraphs;
      s.labeledSpans += p.labels.size();
      if (p.labels.empty()) {
        ++s.negativeParagraphs;
      } else {
        positiveSpans += p.labels.size();
      }
    }
  }
  if (s.paragraphs == 0) throw Error("corpusStats: dataset has no paragraphs");
  const std::size_t positives = s.paragraphs - s.negativeParagraphs;
  s.negParagraphRatio = static_cast<double>(s.negativeParagraphs) / static_cast<double>(s.paragraphs);
  s.avgAnswerSpanCount =
      positives ? static_cast<double>(positiveSpans) / static_cast<double>(positives) : 0.0;
  s.avgAnswerSpanCountAll =
      static_cast<double>(s.labeledSpans) / static_cast<double>(s.paragraphs);
  return s;
}

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) throw Error("missing field '" + std::string(name) + "'" + where);
  return *it;
}

std::string stringField(const json& obj, const char* name, const std::string& where) {
  const json& v = field(obj, name, where);
  if (!v.is_string()) throw Error("field '" + std::string(name) + "' must be a string" + where);
  return v.get<std::string>();
}

}  // namespace

QAExample parseExample(std::string_view line, const LoadLimits& limits) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error("record is not a JSON object");
  QAExample ex;
  ex.id = stringField(obj, "id", "");
  const std::string where = " in record " + ex.id;
  ex.questionText = stringField(obj, "question", where);
  ex.question = tokenize(ex.questionText).tokens;
  const json& answers = field(obj, "answers", where);
  if (!answers.is_array() || answers.empty()) {
    throw Error("field 'answers' must be a nonempty array" + where);
  }
  for (const auto& a : answers) {
    if (!a.is_string()) throw Error("field 'answers' must hold strings" + where);
    ex.answers.push_back(a.get<std::string>());
  }
  const json& paragraphs = field(obj, "paragraphs", where);
  if (!paragraphs.is_array() || paragraphs.empty()) {
    throw Error("field 'paragraphs' must be a nonempty array" + where);
  }
  for (const auto& p : paragraphs) {
    if (limits.maxParagraphs > 0 && ex.paragraphs.size() == limits.maxParagraphs) break;
    if (!p.is_object()) throw Error("paragraph entries must be objects" + where);
    auto para = makeParagraph(stringField(p, "id", where), stringField(p, "text", where),
                              ex.answers, limits.maxParagraphTokens);
    if (para.tokens.empty()) throw Error("paragraph " + para.id + " has no tokens" + where);
    ex.paragraphs.push_back(std::move(para));
  }
  return ex;
}

std::string serializeExample(const QAExample& example) {
  nlohmann::ordered_json obj;
  obj["id"] = example.id;
  obj["question"] = example.questionText;
  obj["answers"] = example.answers;
  auto paragraphs = nlohmann::ordered_json::array();
  for (const auto& p : example.paragraphs) {
    nlohmann::ordered_json po;
    po["id"] = p.id;
    po["text"] = p.text;
    paragraphs.push_back(std::move(po));
  }
  obj["paragraphs"] = std::move(paragraphs);
  return obj.dump();
}

Dataset loadDataset(const std::string& path, const LoadLimits& limits) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path);
  Dataset out;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (std::all_of(line.begin(), line.end(), isSpace)) continue;
    try {
      out.push_back(parseExample(line, limits));
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return out;
}

void writeDataset(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset " + path);
  for (const auto& ex : dataset) out << serializeExample(ex) << '\n';
}

}  // namespace hasqa
