#include "hasqa/model.hpp"

#include <fstream>
#include <sstream>

#include "hasqa/error.hpp"

namespace hasqa {

void EncoderConfig::validate() const {
  if (wordDim == 0 || charDim == 0 || charConvWidth == 0 || charOutDim == 0 || hiddenDim == 0) {
    throw Error("encoder dimensions must all be positive");
  }
  if (!(keepProb > 0.0) || keepProb > 1.0) throw Error("keep_prob must be in (0, 1]");
}

Vocabulary::Vocabulary() {
  addWord("<unk>");
  addChar("<pad>");
  addChar("<unk>");
}

void Vocabulary::addWord(const std::string& w) {
  if (wordIndex_.emplace(w, static_cast<int>(words_.size())).second) words_.push_back(w);
}

void Vocabulary::addChar(const std::string& c) {
  if (charIndex_.emplace(c, static_cast<int>(chars_.size())).second) chars_.push_back(c);
}

Vocabulary Vocabulary::fromDataset(const Dataset& dataset) {
  Vocabulary v;
  auto addTokens = [&](const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) {
      v.addWord(t);
      for (char ch : t) v.addChar(std::string(1, ch));
    }
  };
  for (const auto& ex : dataset) {
    addTokens(ex.question);
    for (const auto& p : ex.paragraphs) addTokens(p.tokens);
  }
  return v;
}

Vocabulary Vocabulary::fromLists(std::vector<std::string> words, std::vector<std::string> chars) {
  if (words.empty() || words[0] != "<unk>" || chars.size() < 2 || chars[0] != "<pad>" ||
      chars[1] != "<unk>") {
    throw Error("vocabulary lists must start with the reserved entries");
  }
  Vocabulary v;
  for (const auto& w : words) v.addWord(w);
  for (const auto& c : chars) v.addChar(c);
  if (v.words_.size() != words.size() || v.chars_.size() != chars.size()) {
    throw Error("vocabulary lists contain duplicates");
  }
  return v;
}

int Vocabulary::wordId(const std::string& token) const {
  auto it = wordIndex_.find(token);
  return it == wordIndex_.end() ? kUnknownWord : it->second;
}

std::vector<int> Vocabulary::wordIds(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(wordId(t));
  return ids;
}

std::vector<std::vector<int>> Vocabulary::charIds(const std::vector<std::string>& tokens) const {
  std::vector<std::vector<int>> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::vector<int> ids;
    ids.reserve(t.size());
    for (char ch : t) {
      auto it = charIndex_.find(std::string(1, ch));
      ids.push_back(it == charIndex_.end() ? kUnknownChar : it->second);
    }
    out.push_back(std::move(ids));
  }
  return out;
}

void addBiGruParameters(ParameterStore& store, const std::string& prefix, std::size_t inputDim,
                        std::size_t hiddenDim, Rng& rng) {
  for (const char* dir : {".fwd", ".bwd"}) {
    const std::string p = prefix + dir;
    store.addGlorot(p + ".wx", inputDim, 3 * hiddenDim, rng);
    store.addGlorot(p + ".wh", hiddenDim, 3 * hiddenDim, rng);
    store.addZeros(p + ".b", 1, 3 * hiddenDim);
  }
}

Model buildModel(const EncoderConfig& config, Vocabulary vocab, std::uint64_t seed) {
  config.validate();
  Model m{config, std::move(vocab), {}};
  Rng rng(seed);
  const std::size_t d = config.hiddenDim;
  const std::size_t r = config.contextWidth();
  auto& s = m.params;
  s.addGlorot("emb.word", m.vocab.wordCount(), config.wordDim, rng);
  s.addGlorot("emb.char", m.vocab.charCount(), config.charDim, rng);
  s.addGlorot("emb.char_conv.w", config.charConvWidth * config.charDim, config.charOutDim, rng);
  s.addZeros("emb.char_conv.b", 1, config.charOutDim);
  const std::size_t embedded = config.wordDim + config.charOutDim;
  addBiGruParameters(s, "ctx.paragraph", embedded, d, rng);
  addBiGruParameters(s, "ctx.question", embedded, d, rng);
  s.addGlorot("bidaf.w_p", 2 * d, 1, rng);
  s.addGlorot("bidaf.w_q", 2 * d, 1, rng);
  s.addGlorot("bidaf.w_pq", 1, 2 * d, rng);
  addBiGruParameters(s, "self_attn", 8 * d, d, rng);
  addBiGruParameters(s, "span.start", r, d, rng);
  s.addGlorot("span.start.w", 2 * d, 1, rng);
  addBiGruParameters(s, "span.end", r + 2 * d + 1, d, rng);
  s.addGlorot("span.end.w", 2 * d, 1, rng);
  addBiGruParameters(s, "quality", r, d, rng);
  s.addGlorot("quality.w", 2 * d, 1, rng);
  return m;
}

std::size_t loadWordVectors(Model& model, const std::string& path, bool freeze) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word vectors " + path);
  auto& entry = model.params.at("emb.word");
  const std::size_t dim = entry.value.cols();
  std::size_t replaced = 0;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;
    std::vector<double> values;
    double v;
    while (ss >> v) values.push_back(v);
    if (values.size() != dim) {
      throw Error(path + ":" + std::to_string(lineNo) + ": expected " + std::to_string(dim) +
                  " values, got " + std::to_string(values.size()));
    }
    const int id = model.vocab.wordId(token);
    if (id == Vocabulary::kUnknownWord && token != "<unk>") continue;
    std::copy(values.begin(), values.end(), entry.value.row(static_cast<std::size_t>(id)).begin());
    ++replaced;
  }
  entry.frozen = freeze;
  return replaced;
}

}  // namespace hasqa
