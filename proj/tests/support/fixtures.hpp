#pragma once

#include <string>
#include <vector>

#include "hasqa/corpus.hpp"
#include "hasqa/model.hpp"
#include "hasqa/rng.hpp"

namespace hasqa::testing {

inline EncoderConfig tinyEncoder(std::size_t hidden = 2) {
  EncoderConfig c;
  c.wordDim = 3;
  c.charDim = 2;
  c.charConvWidth = 3;
  c.charOutDim = 2;
  c.hiddenDim = hidden;
  c.keepProb = 1.0;
  return c;
}

inline const std::vector<std::string>& tinyWords() {
  static const std::vector<std::string> words{"camels", "store", "fat", "in", "their", "humps",
                                              "what", "do", "the", "lean", "body", "new",
                                              "york", "city", "a", "b", "c", "d"};
  return words;
}

/// Random paragraph of n tokens drawn from tinyWords().
inline std::vector<std::string> randomTokens(std::size_t n, Rng& rng) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(tinyWords()[rng.below(tinyWords().size())]);
  return out;
}

inline std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

inline Vocabulary tinyVocabulary() {
  QAExample ex;
  ex.question = tinyWords();
  return Vocabulary::fromDataset({ex});
}

/// Tiny model with every parameter drawn uniformly from [-scale, scale]
/// (biases included), so no gradient vanishes by construction.
inline Model tinyModel(std::uint64_t seed, std::size_t hidden = 2, double scale = 0.8) {
  Model m = buildModel(tinyEncoder(hidden), tinyVocabulary(), seed);
  Rng rng(seed ^ 0xABCDEFULL);
  for (auto& [_, e] : m.params.entries()) {
    for (std::size_t i = 0; i < e.value.size(); ++i) e.value[i] = rng.uniform(-scale, scale);
  }
  return m;
}

inline QAExample makeExample(std::string id, const std::vector<std::string>& question,
                             const std::vector<std::string>& answers,
                             const std::vector<std::vector<std::string>>& paragraphs) {
  QAExample ex;
  ex.id = std::move(id);
  ex.questionText = join(question);
  ex.question = question;
  ex.answers = answers;
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    ex.paragraphs.push_back(makeParagraph("p" + std::to_string(i), join(paragraphs[i]), answers));
  }
  return ex;
}

inline void setAll(Model& m, const std::string& name, double v) { m.params.at(name).value.fill(v); }

/// Zeroes every parameter whose name starts with `prefix`.
inline void zeroPrefix(Model& m, const std::string& prefix) {
  for (auto& [name, e] : m.params.entries()) {
    if (name.rfind(prefix, 0) == 0) e.value.fill(0.0);
  }
}

}  // namespace hasqa::testing
