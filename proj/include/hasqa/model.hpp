#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hasqa/corpus.hpp"
#include "hasqa/params.hpp"

namespace hasqa {

/// Dimensions of the question-aware context encoder. The context width
/// r equals 2·hiddenDim; every recurrent block in the model uses hiddenDim.
struct EncoderConfig {
  std::size_t wordDim = 64;
  std::size_t charDim = 20;
  std::size_t charConvWidth = 3;
  std::size_t charOutDim = 16;
  std::size_t hiddenDim = 32;
  double keepProb = 0.8;

  std::size_t contextWidth() const { return 2 * hiddenDim; }
  void validate() const;
};

/// Word and character vocabularies. Word id 0 is the shared unknown row;
/// char id 0 is padding and id 1 the unknown character.
class Vocabulary {
 public:
  static constexpr int kUnknownWord = 0;
  static constexpr int kPadChar = 0;
  static constexpr int kUnknownChar = 1;

  Vocabulary();
  static Vocabulary fromDataset(const Dataset& dataset);
  static Vocabulary fromLists(std::vector<std::string> words, std::vector<std::string> chars);

  int wordId(const std::string& token) const;
  std::vector<int> wordIds(const std::vector<std::string>& tokens) const;
  std::vector<std::vector<int>> charIds(const std::vector<std::string>& tokens) const;

  std::size_t wordCount() const { return words_.size(); }
  std::size_t charCount() const { return chars_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& chars() const { return chars_; }

 private:
  void addWord(const std::string& w);
  void addChar(const std::string& c);

  std::vector<std::string> words_;
  std::vector<std::string> chars_;
  std::map<std::string, int> wordIndex_;
  std::map<std::string, int> charIndex_;
};

/// Parameters, vocabulary and encoder shape of one model instance.
struct Model {
  EncoderConfig encoder;
  Vocabulary vocab;
  ParameterStore params;
};

/// Creates every parameter with Glorot-uniform matrices and zero biases.
Model buildModel(const EncoderConfig& config, Vocabulary vocab, std::uint64_t seed);

/// Adds a bidirectional GRU's six tensors under `prefix`.fwd / `prefix`.bwd.
void addBiGruParameters(ParameterStore& store, const std::string& prefix, std::size_t inputDim,
                        std::size_t hiddenDim, Rng& rng);

/// Overwrites word-embedding rows from a text file of "token v1 v2 ...".
/// Returns the number of rows replaced; a row of the wrong width is rejected.
std::size_t loadWordVectors(Model& model, const std::string& path, bool freeze);

}  // namespace hasqa
