#include "hasqa/config.hpp"

#include <fstream>
#include <set>

#include "hasqa/error.hpp"

namespace hasqa {
namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& obj, std::string what) : obj_(obj), what_(std::move(what)) {
    if (!obj_.is_object()) throw Error(what_ + " must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      target = it->get<T>();
    } catch (const json::exception&) {
      throw Error(what_ + ": field '" + key + "' has the wrong type");
    }
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) throw Error(what_ + ": unknown field '" + key + "'");
    }
  }

 private:
  const json& obj_;
  std::string what_;
  std::set<std::string> seen_;
};

json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("config " + path + ": " + e.what());
  }
}

}  // namespace

RunConfig runConfigFromJson(const json& obj) {
  RunConfig c;
  Reader r(obj, "config");
  r.read("word_dim", c.encoder.wordDim);
  r.read("char_dim", c.encoder.charDim);
  r.read("char_conv_width", c.encoder.charConvWidth);
  r.read("char_out_dim", c.encoder.charOutDim);
  r.read("hidden_dim", c.encoder.hiddenDim);
  r.read("keep_prob", c.encoder.keepProb);
  r.read("batch_size", c.train.batchSize);
  r.read("epochs", c.train.epochs);
  std::string mode(aggregationModeName(c.train.mode));
  r.read("mode", mode);
  c.train.mode = parseAggregationMode(mode);
  r.read("k1", c.train.k1);
  r.read("k2", c.train.k2);
  r.read("seed", c.train.seed);
  r.read("rho", c.train.optimizer.rho);
  r.read("eps", c.train.optimizer.eps);
  r.read("learning_rate", c.train.optimizer.learningRate);
  r.read("oracle_cap", c.train.oracleCap);
  r.read("quality_grad_through_start", c.train.qualityGradThroughStart);
  r.read("prob_floor", c.train.probFloor);
  r.read("max_paragraphs", c.limits.maxParagraphs);
  r.read("max_tokens", c.limits.maxParagraphTokens);
  r.read("threads", c.threads);
  r.read("word_vectors", c.wordVectors);
  r.read("freeze_word_vectors", c.freezeWordVectors);
  r.finish();
  c.encoder.validate();
  c.train.validate();
  return c;
}

json runConfigToJson(const RunConfig& c) {
  json obj;
  obj["word_dim"] = c.encoder.wordDim;
  obj["char_dim"] = c.encoder.charDim;
  obj["char_conv_width"] = c.encoder.charConvWidth;
  obj["char_out_dim"] = c.encoder.charOutDim;
  obj["hidden_dim"] = c.encoder.hiddenDim;
  obj["keep_prob"] = c.encoder.keepProb;
  obj["batch_size"] = c.train.batchSize;
  obj["epochs"] = c.train.epochs;
  obj["mode"] = std::string(aggregationModeName(c.train.mode));
  obj["k1"] = c.train.k1;
  obj["k2"] = c.train.k2;
  obj["seed"] = c.train.seed;
  obj["rho"] = c.train.optimizer.rho;
  obj["eps"] = c.train.optimizer.eps;
  obj["learning_rate"] = c.train.optimizer.learningRate;
  obj["oracle_cap"] = c.train.oracleCap;
  obj["quality_grad_through_start"] = c.train.qualityGradThroughStart;
  obj["prob_floor"] = c.train.probFloor;
  obj["max_paragraphs"] = c.limits.maxParagraphs;
  obj["max_tokens"] = c.limits.maxParagraphTokens;
  obj["threads"] = c.threads;
  obj["word_vectors"] = c.wordVectors;
  obj["freeze_word_vectors"] = c.freezeWordVectors;
  return obj;
}

RunConfig loadRunConfig(const std::string& path) { return runConfigFromJson(readJsonFile(path)); }

SyntheticConfig syntheticConfigFromJson(const json& obj) {
  SyntheticConfig c;
  Reader r(obj, "synthetic config");
  r.read("num_examples", c.numExamples);
  r.read("vocab_size", c.vocabSize);
  r.read("paragraphs_per_question", c.paragraphsPerQuestion);
  r.read("paragraph_len", c.paragraphLen);
  r.read("distractor_ratio", c.distractorRatio);
  r.read("multi_span_prob", c.multiSpanProb);
  r.read("min_occurrences", c.minOccurrences);
  r.read("max_occurrences", c.maxOccurrences);
  r.read("seed", c.seed);
  r.finish();
  return c;
}

json syntheticConfigToJson(const SyntheticConfig& c) {
  json obj;
  obj["num_examples"] = c.numExamples;
  obj["vocab_size"] = c.vocabSize;
  obj["paragraphs_per_question"] = c.paragraphsPerQuestion;
  obj["paragraph_len"] = c.paragraphLen;
  obj["distractor_ratio"] = c.distractorRatio;
  obj["multi_span_prob"] = c.multiSpanProb;
  obj["min_occurrences"] = c.minOccurrences;
  obj["max_occurrences"] = c.maxOccurrences;
  obj["seed"] = c.seed;
  return obj;
}

SyntheticConfig loadSyntheticConfig(const std::string& path) {
  return syntheticConfigFromJson(readJsonFile(path));
}

}  // namespace hasqa
