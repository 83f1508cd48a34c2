#include "hasqa/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hasqa/error.hpp"
#include "hasqa/metrics.hpp"
#include "json.hpp"

namespace hasqa {

void TrainConfig::validate() const {
  if (batchSize == 0) throw Error("batch_size must be positive");
  if (k1 == 0 || k2 == 0) throw Error("k1 and k2 must be positive");
  if (!(optimizer.rho > 0.0 && optimizer.rho < 1.0)) throw Error("rho must be in (0, 1)");
  if (!(optimizer.eps > 0.0)) throw Error("eps must be positive");
  if (!(optimizer.learningRate > 0.0)) throw Error("learning_rate must be positive");
  if (!(probFloor > 0.0)) throw Error("prob_floor must be positive");
}

InferenceConfig inferenceConfig(const TrainConfig& config) {
  return {config.k1, config.k2, config.mode, config.seed};
}

std::uint64_t stableHash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

LossTerms exampleLoss(Graph& g, const Model& model, const QAExample& example,
                      const Paragraph& positive, const Paragraph* negative,
                      const TrainConfig& config, Rng& rng, const Pass& pass) {
  if (positive.labels.empty()) {
    throw Error("exampleLoss: positive paragraph " + positive.id + " of example " + example.id +
                " has no labels");
  }
  const Var question = encodeQuestion(g, model, example.question, pass);
  const ContextEmbedding context = encodeParagraph(g, model, question, positive.tokens, pass);
  const StartDistribution sd = startDistribution(g, model, context);

  std::map<std::size_t, Var> endByStart;
  std::vector<Var> spans;
  spans.reserve(positive.labels.size());
  for (const SpanLabel& label : positive.labels) {
    auto it = endByStart.find(label.start);
    if (it == endByStart.end()) {
      it = endByStart.emplace(label.start, endDistribution(g, model, context, sd, label.start)).first;
    }
    const Var startProb = g.element(sd.probs, 0, label.start);
    const Var endProb = g.element(it->second, 0, label.end);
    spans.push_back(g.mul(startProb, endProb));
  }
  const Var answerProb = aggregate(g, spans, config.mode, rng);
  Var loss = g.scale(g.logFloor(answerProb, config.probFloor), -1.0);
  double paragraphProb = 1.0;

  if (negative) {
    const Var qPos = qualityLogit(g, model, context, sd, config.qualityGradThroughStart);
    const ContextEmbedding negContext = encodeParagraph(g, model, question, negative->tokens, pass);
    const StartDistribution negStart = startDistribution(g, model, negContext);
    const Var qNeg = qualityLogit(g, model, negContext, negStart, config.qualityGradThroughStart);
    const std::array<Var, 2> logits{qPos, qNeg};
    const Var q = g.element(g.rowSoftmax(g.stack(logits)), 0, 0);
    paragraphProb = g.value(q)[0];
    loss = g.sub(loss, g.logFloor(q, config.probFloor));
  }
  if (!std::isfinite(g.value(loss)[0])) {
    throw Error("non-finite loss for example " + example.id);
  }
  return {loss, g.value(answerProb)[0], paragraphProb};
}

namespace {

struct PlannedStep {
  std::size_t example = 0;
  std::size_t positive = 0;
  // Negative paragraph: (example index, paragraph index), or none.
  std::optional<std::pair<std::size_t, std::size_t>> negative;
  Rng rng;
};

struct StepResult {
  double loss = 0.0;
  GradientMap grads;
};

}  // namespace

EpochResult trainEpoch(const Dataset& dataset, Model& model, const TrainConfig& config,
                       std::size_t epoch) {
  config.validate();
  EpochResult result;
  const Rng root(config.seed);
  Rng orderRng = root.fork(0x0DE5'0000'0000ULL + epoch);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  orderRng.shuffle(order);

  double lossSum = 0.0;
  std::size_t lossCount = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += config.batchSize) {
    const std::size_t end = std::min(order.size(), begin + config.batchSize);
    std::vector<PlannedStep> plan;
    for (std::size_t b = begin; b < end; ++b) {
      const std::size_t idx = order[b];
      const QAExample& ex = dataset[idx];
      Rng rng = root.fork((static_cast<std::uint64_t>(epoch) << 32) ^ idx);
      auto pair = samplePair(ex, rng);
      if (!pair) {
        ++result.skippedExamples;
        continue;
      }
      PlannedStep step{idx, pair->positive, std::nullopt, rng};
      if (pair->negative) {
        step.negative = std::make_pair(idx, *pair->negative);
      } else {
        std::vector<std::pair<std::size_t, std::size_t>> pool;
        for (std::size_t o = begin; o < end; ++o) {
          const std::size_t other = order[o];
          if (other == idx) continue;
          const auto& paragraphs = dataset[other].paragraphs;
          for (std::size_t p = 0; p < paragraphs.size(); ++p) {
            if (labelSpans(paragraphs[p], ex.answers).empty()) pool.emplace_back(other, p);
          }
        }
        if (!pool.empty()) {
          step.negative = pool[step.rng.below(pool.size())];
          ++result.borrowedNegatives;
        }
      }
      plan.push_back(std::move(step));
    }
    if (plan.empty()) continue;

    std::vector<StepResult> results(plan.size());
    std::vector<std::string> errors(plan.size());
    const auto count = static_cast<std::ptrdiff_t>(plan.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      auto& step = plan[static_cast<std::size_t>(i)];
      try {
        const QAExample& ex = dataset[step.example];
        const Paragraph* negative =
            step.negative ? &dataset[step.negative->first].paragraphs[step.negative->second]
                          : nullptr;
        Rng dropoutRng = step.rng.fork(1);
        Rng aggregateRng = step.rng.fork(2);
        Graph g;
        const Pass pass{true, &dropoutRng};
        const LossTerms terms = exampleLoss(g, model, ex, ex.paragraphs[step.positive], negative,
                                            config, aggregateRng, pass);
        g.backward(terms.loss);
        results[static_cast<std::size_t>(i)] = {g.value(terms.loss)[0], g.parameterGradients()};
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw Error(e);
    }
    const double scale = 1.0 / static_cast<double>(results.size());
    model.params.zeroGrad();
    for (const auto& r : results) {
      lossSum += r.loss;
      ++lossCount;
      model.params.accumulate(r.grads, scale);
    }
    adadeltaStep(model.params, config.optimizer);
    ++result.steps;
  }
  if (lossCount > 0) result.meanLoss = lossSum / static_cast<double>(lossCount);
  return result;
}

std::vector<SpanCandidate> beamSearch(const Tensor& startProbs,
                                      const std::function<Tensor(std::size_t)>& endDistribution,
                                      std::size_t k1, std::size_t k2) {
  if (k1 == 0 || k2 == 0) throw Error("beamSearch: k1 and k2 must be positive");
  const std::size_t n = startProbs.size();
  auto topIndices = [](const Tensor& probs, std::size_t from, std::size_t k) {
    std::vector<std::size_t> idx(probs.size() - from);
    std::iota(idx.begin(), idx.end(), from);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
    idx.resize(std::min(k, idx.size()));
    return idx;
  };
  std::vector<SpanCandidate> out;
  for (std::size_t s : topIndices(startProbs, 0, k1)) {
    const Tensor ends = endDistribution(s);
    if (ends.size() != n) throw Error("beamSearch: end distribution has the wrong length");
    for (std::size_t e : topIndices(ends, s, k2)) {
      SpanCandidate c;
      c.start = s;
      c.end = e;
      c.startProb = startProbs[s];
      c.endProb = ends[e];
      c.spanProb = c.startProb * c.endProb;
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<SpanCandidate> beamCandidates(Graph& g, const Model& model,
                                          const ContextEmbedding& context,
                                          const StartDistribution& startDist,
                                          const Paragraph& paragraph, std::size_t k1,
                                          std::size_t k2) {
  const Tensor startProbs = g.value(startDist.probs);
  auto out = beamSearch(
      startProbs,
      [&](std::size_t s) { return g.value(endDistribution(g, model, context, startDist, s)); }, k1,
      k2);
  for (auto& c : out) c.answerText = paragraph.rawSpan(c.start, c.end);
  return out;
}

Prediction predict(const QAExample& example, const Model& model, const InferenceConfig& config) {
  if (example.paragraphs.empty()) throw Error("predict: example " + example.id + " has no paragraphs");
  if (config.k1 == 0 || config.k2 == 0) throw Error("predict: k1 and k2 must be positive");
  Graph g(false);
  const Pass pass{};
  Rng rng = Rng(config.seed).fork(stableHash(example.id));
  const Var question = encodeQuestion(g, model, example.question, pass);

  Prediction pred;
  pred.exampleId = example.id;
  std::vector<double> logits;
  for (const auto& paragraph : example.paragraphs) {
    const ContextEmbedding context = encodeParagraph(g, model, question, paragraph.tokens, pass);
    const StartDistribution sd = startDistribution(g, model, context);
    ParagraphDiagnostics diag;
    diag.qualityLogit = g.value(qualityLogit(g, model, context, sd))[0];
    diag.groups = groupCandidates(
        beamCandidates(g, model, context, sd, paragraph, config.k1, config.k2), paragraph,
        config.mode, rng);
    logits.push_back(diag.qualityLogit);
    pred.paragraphs.push_back(std::move(diag));
  }
  const ParagraphScores scores = normalizeQualities(logits);
  pred.paragraphProbs = scores.probs;
  std::vector<std::vector<AnswerGroup>> groups;
  for (std::size_t i = 0; i < pred.paragraphs.size(); ++i) {
    pred.paragraphs[i].qualityProb = scores.probs[i];
    groups.push_back(pred.paragraphs[i].groups);
  }
  pred.answerScores = mixAnswerScores(scores.probs, groups);
  pred.bestAnswer = argmaxAnswer(pred.answerScores);
  return pred;
}

std::map<std::string, double> mixAnswerScores(
    std::span<const double> paragraphProbs, const std::vector<std::vector<AnswerGroup>>& groups) {
  if (paragraphProbs.size() != groups.size()) {
    throw Error("mixAnswerScores: " + std::to_string(paragraphProbs.size()) +
                " paragraph probabilities for " + std::to_string(groups.size()) + " paragraphs");
  }
  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (const auto& group : groups[i]) {
      scores[group.answerText] += paragraphProbs[i] * group.aggregatedProb;
    }
  }
  return scores;
}

std::string argmaxAnswer(const std::map<std::string, double>& scores) {
  std::string best;
  double bestScore = 0.0;
  bool first = true;
  for (const auto& [answer, score] : scores) {
    if (first || score > bestScore) {
      best = answer;
      bestScore = score;
      first = false;
    }
  }
  return best;
}

std::vector<Prediction> predictDataset(const Dataset& dataset, const Model& model,
                                       const InferenceConfig& config) {
  std::vector<Prediction> out(dataset.size());
  std::vector<std::string> errors(dataset.size());
  const auto count = static_cast<std::ptrdiff_t>(dataset.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = predict(dataset[static_cast<std::size_t>(i)], model, config);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(e);
  }
  return out;
}

std::vector<Prediction> predictDatasetSerial(const Dataset& dataset, const Model& model,
                                             const InferenceConfig& config) {
  std::vector<Prediction> out;
  out.reserve(dataset.size());
  for (const auto& ex : dataset) out.push_back(predict(ex, model, config));
  return out;
}

EvaluationReport evaluatePredictions(const std::vector<Prediction>& predictions,
                                     const Dataset& dataset) {
  if (dataset.empty()) throw Error("evaluate: empty dataset");
  std::map<std::string, const Prediction*> byId;
  for (const auto& p : predictions) byId[p.exampleId] = &p;
  EvaluationReport r;
  double apSum = 0.0;
  double lengthSum = 0.0;
  for (const auto& ex : dataset) {
    auto it = byId.find(ex.id);
    if (it == byId.end()) throw Error("evaluate: no prediction for example " + ex.id);
    const Prediction& p = *it->second;
    r.em += exactMatch(p.bestAnswer, ex.answers);
    r.f1 += tokenF1(p.bestAnswer, ex.answers);
    std::istringstream words(p.bestAnswer);
    std::string w;
    while (words >> w) lengthSum += 1.0;
    if (p.paragraphProbs.size() != ex.paragraphs.size()) {
      throw Error("evaluate: prediction " + ex.id + " has " +
                  std::to_string(p.paragraphProbs.size()) + " paragraph probabilities for " +
                  std::to_string(ex.paragraphs.size()) + " paragraphs");
    }
    std::vector<bool> relevant;
    for (const auto& para : ex.paragraphs) relevant.push_back(para.positive());
    const double ap = averagePrecision(p.paragraphProbs, relevant);
    if (!std::isnan(ap)) {
      apSum += ap;
      ++r.mapExamples;
    }
    ++r.n;
  }
  const auto n = static_cast<double>(r.n);
  r.em /= n;
  r.f1 /= n;
  r.avgAnswerLength = lengthSum / n;
  r.map = r.mapExamples ? apSum / static_cast<double>(r.mapExamples) : 0.0;
  return r;
}

EvaluationReport evaluateDataset(const Dataset& dataset, const Model& model,
                                 const InferenceConfig& config) {
  if (dataset.empty()) throw Error("evaluate: empty dataset");
  return evaluatePredictions(predictDataset(dataset, model, config), dataset);
}

double paragraphMAP(const Dataset& dataset, const Model& model, const InferenceConfig& config) {
  return evaluateDataset(dataset, model, config).map;
}

std::string predictionToJson(const Prediction& p) {
  nlohmann::ordered_json obj;
  obj["id"] = p.exampleId;
  obj["answer"] = p.bestAnswer;
  nlohmann::ordered_json scores = nlohmann::ordered_json::object();
  for (const auto& [answer, score] : p.answerScores) scores[answer] = score;
  obj["scores"] = std::move(scores);
  obj["paragraph_probs"] = p.paragraphProbs;
  return obj.dump();
}

Prediction predictionFromJson(const std::string& line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("malformed prediction: ") + e.what());
  }
  Prediction p;
  try {
    p.exampleId = obj.at("id").get<std::string>();
    p.bestAnswer = obj.at("answer").get<std::string>();
    for (const auto& [answer, score] : obj.at("scores").items()) {
      p.answerScores[answer] = score.get<double>();
    }
    p.paragraphProbs = obj.at("paragraph_probs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("prediction record: ") + e.what());
  }
  return p;
}

void writePredictions(const std::string& path, const std::vector<Prediction>& predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write predictions " + path);
  for (const auto& p : predictions) out << predictionToJson(p) << '\n';
}

std::vector<Prediction> readPredictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predictions " + path);
  std::vector<Prediction> out;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(predictionFromJson(line));
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return out;
}

std::string reportToJson(const EvaluationReport& r) {
  nlohmann::ordered_json obj;
  obj["em"] = r.em;
  obj["f1"] = r.f1;
  obj["map"] = r.map;
  obj["avg_answer_len"] = r.avgAnswerLength;
  obj["n"] = r.n;
  return obj.dump();
}

}  // namespace hasqa
