#include "hasqa/aggregation.hpp"

#include <algorithm>
#include <map>

#include "hasqa/error.hpp"

namespace hasqa {

AggregationMode parseAggregationMode(std::string_view name) {
  if (name == "head") return AggregationMode::Head;
  if (name == "rand") return AggregationMode::Rand;
  if (name == "max") return AggregationMode::Max;
  if (name == "sum") return AggregationMode::Sum;
  throw Error("unknown aggregation mode '" + std::string(name) + "' (expected head|rand|max|sum)");
}

std::string_view aggregationModeName(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::Head: return "head";
    case AggregationMode::Rand: return "rand";
    case AggregationMode::Max: return "max";
    case AggregationMode::Sum: return "sum";
  }
  return "max";
}

double aggregate(std::span<const double> spanProbs, AggregationMode mode, Rng& rng) {
  if (spanProbs.empty()) throw Error("aggregate: empty span list");
  switch (mode) {
    case AggregationMode::Head: return spanProbs.front();
    case AggregationMode::Rand: return spanProbs[rng.below(spanProbs.size())];
    case AggregationMode::Max: return *std::max_element(spanProbs.begin(), spanProbs.end());
    case AggregationMode::Sum: {
      double total = 0.0;
      for (double p : spanProbs) total += p;
      return total;
    }
  }
  return 0.0;
}

Var aggregate(Graph& g, std::span<const Var> spanProbs, AggregationMode mode, Rng& rng) {
  if (spanProbs.empty()) throw Error("aggregate: empty span list");
  switch (mode) {
    case AggregationMode::Head: return spanProbs.front();
    case AggregationMode::Rand: return spanProbs[rng.below(spanProbs.size())];
    case AggregationMode::Max:
      return spanProbs.size() == 1 ? spanProbs.front() : g.rowMax(g.stack(spanProbs));
    case AggregationMode::Sum:
      return spanProbs.size() == 1 ? spanProbs.front() : g.sum(g.stack(spanProbs));
  }
  return spanProbs.front();
}

std::vector<AnswerGroup> groupCandidates(std::vector<SpanCandidate> candidates,
                                         const Paragraph& paragraph, AggregationMode mode,
                                         Rng& rng) {
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  std::map<std::string, AnswerGroup> byKey;
  for (auto& c : candidates) {
    const std::string key = normalizedSpanText(paragraph.tokens, c.start, c.end);
    auto& group = byKey[key];
    group.answerText = key;
    group.spans.push_back(std::move(c));
  }
  std::vector<AnswerGroup> out;
  out.reserve(byKey.size());
  std::vector<double> probs;
  for (auto& [_, group] : byKey) {
    probs.clear();
    for (const auto& s : group.spans) probs.push_back(s.spanProb);
    group.aggregatedProb = aggregate(probs, mode, rng);
    out.push_back(std::move(group));
  }
  return out;
}

}  // namespace hasqa
