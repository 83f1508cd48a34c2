#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hasqa/corpus.hpp"
#include "hasqa/graph.hpp"
#include "hasqa/rng.hpp"
#include "hasqa/span_decoder.hpp"

namespace hasqa {

/// How the span probabilities of one answer string in one paragraph combine:
/// the first match, a seeded random match, the maximum, or the sum.
enum class AggregationMode { Head, Rand, Max, Sum };

AggregationMode parseAggregationMode(std::string_view name);
std::string_view aggregationModeName(AggregationMode mode);

/// `spanProbs` must be nonempty and in document order. RAND consumes one draw from rng.
double aggregate(std::span<const double> spanProbs, AggregationMode mode, Rng& rng);

/// Differentiable counterpart over 1×1 graph scalars, used by the training loss.
Var aggregate(Graph& g, std::span<const Var> spanProbs, AggregationMode mode, Rng& rng);

struct AnswerGroup {
  std::string answerText;             // normalized answer string
  std::vector<SpanCandidate> spans;   // document order
  double aggregatedProb = 0.0;
};

/// Groups candidates by normalized span text and aggregates each group.
/// Groups come back sorted by answer text; spans within a group by (start, end).
std::vector<AnswerGroup> groupCandidates(std::vector<SpanCandidate> candidates,
                                         const Paragraph& paragraph, AggregationMode mode,
                                         Rng& rng);

}  // namespace hasqa
