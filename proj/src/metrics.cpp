#include "hasqa/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "hasqa/error.hpp"

namespace hasqa {
namespace {

std::vector<std::string> answerTokens(std::string_view text) {
  std::istringstream ss(normalizeAnswer(text));
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

}  // namespace

std::string normalizeAnswer(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::ispunct(u)) continue;
    cleaned.push_back(static_cast<char>(std::tolower(u)));
  }
  std::istringstream ss(cleaned);
  std::string out, word;
  while (ss >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

int exactMatch(std::string_view prediction, const std::vector<std::string>& golds) {
  const std::string p = normalizeAnswer(prediction);
  for (const auto& g : golds) {
    if (normalizeAnswer(g) == p) return 1;
  }
  return 0;
}

double tokenF1(std::string_view prediction, const std::vector<std::string>& golds) {
  const auto pred = answerTokens(prediction);
  double best = 0.0;
  for (const auto& gold : golds) {
    const auto ref = answerTokens(gold);
    if (pred.empty() || ref.empty()) {
      best = std::max(best, pred.empty() && ref.empty() ? 1.0 : 0.0);
      continue;
    }
    std::map<std::string, int> counts;
    for (const auto& t : ref) ++counts[t];
    int common = 0;
    for (const auto& t : pred) {
      auto it = counts.find(t);
      if (it != counts.end() && it->second > 0) {
        --it->second;
        ++common;
      }
    }
    if (common == 0) continue;
    const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
    const double recall = static_cast<double>(common) / static_cast<double>(ref.size());
    best = std::max(best, 2.0 * precision * recall / (precision + recall));
  }
  return best;
}

double averagePrecision(std::span<const double> scores, const std::vector<bool>& relevant) {
  if (scores.size() != relevant.size()) {
    throw Error("averagePrecision: " + std::to_string(scores.size()) + " scores for " +
                std::to_string(relevant.size()) + " labels");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double hits = 0.0, sum = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (!relevant[order[rank]]) continue;
    hits += 1.0;
    sum += hits / static_cast<double>(rank + 1);
  }
  if (hits == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sum / hits;
}

}  // namespace hasqa
