#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hasqa {

/// Answer normalization shared by EM and F1: lowercase, drop punctuation,
/// drop the articles a/an/the, collapse whitespace.
std::string normalizeAnswer(std::string_view text);

/// 1 when the normalized prediction equals any normalized gold, else 0.
int exactMatch(std::string_view prediction, const std::vector<std::string>& golds);

/// Bag-of-tokens F1 against each gold, maximized over golds.
double tokenF1(std::string_view prediction, const std::vector<std::string>& golds);

/// Average precision of `scores` (higher ranks first; ties keep list order)
/// against binary relevance. Returns NaN when nothing is relevant.
double averagePrecision(std::span<const double> scores, const std::vector<bool>& relevant);

}  // namespace hasqa
