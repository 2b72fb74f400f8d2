// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace delta_lca::fuzzy {

inline constexpr double kAcceptThreshold = 0.8;

/// Lowercase, drop punctuation, collapse runs of whitespace.
std::string normalize(std::string_view s);

std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - levenshtein / max(len) over normalized strings; 1.0 when both are empty.
double similarity(std::string_view a, std::string_view b);

struct Match {
    std::size_t index = 0;  // into the candidate list
    double score = 0.0;
};

/// Best candidate by similarity, ties broken by longer common prefix with the
/// query, then lexicographically smaller candidate. Nullopt below `threshold`.
std::optional<Match> best_match(std::string_view query, std::span<const std::string> candidates,
                                double threshold = kAcceptThreshold);

}  // namespace delta_lca::fuzzy
