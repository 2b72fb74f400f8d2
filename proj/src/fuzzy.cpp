// SPDX-License-Identifier: Apache-2.0
#include "delta_lca/fuzzy.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace delta_lca::fuzzy {

std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char ch : s) {
        if (std::isalnum(ch)) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            out += static_cast<char>(std::tolower(ch));
        } else if (std::isspace(ch)) {
            pending_space = true;
        }
    }
    return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
            diag = up;
        }
    }
    return row[b.size()];
}

double similarity(std::string_view a, std::string_view b) {
    const std::string na = normalize(a);
    const std::string nb = normalize(b);
    const std::size_t longest = std::max(na.size(), nb.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(na, nb)) / static_cast<double>(longest);
}

namespace {

std::size_t common_prefix(std::string_view a, std::string_view b) {
    std::size_t n = 0;
    while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
    return n;
}

}  // namespace

std::optional<Match> best_match(std::string_view query, std::span<const std::string> candidates, double threshold) {
    const std::string nq = normalize(query);
    std::optional<Match> best;
    std::size_t best_prefix = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double score = similarity(query, candidates[i]);
        if (score < threshold) continue;
        const std::size_t prefix = common_prefix(nq, normalize(candidates[i]));
        bool better = !best;
        if (best) {
            if (score != best->score) {
                better = score > best->score;
            } else if (prefix != best_prefix) {
                better = prefix > best_prefix;
            } else {
                better = candidates[i] < candidates[best->index];
            }
        }
        if (better) {
            best = Match{i, score};
            best_prefix = prefix;
        }
    }
    return best;
}

}  // namespace delta_lca::fuzzy
