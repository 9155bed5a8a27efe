#pragma once

// Brute-force reference computations used by the unit and acceptance suites.
// Everything here enumerates or simulates literally and stays independent of
// the library's closed forms and fast paths.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

// Visits every k-subset of {0..n-1} in lexicographic order.
inline void for_each_subset(int n, int k,
                            const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      visit(idx);
      return;
    }
    for (int v = start; v <= n - (k - depth); ++v) {
      idx[static_cast<std::size_t>(depth)] = v;
      rec(v + 1, depth + 1);
    }
  };
  rec(0, 0);
}

// Fraction of k-subsets containing at least one of the first c items.
inline double pass_at_k_enum(int n, int c, int k) {
  std::int64_t hits = 0, total = 0;
  for_each_subset(n, k, [&](const std::vector<int>& idx) {
    ++total;
    for (int v : idx)
      if (v < c) {
        ++hits;
        return;
      }
  });
  return static_cast<double>(hits) / static_cast<double>(total);
}

// Mean correctness of the first (shortest) element over all k-subsets, for a
// correctness vector already in ascending length order.
inline double rank_score_enum(const std::vector<char>& correct, int k) {
  std::int64_t hits = 0, total = 0;
  for_each_subset(static_cast<int>(correct.size()), k, [&](const std::vector<int>& idx) {
    ++total;
    if (correct[static_cast<std::size_t>(idx.front())]) ++hits;
  });
  return static_cast<double>(hits) / static_cast<double>(total);
}

struct SimResult {
  std::int64_t compute = 0;
  double time = 0.0;
};

// Token-clock simulation: every stream emits one token per tick until the
// stop condition fires at the end of a tick.
inline SimResult clock_shortest_m(const std::vector<std::int64_t>& lengths, int m) {
  SimResult r;
  std::int64_t tick = 0;
  for (;;) {
    ++tick;
    int completed = 0;
    for (std::int64_t len : lengths) {
      if (tick <= len) r.compute += 1;
      if (len <= tick) ++completed;
    }
    if (completed >= m) {
      r.time = static_cast<double>(tick);
      return r;
    }
  }
}

inline SimResult clock_majority(const std::vector<std::int64_t>& lengths) {
  return clock_shortest_m(lengths, static_cast<int>(lengths.size()));
}

inline SimResult clock_oracle(const std::vector<std::int64_t>& lengths,
                              const std::vector<char>& correct) {
  SimResult r;
  std::int64_t tick = 0;
  std::size_t done = 0;
  for (;;) {
    ++tick;
    bool stop = false;
    done = 0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (tick <= lengths[i]) r.compute += 1;
      if (lengths[i] <= tick) {
        ++done;
        if (correct[i]) stop = true;
      }
    }
    if (stop || done == lengths.size()) {
      r.time = static_cast<double>(tick);
      return r;
    }
  }
}

// Plain-map majority vote with deterministic shortest tie break, for
// cross-checking subset evaluation on fixtures where the baseline also uses
// the shortest policy. Candidates are (answer-or-empty, length) in ascending
// (length, sample) order; empty string stands for "no answer".
inline std::string vote_shortest(const std::vector<std::pair<std::string, std::int64_t>>& cands) {
  std::map<std::string, int> counts;
  for (const auto& [ans, len] : cands) counts[ans]++;
  int best = 0;
  for (const auto& [ans, cnt] : counts) best = std::max(best, cnt);
  for (const auto& [ans, len] : cands)
    if (counts[ans] == best) return ans;  // first in order = shortest representative
  return cands.front().first;
}

}  // namespace oracle
