#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shortmk {

// Halt-point cost model shared by all methods: once a run is cut at L
// tokens, each of the k parallel streams has spent min(length_i, L) thinking
// tokens, and the elapsed time is that of the cut stream.

struct CostCut {
  std::vector<std::int64_t> lengths;
  std::vector<double> durations;            // empty = token proxy
  std::optional<std::int64_t> cut_tokens;   // nullopt = all streams complete

  void validate() const;  // throws std::invalid_argument
};

// Sum of min(length_i, cut); plain sum when cut is absent.
std::int64_t compute_with_cut(std::span<const std::int64_t> lengths,
                              std::optional<std::int64_t> cut);

// Time of the stream at cut_index (max over all streams when absent).
// Durations, when non-empty, must match lengths in size; otherwise token
// lengths serve as the time proxy at an assumed constant decode rate.
double time_with_cut(std::span<const std::int64_t> lengths,
                     std::span<const double> durations,
                     std::optional<std::size_t> cut_index);

// Index of the m-th smallest stream by (length, position), m is 1-based.
std::size_t order_statistic_index(std::span<const std::int64_t> lengths, int m);

}  // namespace shortmk
