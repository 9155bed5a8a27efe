#include "shortmk/accounting.hpp"

#include <algorithm>
#include <stdexcept>

namespace shortmk {

void CostCut::validate() const {
  if (!durations.empty() && durations.size() != lengths.size())
    throw std::invalid_argument("durations must match lengths in size");
  if (cut_tokens) {
    if (*cut_tokens < 0) throw std::invalid_argument("cut_tokens must be >= 0");
    std::int64_t max_len = 0;
    for (std::int64_t l : lengths) max_len = std::max(max_len, l);
    if (!lengths.empty() && *cut_tokens > max_len)
      throw std::invalid_argument("cut_tokens exceeds the longest stream");
  }
}

std::int64_t compute_with_cut(std::span<const std::int64_t> lengths,
                              std::optional<std::int64_t> cut) {
  std::int64_t total = 0;
  for (std::int64_t l : lengths) total += cut ? std::min(l, *cut) : l;
  return total;
}

double time_with_cut(std::span<const std::int64_t> lengths, std::span<const double> durations,
                     std::optional<std::size_t> cut_index) {
  if (!durations.empty() && durations.size() != lengths.size())
    throw std::invalid_argument("durations must match lengths in size");
  if (cut_index && *cut_index >= lengths.size())
    throw std::invalid_argument("cut_index out of range");
  if (!durations.empty()) {
    if (cut_index) return durations[*cut_index];
    double max_d = 0.0;
    for (double d : durations) max_d = std::max(max_d, d);
    return max_d;
  }
  if (cut_index) return static_cast<double>(lengths[*cut_index]);
  std::int64_t max_len = 0;
  for (std::int64_t l : lengths) max_len = std::max(max_len, l);
  return static_cast<double>(max_len);
}

std::size_t order_statistic_index(std::span<const std::int64_t> lengths, int m) {
  if (m < 1 || static_cast<std::size_t>(m) > lengths.size())
    throw std::invalid_argument("order statistic out of range");
  std::vector<std::size_t> idx(lengths.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::nth_element(idx.begin(), idx.begin() + (m - 1), idx.end(),
                   [&](std::size_t a, std::size_t b) {
                     return lengths[a] != lengths[b] ? lengths[a] < lengths[b] : a < b;
                   });
  return idx[m - 1];
}

}  // namespace shortmk
