#include "shortmk/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "shortmk/accounting.hpp"

namespace shortmk {

// --- pools -------------------------------------------------------------------

int RankedPool::c() const {
  return static_cast<int>(
      std::count_if(entries.begin(), entries.end(), [](const RankedEntry& e) { return e.correct; }));
}

static void sort_ranked(std::vector<RankedEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.think_tokens != b.think_tokens) return a.think_tokens < b.think_tokens;
    return a.sample_index < b.sample_index;
  });
}

RankedPool RankedPool::from_log(const QuestionLog& log) {
  std::vector<RankedEntry> entries;
  for (const GenerationRecord& g : log.generations) {
    if (!g.usable()) continue;
    RankedEntry e;
    e.think_tokens = g.think_tokens;
    e.sample_index = g.sample_index;
    e.correct = g.correct.value_or(false);
    e.answer = g.answer_extracted;
    e.duration_seconds = g.duration_seconds;
    entries.push_back(std::move(e));
  }
  sort_ranked(entries);
  return RankedPool{std::move(entries)};
}

RankedPool RankedPool::from_entries(std::vector<RankedEntry> entries) {
  sort_ranked(entries);
  return RankedPool{std::move(entries)};
}

// --- closed forms --------------------------------------------------------------

double pass_at_k(int n, int c, int k) {
  if (n < 0 || c < 0 || c > n || k < 1 || k > n)
    throw std::invalid_argument("pass_at_k requires 0 <= c <= n and 1 <= k <= n");
  if (n - c < k) return 1.0;
  double prod = 1.0;
  for (int i = 0; i < k; ++i)
    prod *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  return 1.0 - prod;
}

// Closed form over a correctness vector already in ascending-length order.
static double rank_score_sorted(const std::uint8_t* correct, int n, int k) {
  if (k < 1 || k > n) throw std::invalid_argument("rank_score_at_k requires 1 <= k <= n");
  double w = static_cast<double>(k) / static_cast<double>(n);  // C(n-1,k-1)/C(n,k)
  double acc = 0.0;
  for (int i = 1; i <= n; ++i) {
    if (correct[i - 1]) acc += w;
    if (i == n || w == 0.0) break;
    w *= static_cast<double>(n - i - k + 1) / static_cast<double>(n - i);
    if (w < 0.0) w = 0.0;
  }
  return acc;
}

double rank_score_at_k(const RankedPool& pool, int k) {
  std::vector<std::uint8_t> cor(pool.entries.size());
  for (std::size_t i = 0; i < pool.entries.size(); ++i) cor[i] = pool.entries[i].correct ? 1 : 0;
  return rank_score_sorted(cor.data(), pool.n(), k);
}

std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > cap) return cap;
  }
  return static_cast<std::uint64_t>(r);
}

// --- voting ----------------------------------------------------------------------

VoteResult majority_vote(std::span<const VoteCandidate> candidates, TieBreak tie_break,
                         Rng& rng) {
  if (candidates.empty()) throw std::invalid_argument("majority_vote: empty candidate list");

  struct Group {
    int count = 0;
    std::size_t first = 0;       // earliest candidate (min representative under list order)
    std::int64_t max_len = -1;   // maximal representative
    std::size_t max_at = 0;
  };
  // Keyed on the answer with nullopt as a distinct no-answer value; insertion
  // order tracked separately so Random stays deterministic under a seed.
  std::map<std::optional<std::string>, Group> groups;
  std::vector<const std::optional<std::string>*> order;

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(candidates[i].answer);
    Group& g = it->second;
    if (inserted) {
      g.first = i;
      order.push_back(&it->first);
    }
    g.count++;
    if (candidates[i].think_tokens > g.max_len) {
      g.max_len = candidates[i].think_tokens;
      g.max_at = i;
    }
  }

  int best_count = 0;
  for (const auto& [answer, g] : groups) best_count = std::max(best_count, g.count);
  std::vector<const std::optional<std::string>*> leaders;
  for (const auto* answer : order)
    if (groups[*answer].count == best_count) leaders.push_back(answer);

  const std::optional<std::string>* winner = nullptr;
  std::size_t rep = 0;
  switch (tie_break) {
    case TieBreak::Shortest: {
      // Candidates are assumed listed in ascending (think_tokens, sample)
      // order by the subset ops; first occurrence is the minimal rep. For
      // arbitrary orders, compare (length, position) explicitly.
      std::int64_t best_len = -1;
      std::size_t best_pos = 0;
      for (const auto* answer : leaders) {
        const Group& g = groups[*answer];
        std::int64_t len = candidates[g.first].think_tokens;
        std::size_t pos = g.first;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          if (candidates[i].answer != *answer) continue;
          if (candidates[i].think_tokens < len ||
              (candidates[i].think_tokens == len && i < pos)) {
            len = candidates[i].think_tokens;
            pos = i;
          }
        }
        if (!winner || len < best_len || (len == best_len && pos < best_pos)) {
          winner = answer;
          best_len = len;
          best_pos = pos;
          rep = pos;
        }
      }
      break;
    }
    case TieBreak::Longest: {
      std::int64_t best_len = -1;
      std::size_t best_pos = 0;
      for (const auto* answer : leaders) {
        const Group& g = groups[*answer];
        if (!winner || g.max_len > best_len || (g.max_len == best_len && g.max_at < best_pos)) {
          winner = answer;
          best_len = g.max_len;
          best_pos = g.max_at;
          rep = g.max_at;
        }
      }
      break;
    }
    case TieBreak::Random: {
      winner = leaders[rng.uniform_below(leaders.size())];
      rep = groups[*winner].first;
      break;
    }
  }

  VoteResult result;
  result.answer = *winner;
  result.think_tokens = candidates[rep].think_tokens;
  result.candidate_index = rep;
  result.correct = result.answer.has_value() && candidates[rep].correct;
  return result;
}

// --- per-subset outcomes ------------------------------------------------------------

namespace {

struct SubsetView {
  std::vector<std::size_t> sorted;  // positions ascending by (think_tokens, sample_index)
  std::vector<std::int64_t> lengths;  // in subset order
  std::vector<double> durations;      // empty unless every record has one
};

SubsetView make_view(std::span<const GenerationRecord> subset) {
  if (subset.empty()) throw std::invalid_argument("subset must be non-empty");
  SubsetView view;
  view.sorted.resize(subset.size());
  view.lengths.reserve(subset.size());
  bool all_durations = true;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (!subset[i].usable())
      throw std::invalid_argument("subset records must all have completed thinking");
    view.sorted[i] = i;
    view.lengths.push_back(subset[i].think_tokens);
    all_durations = all_durations && subset[i].duration_seconds.has_value();
  }
  if (all_durations)
    for (const GenerationRecord& g : subset) view.durations.push_back(*g.duration_seconds);
  std::sort(view.sorted.begin(), view.sorted.end(), [&](std::size_t a, std::size_t b) {
    if (subset[a].think_tokens != subset[b].think_tokens)
      return subset[a].think_tokens < subset[b].think_tokens;
    return subset[a].sample_index < subset[b].sample_index;
  });
  return view;
}

VoteResult vote_over(std::span<const GenerationRecord> subset, const SubsetView& view,
                     std::size_t take, TieBreak tie_break, Rng& rng) {
  std::vector<VoteCandidate> candidates;
  candidates.reserve(take);
  for (std::size_t j = 0; j < take; ++j) {
    const GenerationRecord& g = subset[view.sorted[j]];
    candidates.push_back({g.answer_extracted, g.think_tokens, g.correct.value_or(false)});
  }
  return majority_vote(candidates, tie_break, rng);
}

}  // namespace

SubsetOutcome shortest_m_outcome(std::span<const GenerationRecord> subset, int m,
                                 TieBreak tie_break, Rng& rng) {
  if (m < 1 || static_cast<std::size_t>(m) > subset.size())
    throw std::invalid_argument("shortest_m_outcome requires 1 <= m <= |subset|");
  SubsetView view = make_view(subset);
  VoteResult vote = vote_over(subset, view, static_cast<std::size_t>(m), tie_break, rng);

  std::size_t cut_pos = view.sorted[m - 1];
  SubsetOutcome out;
  out.method = Method::ShortestMAtK;
  out.chosen_answer = vote.answer;
  out.correct = vote.correct;
  out.compute_tokens = compute_with_cut(view.lengths, subset[cut_pos].think_tokens);
  out.time_proxy = time_with_cut(view.lengths, view.durations, cut_pos);
  return out;
}

SubsetOutcome majority_outcome(std::span<const GenerationRecord> subset, TieBreak tie_break,
                               Rng& rng) {
  SubsetView view = make_view(subset);
  VoteResult vote = vote_over(subset, view, subset.size(), tie_break, rng);

  SubsetOutcome out;
  out.method = Method::MajorityAtK;
  out.chosen_answer = vote.answer;
  out.correct = vote.correct;
  out.compute_tokens = compute_with_cut(view.lengths, std::nullopt);
  out.time_proxy = time_with_cut(view.lengths, view.durations, std::nullopt);
  return out;
}

SubsetOutcome oracle_outcome(std::span<const GenerationRecord> subset) {
  SubsetView view = make_view(subset);
  SubsetOutcome out;
  out.method = Method::OraclePassAtK;
  std::optional<std::size_t> cut_pos;
  for (std::size_t j = 0; j < view.sorted.size(); ++j) {
    const GenerationRecord& g = subset[view.sorted[j]];
    if (g.correct.value_or(false)) {
      cut_pos = view.sorted[j];
      break;
    }
  }
  if (cut_pos) {
    out.correct = true;
    out.chosen_answer = subset[*cut_pos].answer_extracted;
    out.compute_tokens = compute_with_cut(view.lengths, subset[*cut_pos].think_tokens);
    out.time_proxy = time_with_cut(view.lengths, view.durations, *cut_pos);
  } else {
    out.correct = false;
    out.compute_tokens = compute_with_cut(view.lengths, std::nullopt);
    out.time_proxy = time_with_cut(view.lengths, view.durations, std::nullopt);
  }
  return out;
}

// --- curve evaluation -----------------------------------------------------------------

namespace {

// Answer-interned, length-sorted usable pool for the enumeration hot path.
struct InternedPool {
  std::string question_id;
  std::vector<std::int64_t> len;  // ascending (think_tokens, sample_index)
  std::vector<std::int32_t> ans;  // 0 = no answer
  std::vector<std::uint8_t> cor;
  std::vector<double> dur;
  bool has_durations = false;
  int n = 0;
  int c = 0;
};

InternedPool intern_pool(const QuestionLog& log) {
  InternedPool pool;
  pool.question_id = log.question_id;
  RankedPool ranked = RankedPool::from_log(log);
  pool.n = ranked.n();
  pool.c = ranked.c();
  pool.has_durations =
      pool.n > 0 && std::all_of(ranked.entries.begin(), ranked.entries.end(),
                                [](const RankedEntry& e) { return e.duration_seconds.has_value(); });
  std::map<std::string, std::int32_t> ids;
  for (const RankedEntry& e : ranked.entries) {
    pool.len.push_back(e.think_tokens);
    pool.cor.push_back(e.correct ? 1 : 0);
    if (pool.has_durations) pool.dur.push_back(*e.duration_seconds);
    if (!e.answer) {
      pool.ans.push_back(0);
    } else {
      auto [it, inserted] = ids.try_emplace(*e.answer, static_cast<std::int32_t>(ids.size()) + 1);
      pool.ans.push_back(it->second);
    }
  }
  return pool;
}

struct VoteScratch {
  std::vector<int> count;
  std::vector<int> epoch;
  std::vector<int> first_pos;
  std::vector<std::int64_t> max_len;
  std::vector<int> max_pos;
  std::vector<std::int32_t> touched;
  int cur_epoch = 0;

  void ensure(std::size_t n_answers) {
    if (count.size() < n_answers) {
      count.resize(n_answers, 0);
      epoch.resize(n_answers, -1);
      first_pos.resize(n_answers, 0);
      max_len.resize(n_answers, 0);
      max_pos.resize(n_answers, 0);
    }
  }
};

// Winner's representative pool position for a vote over subset positions
// idx[0..cnt). Mirrors majority_vote exactly (pool order = candidate order).
int vote_interned(const InternedPool& pool, const int* idx, int cnt, TieBreak tie_break,
                  Rng& rng, VoteScratch& s) {
  s.cur_epoch++;
  s.touched.clear();
  int best_count = 0;
  for (int j = 0; j < cnt; ++j) {
    int p = idx[j];
    std::int32_t a = pool.ans[p];
    if (s.epoch[a] != s.cur_epoch) {
      s.epoch[a] = s.cur_epoch;
      s.count[a] = 0;
      s.first_pos[a] = p;
      s.max_len[a] = -1;
      s.touched.push_back(a);
    }
    s.count[a]++;
    best_count = std::max(best_count, s.count[a]);
    if (pool.len[p] > s.max_len[a]) {
      s.max_len[a] = pool.len[p];
      s.max_pos[a] = p;
    }
  }

  std::int32_t winner = -1;
  switch (tie_break) {
    case TieBreak::Shortest:
      for (std::int32_t a : s.touched)
        if (s.count[a] == best_count && (winner < 0 || s.first_pos[a] < s.first_pos[winner]))
          winner = a;
      return s.first_pos[winner];
    case TieBreak::Longest:
      for (std::int32_t a : s.touched)
        if (s.count[a] == best_count &&
            (winner < 0 || s.max_len[a] > s.max_len[winner] ||
             (s.max_len[a] == s.max_len[winner] && s.max_pos[a] < s.max_pos[winner])))
          winner = a;
      return s.max_pos[winner];
    case TieBreak::Random: {
      std::size_t n_leaders = 0;
      for (std::int32_t a : s.touched)
        if (s.count[a] == best_count) ++n_leaders;
      std::size_t pick = rng.uniform_below(n_leaders);
      for (std::int32_t a : s.touched) {
        if (s.count[a] != best_count) continue;
        if (pick-- == 0) return s.first_pos[a];
      }
      break;
    }
  }
  return s.first_pos[s.touched.front()];  // unreachable
}

struct SubsetEval {
  double correct = 0.0;
  double compute = 0.0;
  double time = 0.0;
};

SubsetEval eval_subset(const InternedPool& pool, const int* idx, int k, Method method,
                       int m_eff, TieBreak tie_break, Rng& rng, VoteScratch& scratch) {
  SubsetEval r;
  switch (method) {
    case Method::MajorityAtK: {
      int rep = vote_interned(pool, idx, k, tie_break, rng, scratch);
      r.correct = (pool.ans[rep] != 0 && pool.cor[rep]) ? 1.0 : 0.0;
      std::int64_t total = 0;
      for (int j = 0; j < k; ++j) total += pool.len[idx[j]];
      r.compute = static_cast<double>(total);
      if (pool.has_durations) {
        double max_d = 0.0;
        for (int j = 0; j < k; ++j) max_d = std::max(max_d, pool.dur[idx[j]]);
        r.time = max_d;
      } else {
        r.time = static_cast<double>(pool.len[idx[k - 1]]);
      }
      return r;
    }
    case Method::ShortestMAtK: {
      int rep = vote_interned(pool, idx, m_eff, tie_break, rng, scratch);
      r.correct = (pool.ans[rep] != 0 && pool.cor[rep]) ? 1.0 : 0.0;
      int cut_pos = idx[m_eff - 1];
      std::int64_t cut = pool.len[cut_pos];
      std::int64_t total = 0;
      for (int j = 0; j < k; ++j) total += std::min(pool.len[idx[j]], cut);
      r.compute = static_cast<double>(total);
      r.time = pool.has_durations ? pool.dur[cut_pos] : static_cast<double>(cut);
      return r;
    }
    case Method::OraclePassAtK: {
      int cut_pos = -1;
      for (int j = 0; j < k; ++j)
        if (pool.cor[idx[j]]) {
          cut_pos = idx[j];
          break;
        }
      if (cut_pos >= 0) {
        r.correct = 1.0;
        std::int64_t cut = pool.len[cut_pos];
        std::int64_t total = 0;
        for (int j = 0; j < k; ++j) total += std::min(pool.len[idx[j]], cut);
        r.compute = static_cast<double>(total);
        r.time = pool.has_durations ? pool.dur[cut_pos] : static_cast<double>(cut);
      } else {
        std::int64_t total = 0;
        for (int j = 0; j < k; ++j) total += pool.len[idx[j]];
        r.compute = static_cast<double>(total);
        if (pool.has_durations) {
          double max_d = 0.0;
          for (int j = 0; j < k; ++j) max_d = std::max(max_d, pool.dur[idx[j]]);
          r.time = max_d;
        } else {
          r.time = static_cast<double>(pool.len[idx[k - 1]]);
        }
      }
      return r;
    }
  }
  return r;
}

struct Cell {
  Method method;
  int k = 1;
  std::optional<int> m;  // requested m (may exceed k; evaluated with min(m, k))
};

struct CellResult {
  double accuracy = 0.0;
  double compute = 0.0;
  double time = 0.0;
  bool exact = true;
};

std::uint64_t cell_seed(std::uint64_t base, const std::string& question_id, const Cell& cell) {
  std::uint64_t h = mix_seed(base, fnv1a64(question_id));
  h = mix_seed(h, static_cast<std::uint64_t>(cell.method) + 1);
  h = mix_seed(h, static_cast<std::uint64_t>(cell.k));
  h = mix_seed(h, static_cast<std::uint64_t>(cell.m.value_or(0)) + 0x51ull);
  return h;
}

CellResult eval_cell(const InternedPool& pool, const Cell& cell, const CurveRequest& req,
                     VoteScratch& scratch) {
  const int n = pool.n;
  const int k = cell.k;
  const int m_eff = cell.m ? std::min(*cell.m, k) : 0;
  const TieBreak tb =
      cell.method == Method::MajorityAtK ? req.majority_tie_break : req.tie_break;

  Rng rng(cell_seed(req.rng_seed, pool.question_id, cell));
  const std::uint64_t total =
      binomial_capped(n, k, static_cast<std::uint64_t>(req.exact_threshold) + 1);
  const bool exact = total <= static_cast<std::uint64_t>(req.exact_threshold);

  double correct_sum = 0.0, compute_sum = 0.0, time_sum = 0.0;
  std::uint64_t count = 0;

  std::vector<int> idx(k);
  if (exact) {
    for (int i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      SubsetEval e = eval_subset(pool, idx.data(), k, cell.method, m_eff, tb, rng, scratch);
      correct_sum += e.correct;
      compute_sum += e.compute;
      time_sum += e.time;
      ++count;
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  } else {
    std::vector<int> deck(n);
    for (int s = 0; s < req.mc_samples; ++s) {
      for (int i = 0; i < n; ++i) deck[i] = i;
      for (int j = 0; j < k; ++j)
        std::swap(deck[j], deck[j + rng.uniform_below(static_cast<std::uint64_t>(n - j))]);
      std::copy(deck.begin(), deck.begin() + k, idx.begin());
      std::sort(idx.begin(), idx.end());
      SubsetEval e = eval_subset(pool, idx.data(), k, cell.method, m_eff, tb, rng, scratch);
      correct_sum += e.correct;
      compute_sum += e.compute;
      time_sum += e.time;
      ++count;
    }
  }

  CellResult result;
  result.exact = exact;
  result.compute = compute_sum / static_cast<double>(count);
  result.time = time_sum / static_cast<double>(count);
  // pass@k and rank-score@k accuracies always come from the closed forms.
  if (cell.method == Method::OraclePassAtK) {
    result.accuracy = pass_at_k(n, pool.c, k);
  } else if (cell.method == Method::ShortestMAtK && m_eff == 1) {
    result.accuracy = rank_score_sorted(pool.cor.data(), n, k);
  } else {
    result.accuracy = correct_sum / static_cast<double>(count);
  }
  return result;
}

}  // namespace

std::vector<CurvePoint> evaluate_curves(const std::vector<QuestionLog>& logs,
                                        const CurveRequest& req) {
  if (logs.empty()) throw std::invalid_argument("evaluate_curves: no logs given");
  if (req.k_set.empty()) throw std::invalid_argument("evaluate_curves: empty k_set");
  if (req.mc_samples < 1) throw std::invalid_argument("evaluate_curves: mc_samples must be >= 1");

  std::vector<Cell> cells;
  for (Method method : req.methods) {
    for (int k : req.k_set) {
      if (k < 1) throw std::invalid_argument("evaluate_curves: k must be >= 1");
      if (method == Method::ShortestMAtK) {
        for (int m : req.m_set) {
          if (m < 1) throw std::invalid_argument("evaluate_curves: m must be >= 1");
          cells.push_back({method, k, m});
        }
      } else {
        cells.push_back({method, k, std::nullopt});
      }
    }
  }

  std::vector<InternedPool> pools;
  pools.reserve(logs.size());
  const int max_k = *std::max_element(req.k_set.begin(), req.k_set.end());
  for (const QuestionLog& log : logs) {
    InternedPool pool = intern_pool(log);
    if (pool.n < max_k)
      throw data_error("question '" + log.question_id + "' has usable pool n=" +
                       std::to_string(pool.n) + " < k=" + std::to_string(max_k));
    pools.push_back(std::move(pool));
  }

  // Question-level parallelism; per-question seeding keeps results identical
  // across worker counts.
  std::vector<std::vector<CellResult>> results(pools.size(),
                                               std::vector<CellResult>(cells.size()));
  int workers = req.workers > 0 ? req.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, static_cast<int>(pools.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto run = [&]() {
    VoteScratch scratch;
    try {
      for (;;) {
        std::size_t q = next.fetch_add(1);
        if (q >= pools.size()) return;
        scratch.ensure(static_cast<std::size_t>(pools[q].n) + 2);
        for (std::size_t ci = 0; ci < cells.size(); ++ci)
          results[q][ci] = eval_cell(pools[q], cells[ci], req, scratch);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };

  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) threads.emplace_back(run);
    for (std::thread& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<CurvePoint> points;
  points.reserve(cells.size());
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    CurvePoint pt;
    pt.method = cells[ci].method;
    pt.k = cells[ci].k;
    pt.m = cells[ci].m;
    pt.n_questions = static_cast<int>(pools.size());
    bool exact = true;
    double acc = 0.0, comp = 0.0, time = 0.0;
    for (std::size_t q = 0; q < pools.size(); ++q) {
      acc += results[q][ci].accuracy;
      comp += results[q][ci].compute;
      time += results[q][ci].time;
      exact = exact && results[q][ci].exact;
    }
    pt.accuracy_mean = acc / static_cast<double>(pools.size());
    pt.compute_mean = comp / static_cast<double>(pools.size());
    pt.time_mean = time / static_cast<double>(pools.size());
    pt.enumeration = Enumeration{exact, exact ? 0 : req.mc_samples};
    points.push_back(std::move(pt));
  }
  return points;
}

// --- report operations -------------------------------------------------------------------

TercileReport difficulty_terciles(const std::vector<QuestionLog>& logs) {
  if (logs.empty()) throw std::invalid_argument("difficulty_terciles: empty log set");
  if (logs.size() < 3)
    throw data_error("difficulty_terciles: need at least 3 questions, got " +
                     std::to_string(logs.size()));

  struct QStat {
    const QuestionLog* log;
    double success;
  };
  std::vector<QStat> stats;
  for (const QuestionLog& log : logs) {
    int usable = 0, correct = 0;
    for (const GenerationRecord& g : log.generations) {
      if (!g.usable()) continue;
      ++usable;
      if (g.correct.value_or(false)) ++correct;
    }
    if (usable == 0)
      throw data_error("question '" + log.question_id + "' has no completed generations");
    stats.push_back({&log, static_cast<double>(correct) / usable});
  }
  std::sort(stats.begin(), stats.end(), [](const QStat& a, const QStat& b) {
    if (a.success != b.success) return a.success > b.success;
    return a.log->question_id < b.log->question_id;
  });

  const int total = static_cast<int>(stats.size());
  const int base = total / 3, rem = total % 3;
  const char* names[3] = {"easy", "medium", "hard"};
  TercileReport report;
  int offset = 0;
  for (int gi = 0; gi < 3; ++gi) {
    int size = base + (gi < rem ? 1 : 0);
    TercileGroup& group = report.groups[gi];
    group.name = names[gi];
    std::int64_t cor_tokens = 0, inc_tokens = 0, all_tokens = 0;
    std::int64_t cor_n = 0, inc_n = 0, all_n = 0;
    double success_sum = 0.0;
    for (int qi = offset; qi < offset + size; ++qi) {
      group.question_ids.push_back(stats[qi].log->question_id);
      success_sum += stats[qi].success;
      for (const GenerationRecord& g : stats[qi].log->generations) {
        if (!g.usable()) continue;
        all_tokens += g.think_tokens;
        ++all_n;
        if (g.correct.value_or(false)) {
          cor_tokens += g.think_tokens;
          ++cor_n;
        } else {
          inc_tokens += g.think_tokens;
          ++inc_n;
        }
      }
    }
    if (cor_n > 0) group.correct_mean = static_cast<double>(cor_tokens) / cor_n;
    if (inc_n > 0) group.incorrect_mean = static_cast<double>(inc_tokens) / inc_n;
    group.all_mean = all_n > 0 ? static_cast<double>(all_tokens) / all_n : 0.0;
    group.success_rate = size > 0 ? success_sum / size : 0.0;
    offset += size;
  }
  return report;
}

SelectionReport short_long_random_report(const std::vector<QuestionLog>& logs,
                                         std::uint64_t rng_seed, bool random_expectation) {
  if (logs.empty()) throw std::invalid_argument("short_long_random_report: empty log set");

  double s_tok = 0, s_acc = 0, l_tok = 0, l_acc = 0, r_tok = 0, r_acc = 0;
  for (const QuestionLog& log : logs) {
    RankedPool pool = RankedPool::from_log(log);
    if (pool.n() == 0)
      throw data_error("question '" + log.question_id + "' has no completed generations");
    const RankedEntry& shortest = pool.entries.front();
    const RankedEntry& longest = pool.entries.back();
    s_tok += static_cast<double>(shortest.think_tokens);
    s_acc += shortest.correct ? 1.0 : 0.0;
    l_tok += static_cast<double>(longest.think_tokens);
    l_acc += longest.correct ? 1.0 : 0.0;
    if (random_expectation) {
      double tok = 0, acc = 0;
      for (const RankedEntry& e : pool.entries) {
        tok += static_cast<double>(e.think_tokens);
        acc += e.correct ? 1.0 : 0.0;
      }
      r_tok += tok / pool.n();
      r_acc += acc / pool.n();
    } else {
      Rng rng(mix_seed(rng_seed, fnv1a64(log.question_id)));
      const RankedEntry& pick = pool.entries[rng.uniform_below(pool.entries.size())];
      r_tok += static_cast<double>(pick.think_tokens);
      r_acc += pick.correct ? 1.0 : 0.0;
    }
  }

  const double nq = static_cast<double>(logs.size());
  SelectionReport report;
  report.n_questions = static_cast<int>(logs.size());
  report.expectation_mode = random_expectation;
  report.shortest = {s_tok / nq, s_acc / nq};
  report.longest = {l_tok / nq, l_acc / nq};
  report.random = {r_tok / nq, r_acc / nq};
  auto delta = [&](double tokens) {
    if (report.random.mean_tokens == 0.0) return 0;
    return static_cast<int>(std::llround(
        100.0 * (tokens - report.random.mean_tokens) / report.random.mean_tokens));
  };
  report.delta_shortest_pct = delta(report.shortest.mean_tokens);
  report.delta_longest_pct = delta(report.longest.mean_tokens);
  return report;
}

}  // namespace shortmk
