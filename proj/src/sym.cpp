#include "linfty/sym.hpp"

#include <algorithm>
#include <numeric>

namespace linfty {

int word_degree(const Word& w) {
  int d = 0;
  for (const auto& e : w)
    d += e.degree;
  return d;
}

bool is_canonical(const Word& w) {
  for (size_t i = 1; i < w.size(); ++i) {
    if (w[i] < w[i - 1])
      return false;
    if (w[i] == w[i - 1] && is_odd(w[i].degree))
      return false;
  }
  return true;
}

std::optional<std::pair<Word, int>> canonicalize(Word w) {
  int sign = 1;
  // insertion sort; each adjacent swap of two odd elements flips the sign
  for (size_t i = 1; i < w.size(); ++i)
    for (size_t j = i; j > 0 && w[j] < w[j - 1]; --j) {
      if (is_odd(w[j].degree) && is_odd(w[j - 1].degree))
        sign = -sign;
      std::swap(w[j], w[j - 1]);
    }
  for (size_t i = 1; i < w.size(); ++i)
    if (w[i] == w[i - 1] && is_odd(w[i].degree))
      return std::nullopt;
  return std::make_pair(std::move(w), sign);
}

int permutation_sign(const Word& w, const std::vector<int>& order) {
  int sign = 1;
  for (size_t i = 0; i < order.size(); ++i)
    for (size_t j = i + 1; j < order.size(); ++j)
      if (order[i] > order[j] && is_odd(w[order[i]].degree) && is_odd(w[order[j]].degree))
        sign = -sign;
  return sign;
}

namespace {

using PositionPartition = std::vector<std::vector<int>>;

void extend_partitions(int next, int n, PositionPartition& cur, std::vector<PositionPartition>& out) {
  if (next == n) {
    out.push_back(cur);
    return;
  }
  for (size_t b = 0; b < cur.size(); ++b) {
    cur[b].push_back(next);
    extend_partitions(next + 1, n, cur, out);
    cur[b].pop_back();
  }
  cur.push_back({next});
  extend_partitions(next + 1, n, cur, out);
  cur.pop_back();
}

std::vector<PositionPartition> build_partitions(int n) {
  std::vector<PositionPartition> out;
  PositionPartition cur;
  extend_partitions(0, n, cur, out);
  return out;
}

constexpr int kCachedPartitionLength = 8;

// Blocks are listed by smallest element; positions inside a block ascend.
const std::vector<PositionPartition>& position_partitions(int n) {
  static const std::vector<std::vector<PositionPartition>> cache = [] {
    std::vector<std::vector<PositionPartition>> c;
    for (int k = 0; k <= kCachedPartitionLength; ++k)
      c.push_back(build_partitions(k));
    return c;
  }();
  if (n <= kCachedPartitionLength)
    return cache[n];
  thread_local std::map<int, std::vector<PositionPartition>> extra;
  auto it = extra.find(n);
  if (it == extra.end())
    it = extra.emplace(n, build_partitions(n)).first;
  return it->second;
}

std::vector<BlockPartition> aggregate_partitions(const Word& w, std::optional<size_t> p) {
  std::map<std::vector<Word>, long> agg;
  for (const auto& part : position_partitions(static_cast<int>(w.size()))) {
    if (p && part.size() != *p)
      continue;
    std::vector<std::pair<Word, std::vector<int>>> blocks;
    for (const auto& b : part) {
      Word bw;
      for (int i : b)
        bw.push_back(w[i]);
      blocks.emplace_back(std::move(bw), b);
    }
    std::stable_sort(blocks.begin(), blocks.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<int> order;
    std::vector<Word> key;
    for (auto& [bw, pos] : blocks) {
      order.insert(order.end(), pos.begin(), pos.end());
      key.push_back(bw);
    }
    agg[key] += permutation_sign(w, order);
  }
  std::vector<BlockPartition> out;
  for (auto& [k, c] : agg)
    if (c != 0)
      out.push_back({k, c});
  return out;
}

} // namespace

std::vector<Unshuffle> unshuffles(const Word& w, size_t i) {
  std::map<std::pair<Word, Word>, long> agg;
  size_t n = w.size();
  if (i > n)
    return {};
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(i), true);
  // prev_permutation over a descending-sorted mask visits every i-subset once
  do {
    Word left, right;
    std::vector<int> order, rest;
    for (size_t j = 0; j < n; ++j) {
      if (pick[j]) {
        left.push_back(w[j]);
        order.push_back(static_cast<int>(j));
      } else {
        right.push_back(w[j]);
        rest.push_back(static_cast<int>(j));
      }
    }
    order.insert(order.end(), rest.begin(), rest.end());
    agg[{left, right}] += permutation_sign(w, order);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  std::vector<Unshuffle> out;
  for (auto& [k, c] : agg)
    if (c != 0)
      out.push_back({k.first, k.second, c});
  return out;
}

std::vector<Unshuffle> coproduct(const Word& w) {
  std::vector<Unshuffle> out;
  for (size_t i = 0; i <= w.size(); ++i) {
    auto u = unshuffles(w, i);
    out.insert(out.end(), u.begin(), u.end());
  }
  return out;
}

std::vector<BlockPartition> block_partitions(const Word& w, size_t p) {
  if (p == 0 || p > w.size())
    return {};
  return aggregate_partitions(w, p);
}

std::vector<BlockPartition> all_block_partitions(const Word& w) { return aggregate_partitions(w, std::nullopt); }

std::vector<Word> canonical_words(const GradedSpace& space, int max_degree, size_t max_len) {
  auto basis = space.basis();
  std::vector<Word> out;
  Word cur;
  auto rec = [&](auto&& self, size_t start, int deg) -> void {
    out.push_back(cur);
    if (cur.size() >= max_len)
      return;
    for (size_t i = start; i < basis.size(); ++i) {
      const auto& e = basis[i];
      if (e.degree <= 0)
        throw Error(ErrorCode::DegreeRuleViolation, "word enumeration needs positive degrees");
      if (deg + e.degree > max_degree)
        continue;
      cur.push_back(e);
      self(self, is_odd(e.degree) ? i + 1 : i, deg + e.degree);
      cur.pop_back();
    }
  };
  rec(rec, 0, 0);
  std::stable_sort(out.begin(), out.end(), [](const Word& a, const Word& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

} // namespace linfty
