#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "linfty/graded.hpp"

namespace linfty {

/// A monomial of the graded-symmetric algebra: basis elements sorted by
/// (degree, index), no odd element repeated.
using Word = std::vector<BasisElem>;

inline bool is_odd(int degree) { return (degree & 1) != 0; }
int word_degree(const Word& w);
bool is_canonical(const Word& w);

/// Koszul sign of sorting w, or nullopt when w vanishes (odd repeat).
std::optional<std::pair<Word, int>> canonicalize(Word w);

/// Koszul sign of listing the positions of w in the given order.
int permutation_sign(const Word& w, const std::vector<int>& order);

/// Extraction of a sub-multiset. count is the signed number of position
/// subsets that realise (left, right).
struct Unshuffle {
  Word left;
  Word right;
  long count = 0;
};

/// All (i, len-i) unshuffles of a canonical word, aggregated.
std::vector<Unshuffle> unshuffles(const Word& w, size_t i);
/// The unshuffles for every i, i.e. the coproduct of the word.
std::vector<Unshuffle> coproduct(const Word& w);

struct BlockPartition {
  std::vector<Word> blocks; // sorted, nonempty
  long count = 0;
};

/// Set partitions of the positions of w into p nonempty blocks, aggregated by
/// the resulting multiset of blocks.
std::vector<BlockPartition> block_partitions(const Word& w, size_t p);
/// Set partitions into any number of blocks; blocks sorted within each entry.
std::vector<BlockPartition> all_block_partitions(const Word& w);

/// Element of the symmetric algebra: canonical word -> coefficient.
template <class S>
using SymElem = std::map<Word, S>;

template <class S>
void add_term(SymElem<S>& x, const Word& w, const S& c) {
  if (c.is_zero())
    return;
  auto [it, fresh] = x.try_emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero())
      x.erase(it);
  }
}

template <class S>
void add_scaled(SymElem<S>& x, const S& a, const SymElem<S>& y) {
  if (a.is_zero())
    return;
  for (const auto& [w, c] : y)
    add_term(x, w, a * c);
}

template <class S>
SymElem<S> sym_product(const SymElem<S>& a, const SymElem<S>& b) {
  SymElem<S> r;
  for (const auto& [wa, ca] : a)
    for (const auto& [wb, cb] : b) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      auto c = canonicalize(std::move(w));
      if (!c)
        continue;
      S coef = ca * cb;
      if (c->second < 0)
        coef = -coef;
      add_term(r, c->first, coef);
    }
  return r;
}

template <class S>
SymElem<S> as_sym(const Vec<S>& v) {
  SymElem<S> r;
  for (const auto& [e, c] : v)
    r.emplace(Word{e}, c);
  return r;
}

template <class S>
SymElem<S> unit_word(const Word& w) {
  SymElem<S> r;
  r.emplace(w, S(Rat(1)));
  return r;
}

/// Canonical words over the basis with total degree <= max_degree and length
/// <= max_len, including the empty word, in (length, lexicographic) order.
/// Requires every basis degree to be positive.
std::vector<Word> canonical_words(const GradedSpace& space, int max_degree, size_t max_len = 64);

} // namespace linfty
