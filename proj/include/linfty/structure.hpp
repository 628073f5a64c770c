#pragma once

#include <string>
#include <vector>

#include "linfty/graded.hpp"
#include "linfty/sym.hpp"

namespace linfty {

/// Sparse multilinear table: canonical input word -> output vector. The empty
/// word holds the arity-0 entry.
template <class S>
using MultiMap = std::map<Word, Vec<S>>;

template <class S>
void add_entry(MultiMap<S>& m, const Word& w, const Vec<S>& v) {
  if (v.empty())
    return;
  auto& slot = m[w];
  for (const auto& [e, c] : v)
    add_to(slot, e, c);
  if (slot.empty())
    m.erase(w);
}

/// Curved L-infinity[1] structure on a space of amplitude [1, n]. Entries obey
/// deg(output) = deg(word) + 1; arity k >= 1 entries have k <= n - 1.
template <class S>
struct Structure {
  GradedSpace space;
  MultiMap<S> ops;

  int amplitude() const { return space.max_degree(); }
  Vec<S> curvature() const;
  bool is_curved() const { return !curvature().empty(); }
  friend bool operator==(const Structure&, const Structure&) = default;
};

/// Degree-0 coalgebra morphism given by its Taylor components (arity >= 1).
template <class S>
struct Morphism {
  Structure<S> source;
  Structure<S> target;
  MultiMap<S> components;

  bool is_linear() const;
  friend bool operator==(const Morphism&, const Morphism&) = default;
};

/// Throws NonCanonicalWord, DegreeRuleViolation or SpaceMismatch.
template <class S>
void validate_structure(const Structure<S>& s);
template <class S>
void validate_morphism(const Morphism<S>& m);

template <class S>
Vec<S> apply_table(const MultiMap<S>& table, const SymElem<S>& x);

/// Extension of the table as a coderivation, evaluated on one word; includes
/// the curvature insertion from the empty sub-word.
template <class S>
SymElem<S> coderivation(const MultiMap<S>& ops, const Word& w);

/// Extension of the components as a coalgebra map; the empty word maps to 1.
template <class S>
SymElem<S> coalgebra_image(const MultiMap<S>& components, const Word& w);

template <class S>
struct CheckReport {
  bool pass = true;
  size_t words_checked = 0;
  Word word;      // first failing input word
  Vec<S> defect;  // value of the failing identity on that word
};

template <class S>
CheckReport<S> check_relations(const Structure<S>& s);
/// Throws SpaceMismatch when the component table does not fit the spaces.
template <class S>
CheckReport<S> check_morphism(const Morphism<S>& m);

/// (second after first). Throws SpaceMismatch unless first.target == second.source.
template <class S>
Morphism<S> compose(const Morphism<S>& second, const Morphism<S>& first);
template <class S>
Morphism<S> identity_morphism(const Structure<S>& s);

template <class S>
GradedMap<S> linear_part(const MultiMap<S>& table, const GradedSpace& source, const GradedSpace& target, int degree);
template <class S>
MultiMap<S> to_table(const GradedMap<S>& m);

/// The unique structure s' for which psi: (L, s') -> (L, s) is a morphism.
/// Throws NotInvertible unless the linear part of psi is invertible.
Structure<Rat> gauge_conjugate(const Structure<Rat>& s, const MultiMap<Rat>& psi);
/// Inverse of a coalgebra automorphism of the space.
MultiMap<Rat> inverse_morphism(const GradedSpace& space, const MultiMap<Rat>& psi);

/// Throws NotClassical when the curvature is nonzero.
Complex<Rat> tangent_complex(const Structure<Rat>& s);

struct EtaleReport {
  bool etale = false;
  std::vector<int> defect_degrees; // cone degrees with nonzero cohomology
  std::map<int, size_t> source_dims;
  std::map<int, size_t> target_dims;
};
/// Throws NotClassical when either curvature is nonzero.
EtaleReport etale_pair(const Morphism<Rat>& m);

Structure<Poly> to_poly(const Structure<Rat>& s);
Structure<Rat> evaluate(const Structure<Poly>& s, std::span<const Rat> point);
MultiMap<Rat> evaluate(const MultiMap<Poly>& m, std::span<const Rat> point);
MultiMap<Poly> to_poly(const MultiMap<Rat>& m);

std::string format_word(const GradedSpace& space, const Word& w);

namespace fixtures {
/// L1=<e1>, L2=<e2>, l1(e1)=e2.
Structure<Rat> e1();
/// L1=<e1>, curvature e1.
Structure<Rat> e2();
/// L2=<h>, L4=<m>, L5=<b,c>; l1(m)=b, l2(h,h)=b+c.
Structure<Rat> e4();
/// L1=<x>, L2=<k2>, L3=<k3>; l1(k2)=k3.
Structure<Rat> e5();
/// L'1=<x'>, zero structure.
Structure<Rat> e5_target();
/// Projection x -> x', killing k2 and k3.
Morphism<Rat> e5_projection();
/// Structure on a space with zero operations.
Structure<Rat> zero(const GradedSpace& space);
} // namespace fixtures

} // namespace linfty
