#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "linfty/poly.hpp"
#include "linfty/verdict.hpp"

namespace linfty {

/// Chart with coordinates x_0..x_{n-1}; the first k are fiber coordinates and
/// u is a section of a rank-k bundle in degree 1, whose Koszul algebra is
/// polynomials in x times exterior monomials in odd xi_0..xi_{k-1}.
struct KoszulChart {
  size_t n = 0;
  size_t k = 0;
  std::vector<Poly> u;

  /// u = (x_0, .., x_{k-1}).
  static KoszulChart euler(size_t n, size_t k);
  bool is_euler() const;
};

/// Key: (exponent of x, bitmask of xi factors in increasing order).
using KoszulMonomial = std::pair<Exponent, unsigned>;
using KoszulElem = std::map<KoszulMonomial, Rat>;

/// Contraction by u: the odd derivation with xi_i -> u_i.
KoszulElem koszul_iota(const KoszulChart& c, const KoszulElem& x);
/// Exact flow homotopy on a monomial x^a xi_I:
/// (1/w) sum_{i<k} xi_i d/dx_i (x^a xi_I), w = |a restricted to fibers| + |I|.
/// Throws NotEulerForm unless u is the Euler section.
KoszulElem koszul_eta(const KoszulChart& c, const KoszulMonomial& m);
/// Restriction to the zero section followed by the projection pullback.
KoszulElem koszul_restrict(const KoszulChart& c, const KoszulMonomial& m);

struct KoszulReport {
  bool pass = true;
  size_t monomials_checked = 0;
  std::string witness;
};
/// eta iota + iota eta = id - restrict, on every monomial of polynomial degree <= max_degree.
KoszulReport koszul_identity_check(const KoszulChart& c, int max_degree);

/// Cohomology of the Koszul complex in negative degrees on the window of
/// total weight <= max_weight. u must be linear homogeneous with invertible
/// fiber block (HypothesisFailed otherwise); the map degree -> dimension is
/// all zeros exactly when u resolves the zero locus on the window.
std::map<int, size_t> koszul_window_cohomology(const KoszulChart& c, int max_weight);

std::string format_koszul(const KoszulElem& x);

} // namespace linfty
