#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linfty/bundle.hpp"

namespace linfty {

/// Monomials of Sym L^dual are canonical words in the primal basis: the
/// generator dual to e has cohomological degree -deg(e) and the parity of e.
int ce_degree(const Word& w);

/// Values of an algebra map or derivation on generators.
template <class S>
using GeneratorTable = std::map<BasisElem, SymElem<S>>;

template <class S>
struct CEPresentation {
  GradedSpace space; // primal space; generators are its dual basis
  GeneratorTable<S> q;
};

/// Q(xi_c) = sum over words W of lambda(W)[c] / mult(W) xi_W, where mult(W) is
/// the product of factorials of repeated letters.
template <class S>
CEPresentation<S> build_ce(const Structure<S>& s);
CEPresentation<Poly> build_ce(const BundleChart& b);

/// Extends generator values as a derivation (odd: Koszul sign past each letter).
template <class S>
SymElem<S> apply_derivation(const GeneratorTable<S>& gens, const SymElem<S>& x, bool odd);
/// Extends generator values as an algebra morphism; missing generators map to 0.
template <class S>
SymElem<S> apply_algebra_map(const GeneratorTable<S>& gens, const SymElem<S>& x);

template <class S>
struct QSquareReport {
  bool pass = true;
  size_t generators_checked = 0;
  std::optional<BasisElem> generator; // first failure
  SymElem<S> defect;
};
template <class S>
QSquareReport<S> q_square_check(const CEPresentation<S>& p);

struct CEDegree {
  size_t dim = 0;
  size_t chain_dim = 0;
  std::vector<SymElem<Rat>> representatives;
};
/// Cohomology in degrees -max_depth..0.
std::map<int, CEDegree> ce_cohomology(const CEPresentation<Rat>& p, int max_depth);
/// Throws ChartBase.
std::map<int, CEDegree> ce_cohomology(const CEPresentation<Poly>& p, int max_depth);

/// Pullback along a morphism M -> N: generators of N's algebra to M's algebra.
struct CEMap {
  GradedSpace source; // the morphism's target space (dual side is the domain)
  GradedSpace target;
  GeneratorTable<Rat> images;
};
/// Throws NotAMorphism unless check_morphism passes.
CEMap ce_pullback(const Morphism<Rat>& m);
/// F Q' = Q F on every generator of the domain algebra.
Verdict chain_map_check(const CEMap& f, const CEPresentation<Rat>& domain, const CEPresentation<Rat>& codomain);

struct QuasiIsoDegree {
  size_t source_dim = 0; // H of the morphism's source algebra
  size_t target_dim = 0;
  size_t rank = 0; // rank of the induced map target -> source
};
struct QuasiIsoReport {
  bool pass = false;
  Verdict chain_map;
  std::map<int, QuasiIsoDegree> degrees;
  std::vector<int> failing_degrees;
};
QuasiIsoReport quasi_iso_check(const Morphism<Rat>& m, int max_depth);

/// Weak equivalence over a point: the classical loci (empty or the point)
/// agree and the tangent complexes are quasi-isomorphic when classical.
Verdict weak_equivalence_check(const Morphism<Rat>& m);

struct BigradingComponent {
  std::string name; // delta, q0, q2, q3, ...
  size_t arity = 0;
  int shift_k = 0;
  int shift_l = 0;
  size_t terms = 0;
  bool ok = true;
};
/// Bidegree of a monomial of weight w and degree q is (q + w, -w); each
/// arity-n piece of Q must shift by (n, 1 - n).
struct BigradingReport {
  bool pass = true;
  std::vector<BigradingComponent> components;
};
BigradingReport bigrading_audit(const CEPresentation<Rat>& p);

/// Ingredients of the transfer homotopy on Sym L^dual.
struct TransferHomotopy {
  GeneratorTable<Rat> projector;   // dual of phi_1 pitilde_1, extended multiplicatively
  GeneratorTable<Rat> eta_dual;    // dual of the deformed homotopy, odd derivation
  GeneratorTable<Rat> differential; // dual of delta + lambda_1
};
/// Throws MissingEtaTilde.
TransferHomotopy transfer_homotopy_h(const TransferResult& t);
SymElem<Rat> apply_h(const TransferHomotopy& h, const SymElem<Rat>& x);

struct HeqReport {
  Status status = Status::Pass;
  std::string detail;
  size_t words_checked = 0;
  std::optional<Word> word;
  SymElem<Rat> defect;
};
/// [D, h] = 1 - projector on every canonical word of weight <= max_weight.
HeqReport heq_check(const TransferResult& t, size_t max_weight);

std::string format_sym(const GradedSpace& space, const SymElem<Rat>& x);

} // namespace linfty
