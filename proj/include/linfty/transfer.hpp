#pragma once

#include <map>
#include <string>
#include <vector>

#include "linfty/structure.hpp"
#include "linfty/verdict.hpp"

namespace linfty {

/// Integer weight per basis element. A map is filtered when it never lowers
/// weight; a perturbation entry is filtered of degree 1 when its output weight
/// exceeds the weight of every input by at least one.
struct Filtration {
  enum class Kind { Natural, Variation, Custom };
  Kind kind = Kind::Natural;
  /// Variation at level n: degree n-1 is moved up to weight n, so the only
  /// weight-preserving part of l1 is L^{n-1} -> L^n.
  int level = 0;
  std::map<BasisElem, int> weights;

  static Filtration natural() { return {}; }
  static Filtration variation(int level) { return {Kind::Variation, level, {}}; }
  static Filtration custom(std::map<BasisElem, int> w) { return {Kind::Custom, 0, std::move(w)}; }

  int weight(BasisElem e) const;
  /// Number of distinct weight levels spanned by the space (at least 1).
  int length(const GradedSpace& space) const;
  friend bool operator==(const Filtration&, const Filtration&) = default;
};

struct ContractionData {
  GradedSpace space;
  GradedMap<Rat> delta; // degree +1
  GradedMap<Rat> eta;   // degree -1
  Filtration filtration;
};

/// The degenerate contraction delta = eta = 0.
ContractionData trivial_contraction(const GradedSpace& space);

/// Perturbation s - delta, where delta is removed from the arity-1 entries.
MultiMap<Rat> perturbation(const Structure<Rat>& s, const GradedMap<Rat>& delta);

/// Checks delta^2 = 0, eta^2 = 0, eta delta eta = eta, that delta and eta are
/// filtered, and that every perturbation entry is filtered of degree 1.
std::vector<Verdict> validate_contraction(const ContractionData& c, const Structure<Rat>& s);

struct HData {
  GradedSpace space; // labels are the free-column labels of [delta, eta]
  GradedMap<Rat> iota;
  GradedMap<Rat> pi;
};

GradedMap<Rat> commutator(const ContractionData& c);
HData compute_H(const ContractionData& c);

struct TransferResult {
  Structure<Rat> source;
  ContractionData contraction;
  MultiMap<Rat> lambda; // perturbation
  HData h;
  Structure<Rat> mu;        // delta_H plus the transferred operations
  Morphism<Rat> phi;        // (H, mu) -> (L, s)
  Morphism<Rat> pitilde;    // (L, s) -> (H, mu)
  GradedMap<Rat> etatilde;  // degree -1 on L
  int phi_sweeps = 0;
  int pitilde_sweeps = 0;
};

/// Throws ContractionInvalid when validation fails, NoConvergence when an
/// iteration does not stabilise within the filtration bound.
TransferResult transfer(const Structure<Rat>& s, const ContractionData& c);

/// Structure and morphism identities of a transfer: mu satisfies the
/// relations, phi and pitilde are morphisms, pitilde after phi is the
/// identity, the side conditions of the contraction, and the deformed
/// homotopy identity (skipped when (delta + l1)^2 != 0).
std::vector<Verdict> certify(const TransferResult& t);

struct OracleTables {
  MultiMap<Rat> phi;
  MultiMap<Rat> mu;
};
/// Closed tree expansion of the transfer formulas up to arity 3, computed
/// without the fixed-point solver.
OracleTables expansion_oracle(const Structure<Rat>& s, const ContractionData& c);
/// Compares transfer output with the oracle on arities <= 3.
Verdict oracle_agreement(const TransferResult& t);

struct FirstcaseResult {
  int degree = 0;
  KernelSubspace kernel;
  ContractionData contraction;
  TransferResult transfer;
  Morphism<Rat> composed; // input morphism after phi
  std::vector<Verdict> verdicts;
};

/// One reduction step at degree k for a linear morphism at a classical point.
/// Throws HypothesisFailed or NotSurjectiveOnKernel.
FirstcaseResult firstcase_reduce(const Morphism<Rat>& m, int k);

struct Step1Result {
  std::vector<FirstcaseResult> chain;
  Morphism<Rat> final_morphism;
  std::vector<Verdict> verdicts;
};

/// Runs firstcase_reduce from the top amplitude down to degree 2 wherever the
/// kernel is nonzero. Throws HypothesisFailed unless m is a linear,
/// degreewise surjective morphism between uncurved structures.
Step1Result step1_pipeline(const Morphism<Rat>& m);

/// Rank audit of a linear map: iso in degrees >= iso_from, epi in degrees < iso_from.
Verdict rank_audit(const GradedMap<Rat>& f, int iso_from, const std::string& name);

} // namespace linfty

namespace linfty::fixtures {
/// delta: m -> b, eta: b -> m on the E4 space, variation filtration at level 5.
ContractionData e4_contraction();
} // namespace linfty::fixtures
