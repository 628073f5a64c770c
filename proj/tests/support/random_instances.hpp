#pragma once

#include <random>
#include <set>

#include "linfty/transfer.hpp"

namespace linfty::testkit {

using Rng = std::mt19937;

/// Degrees 1..amplitude with 0-2 elements each, at most max_dim in total,
/// never empty.
GradedSpace random_space(Rng& rng, size_t max_dim = 6, int amplitude = 5);

/// l1 pairing elements of adjacent degrees, so l1^2 = 0 and nothing else.
Structure<Rat> random_abelian(Rng& rng, const GradedSpace& space);
/// As random_abelian plus curvature on a degree-1 element outside the domain of l1.
Structure<Rat> random_curved_abelian(Rng& rng, const GradedSpace& space);
/// Coalgebra automorphism table: invertible linear part (upper triangular
/// per degree) plus random higher components.
MultiMap<Rat> random_automorphism(Rng& rng, const GradedSpace& space);
/// Gauge conjugate of a random (optionally curved) abelian structure.
Structure<Rat> random_structure(Rng& rng, const GradedSpace& space, bool curved);

/// delta = the l1 block L^{level-1} -> L^level, eta a generalised inverse of
/// it picked by leftmost pivots, variation filtration at that level.
ContractionData contraction_at(const Structure<Rat>& s, int level);

struct TransferInstance {
  Structure<Rat> structure;
  ContractionData contraction;
};
/// Random structure of amplitude >= 2 with a random admissible contraction.
TransferInstance random_transfer_instance(Rng& rng, bool curved);

/// L = L' + K with K acyclic, conjugated by an automorphism whose nonlinear
/// part lands in K; the projection to L' is a linear fibration.
Morphism<Rat> random_admissible_fibration(Rng& rng);

} // namespace linfty::testkit
