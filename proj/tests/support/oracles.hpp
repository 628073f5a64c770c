#pragma once

#include <vector>

#include "linfty/graded.hpp"

namespace linfty::testkit {

/// Rank by column elimination on a dense copy; shares no code with rref.
size_t dense_rank(const RatMatrix& m);
/// dim ker d_k - rank d_{k-1} for every degree of the space.
std::map<int, size_t> dense_cohomology_dims(const Complex<Rat>& c);
/// Number of set partitions of n labelled points into p blocks.
long stirling2(int n, int p);

} // namespace linfty::testkit

namespace linfty::testkit {

/// Dimensions of the free graded-commutative algebra on generators with the
/// given counts per primal degree d (generator degree -d), in degrees
/// -depth..0, by a generating-function product.
std::map<int, size_t> free_algebra_dims(const std::map<int, size_t>& generators, int depth);

} // namespace linfty::testkit
