#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linfty/error.hpp"
#include "linfty/linalg.hpp"

namespace linfty {

struct BasisElem {
  int degree = 0;
  int index = 0;
  friend auto operator<=>(const BasisElem&, const BasisElem&) = default;
};

/// Finite graded vector space given by basis labels per degree. Degrees with
/// no basis elements are not stored.
class GradedSpace {
public:
  GradedSpace() = default;
  explicit GradedSpace(std::map<int, std::vector<std::string>> labels);

  const std::map<int, std::vector<std::string>>& labels() const { return labels_; }
  size_t dim(int degree) const;
  size_t total_dim() const;
  bool empty() const { return labels_.empty(); }
  /// Degrees carrying at least one basis element, ascending.
  std::vector<int> degrees() const;
  /// 0 for the zero space.
  int min_degree() const;
  int max_degree() const;
  std::vector<BasisElem> basis() const;
  std::vector<BasisElem> basis(int degree) const;
  const std::string& label(BasisElem e) const;
  std::optional<BasisElem> find(std::string_view label) const;
  bool contains(BasisElem e) const;

  friend bool operator==(const GradedSpace&, const GradedSpace&) = default;

private:
  std::map<int, std::vector<std::string>> labels_;
};

/// Sparse vector; zero coefficients are never stored.
template <class S>
using Vec = std::map<BasisElem, S>;

template <class S>
void add_to(Vec<S>& v, BasisElem e, const S& c) {
  if (c.is_zero())
    return;
  auto [it, fresh] = v.try_emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero())
      v.erase(it);
  }
}

template <class S>
void axpy(Vec<S>& y, const S& a, const Vec<S>& x) {
  if (a.is_zero())
    return;
  for (const auto& [e, c] : x)
    add_to(y, e, a * c);
}

template <class S>
Vec<S> scaled(const Vec<S>& x, const S& a) {
  Vec<S> r;
  axpy(r, a, x);
  return r;
}

/// Homogeneous linear map of fixed degree. block(k) maps the degree-k basis
/// of the source to the degree-(k+degree) basis of the target.
template <class S>
class GradedMap {
public:
  GradedMap() = default;
  GradedMap(GradedSpace source, GradedSpace target, int degree)
      : source_(std::move(source)), target_(std::move(target)), degree_(degree) {
    for (int k : source_.degrees())
      if (target_.dim(k + degree_) > 0)
        blocks_.emplace(k, Matrix<S>(target_.dim(k + degree_), source_.dim(k)));
  }

  static GradedMap identity(const GradedSpace& space) {
    GradedMap m(space, space, 0);
    for (auto& [k, b] : m.blocks_)
      b = Matrix<S>::identity(space.dim(k));
    return m;
  }

  const GradedSpace& source() const { return source_; }
  const GradedSpace& target() const { return target_; }
  int degree() const { return degree_; }
  const std::map<int, Matrix<S>>& blocks() const { return blocks_; }

  /// Zero matrix of the right shape when the block is structurally absent.
  Matrix<S> block(int k) const {
    auto it = blocks_.find(k);
    if (it != blocks_.end())
      return it->second;
    return Matrix<S>(target_.dim(k + degree_), source_.dim(k));
  }
  void set_block(int k, Matrix<S> m) {
    if (m.rows() != target_.dim(k + degree_) || m.cols() != source_.dim(k))
      throw Error(ErrorCode::SpaceMismatch, "block shape in degree " + std::to_string(k));
    if (m.empty())
      return;
    blocks_[k] = std::move(m);
  }

  S entry(BasisElem in, BasisElem out) const {
    if (out.degree != in.degree + degree_)
      return S();
    auto it = blocks_.find(in.degree);
    if (it == blocks_.end())
      return S();
    return it->second(out.index, in.index);
  }
  void set(BasisElem in, BasisElem out, const S& value) {
    if (out.degree != in.degree + degree_)
      throw Error(ErrorCode::DegreeRuleViolation, "entry violates map degree");
    auto it = blocks_.find(in.degree);
    if (it == blocks_.end())
      throw Error(ErrorCode::SpaceMismatch, "entry outside source or target");
    it->second(out.index, in.index) = value;
  }

  Vec<S> apply(BasisElem in) const {
    Vec<S> r;
    auto it = blocks_.find(in.degree);
    if (it == blocks_.end())
      return r;
    const auto& b = it->second;
    for (size_t i = 0; i < b.rows(); ++i)
      if (!b(i, in.index).is_zero())
        r.emplace(BasisElem{in.degree + degree_, static_cast<int>(i)}, b(i, in.index));
    return r;
  }
  Vec<S> apply(const Vec<S>& v) const {
    Vec<S> r;
    for (const auto& [e, c] : v)
      axpy(r, c, apply(e));
    return r;
  }

  bool is_zero() const {
    for (const auto& [k, b] : blocks_)
      if (!b.is_zero())
        return false;
    return true;
  }

  /// (a * b) = a after b.
  friend GradedMap operator*(const GradedMap& a, const GradedMap& b) {
    if (!(a.source_ == b.target_))
      throw Error(ErrorCode::SpaceMismatch, "composition of incompatible maps");
    GradedMap r(b.source_, a.target_, a.degree_ + b.degree_);
    for (auto& [k, blk] : r.blocks_)
      blk = a.block(k + b.degree_) * b.block(k);
    return r;
  }
  friend GradedMap operator+(const GradedMap& a, const GradedMap& b) {
    a.check_same(b);
    GradedMap r = a;
    for (auto& [k, blk] : r.blocks_)
      blk = blk + b.block(k);
    return r;
  }
  friend GradedMap operator-(const GradedMap& a, const GradedMap& b) {
    a.check_same(b);
    GradedMap r = a;
    for (auto& [k, blk] : r.blocks_)
      blk = blk - b.block(k);
    return r;
  }
  friend bool operator==(const GradedMap& a, const GradedMap& b) {
    if (!(a.source_ == b.source_ && a.target_ == b.target_ && a.degree_ == b.degree_))
      return false;
    return (a - b).is_zero();
  }

private:
  void check_same(const GradedMap& b) const {
    if (!(source_ == b.source_ && target_ == b.target_ && degree_ == b.degree_))
      throw Error(ErrorCode::SpaceMismatch, "sum of incompatible maps");
  }

  GradedSpace source_;
  GradedSpace target_;
  int degree_ = 0;
  std::map<int, Matrix<S>> blocks_;
};

GradedMap<Rat> evaluate(const GradedMap<Poly>& m, std::span<const Rat> point);
GradedMap<Poly> to_poly(const GradedMap<Rat>& m);
/// Throws PolynomialEntries if some entry is not constant.
GradedMap<Rat> to_rat(const GradedMap<Poly>& m);

/// Cochain complex; the differential has degree +1 and squares to zero.
template <class S>
class Complex {
public:
  Complex(GradedSpace space, GradedMap<S> differential)
      : space_(std::move(space)), d_(std::move(differential)) {
    if (!(d_.source() == space_ && d_.target() == space_) || d_.degree() != 1)
      throw Error(ErrorCode::SpaceMismatch, "differential must be a degree +1 endomorphism");
    if (!(d_ * d_).is_zero())
      throw Error(ErrorCode::NotAComplex, "d*d != 0");
  }

  const GradedSpace& space() const { return space_; }
  const GradedMap<S>& differential() const { return d_; }

private:
  GradedSpace space_;
  GradedMap<S> d_;
};

struct CohomologyGroup {
  size_t dim = 0;
  /// Cocycles whose classes form a basis; chosen by leftmost pivots.
  std::vector<Vec<Rat>> representatives;
};

/// One entry per degree of the space, including zero groups.
std::map<int, CohomologyGroup> cohomology(const Complex<Rat>& c);
/// Throws PolynomialEntries: cohomology is only computed at a point.
std::map<int, CohomologyGroup> cohomology(const Complex<Poly>& c);

struct KernelSubspace {
  GradedSpace space; // labels are the free-column labels of the source
  GradedMap<Rat> inclusion;
};
KernelSubspace kernel_subspace(const GradedMap<Rat>& m);
/// Throws NotSurjective naming the degree and the rank deficit.
GradedMap<Rat> split_epi_section(const GradedMap<Rat>& m);
/// Throws NotInjective naming the degree.
GradedMap<Rat> split_mono_retraction(const GradedMap<Rat>& m);

/// Mapping cone of a degree-0 chain map f: a -> b. Acyclic exactly when f is a
/// quasi-isomorphism.
Complex<Rat> mapping_cone(const Complex<Rat>& a, const Complex<Rat>& b, const GradedMap<Rat>& f);
bool is_chain_map(const Complex<Rat>& a, const Complex<Rat>& b, const GradedMap<Rat>& f);
/// Degrees (of the cone) with nonzero cohomology; empty when f is a quasi-isomorphism.
std::vector<int> cone_defects(const Complex<Rat>& a, const Complex<Rat>& b, const GradedMap<Rat>& f);

std::string format_vec(const GradedSpace& space, const Vec<Rat>& v);

} // namespace linfty
