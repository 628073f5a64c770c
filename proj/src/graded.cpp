#include "linfty/graded.hpp"

#include <sstream>

namespace linfty {

GradedSpace::GradedSpace(std::map<int, std::vector<std::string>> labels) {
  for (auto& [d, ls] : labels)
    if (!ls.empty())
      labels_.emplace(d, std::move(ls));
}

size_t GradedSpace::dim(int degree) const {
  auto it = labels_.find(degree);
  return it == labels_.end() ? 0 : it->second.size();
}

size_t GradedSpace::total_dim() const {
  size_t n = 0;
  for (const auto& [d, ls] : labels_)
    n += ls.size();
  return n;
}

std::vector<int> GradedSpace::degrees() const {
  std::vector<int> r;
  for (const auto& [d, ls] : labels_)
    r.push_back(d);
  return r;
}

int GradedSpace::min_degree() const { return labels_.empty() ? 0 : labels_.begin()->first; }
int GradedSpace::max_degree() const { return labels_.empty() ? 0 : labels_.rbegin()->first; }

std::vector<BasisElem> GradedSpace::basis() const {
  std::vector<BasisElem> r;
  for (const auto& [d, ls] : labels_)
    for (size_t i = 0; i < ls.size(); ++i)
      r.push_back({d, static_cast<int>(i)});
  return r;
}

std::vector<BasisElem> GradedSpace::basis(int degree) const {
  std::vector<BasisElem> r;
  for (size_t i = 0; i < dim(degree); ++i)
    r.push_back({degree, static_cast<int>(i)});
  return r;
}

const std::string& GradedSpace::label(BasisElem e) const {
  auto it = labels_.find(e.degree);
  if (it == labels_.end() || e.index < 0 || static_cast<size_t>(e.index) >= it->second.size())
    throw Error(ErrorCode::SpaceMismatch, "basis element outside space");
  return it->second[e.index];
}

std::optional<BasisElem> GradedSpace::find(std::string_view label) const {
  for (const auto& [d, ls] : labels_)
    for (size_t i = 0; i < ls.size(); ++i)
      if (ls[i] == label)
        return BasisElem{d, static_cast<int>(i)};
  return std::nullopt;
}

bool GradedSpace::contains(BasisElem e) const {
  return e.index >= 0 && static_cast<size_t>(e.index) < dim(e.degree);
}

GradedMap<Rat> evaluate(const GradedMap<Poly>& m, std::span<const Rat> point) {
  GradedMap<Rat> r(m.source(), m.target(), m.degree());
  for (const auto& [k, b] : m.blocks())
    r.set_block(k, evaluate(b, point));
  return r;
}

GradedMap<Poly> to_poly(const GradedMap<Rat>& m) {
  GradedMap<Poly> r(m.source(), m.target(), m.degree());
  for (const auto& [k, b] : m.blocks())
    r.set_block(k, to_poly(b));
  return r;
}

GradedMap<Rat> to_rat(const GradedMap<Poly>& m) {
  GradedMap<Rat> r(m.source(), m.target(), m.degree());
  for (const auto& [k, b] : m.blocks()) {
    auto c = to_rat(b);
    if (!c)
      throw Error(ErrorCode::PolynomialEntries, "non-constant entry in block of degree " + std::to_string(k));
    r.set_block(k, *c);
  }
  return r;
}

namespace {

Vec<Rat> column_vec(const RatMatrix& m, size_t col, int degree) {
  Vec<Rat> v;
  for (size_t i = 0; i < m.rows(); ++i)
    if (!m(i, col).is_zero())
      v.emplace(BasisElem{degree, static_cast<int>(i)}, m(i, col));
  return v;
}

} // namespace

std::map<int, CohomologyGroup> cohomology(const Complex<Rat>& c) {
  std::map<int, CohomologyGroup> out;
  const auto& d = c.differential();
  for (int k : c.space().degrees()) {
    size_t n = c.space().dim(k);
    RatMatrix ker = c.space().dim(k + 1) > 0 ? kernel_matrix(d.block(k)) : RatMatrix::identity(n);
    RatMatrix img = c.space().dim(k - 1) > 0 ? d.block(k - 1) : RatMatrix(n, 0);
    RatMatrix joined(n, img.cols() + ker.cols());
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < img.cols(); ++j)
        joined(i, j) = img(i, j);
      for (size_t j = 0; j < ker.cols(); ++j)
        joined(i, img.cols() + j) = ker(i, j);
    }
    CohomologyGroup g;
    for (size_t p : pivot_columns(joined))
      if (p >= img.cols())
        g.representatives.push_back(column_vec(ker, p - img.cols(), k));
    g.dim = g.representatives.size();
    out.emplace(k, std::move(g));
  }
  return out;
}

std::map<int, CohomologyGroup> cohomology(const Complex<Poly>& c) {
  return cohomology(Complex<Rat>(c.space(), to_rat(c.differential())));
}

KernelSubspace kernel_subspace(const GradedMap<Rat>& m) {
  std::map<int, std::vector<std::string>> labels;
  std::map<int, RatMatrix> incl;
  for (int k : m.source().degrees()) {
    size_t n = m.source().dim(k);
    RatMatrix ker = m.target().dim(k + m.degree()) > 0 ? kernel_matrix(m.block(k)) : RatMatrix::identity(n);
    std::vector<bool> pivot(n, false);
    if (m.target().dim(k + m.degree()) > 0)
      for (size_t p : pivot_columns(m.block(k)))
        pivot[p] = true;
    std::vector<std::string> ls;
    for (size_t i = 0; i < n; ++i)
      if (!pivot[i])
        ls.push_back(m.source().label({k, static_cast<int>(i)}));
    if (!ls.empty()) {
      labels.emplace(k, std::move(ls));
      incl.emplace(k, std::move(ker));
    }
  }
  KernelSubspace out{GradedSpace(labels), {}};
  out.inclusion = GradedMap<Rat>(out.space, m.source(), 0);
  for (auto& [k, b] : incl)
    out.inclusion.set_block(k, b);
  return out;
}

GradedMap<Rat> split_epi_section(const GradedMap<Rat>& m) {
  GradedMap<Rat> chi(m.target(), m.source(), -m.degree());
  for (int t : m.target().degrees()) {
    int k = t - m.degree();
    RatMatrix b = m.block(k);
    if (m.source().dim(k) == 0)
      throw Error(ErrorCode::NotSurjective,
                  "degree " + std::to_string(t) + ": rank deficit " + std::to_string(b.rows()));
    try {
      chi.set_block(t, right_inverse(b));
    } catch (const Error&) {
      throw Error(ErrorCode::NotSurjective,
                  "degree " + std::to_string(t) + ": rank deficit " + std::to_string(b.rows() - rank(b)));
    }
  }
  return chi;
}

GradedMap<Rat> split_mono_retraction(const GradedMap<Rat>& m) {
  GradedMap<Rat> theta(m.target(), m.source(), -m.degree());
  for (int k : m.source().degrees()) {
    RatMatrix b = m.block(k);
    if (m.target().dim(k + m.degree()) == 0)
      throw Error(ErrorCode::NotInjective, "degree " + std::to_string(k));
    try {
      theta.set_block(k + m.degree(), left_inverse(b));
    } catch (const Error&) {
      throw Error(ErrorCode::NotInjective, "degree " + std::to_string(k));
    }
  }
  return theta;
}

bool is_chain_map(const Complex<Rat>& a, const Complex<Rat>& b, const GradedMap<Rat>& f) {
  return f * a.differential() == b.differential() * f;
}

Complex<Rat> mapping_cone(const Complex<Rat>& a, const Complex<Rat>& b, const GradedMap<Rat>& f) {
  if (!(f.source() == a.space() && f.target() == b.space()) || f.degree() != 0)
    throw Error(ErrorCode::SpaceMismatch, "cone of a map between other complexes");
  std::map<int, std::vector<std::string>> labels;
  int lo = std::min(a.space().min_degree() - 1, b.space().min_degree());
  int hi = std::max(a.space().max_degree() - 1, b.space().max_degree());
  for (int k = lo; k <= hi; ++k) {
    std::vector<std::string> ls;
    for (const auto& e : a.space().basis(k + 1))
      ls.push_back("s" + a.space().label(e));
    for (const auto& e : b.space().basis(k))
      ls.push_back(b.space().label(e));
    if (!ls.empty())
      labels.emplace(k, std::move(ls));
  }
  GradedSpace cone(labels);
  GradedMap<Rat> d(cone, cone, 1);
  for (int k : cone.degrees()) {
    if (cone.dim(k + 1) == 0)
      continue;
    size_t na = a.space().dim(k + 1), nb = b.space().dim(k);
    size_t ma = a.space().dim(k + 2);
    RatMatrix blk(cone.dim(k + 1), cone.dim(k));
    RatMatrix da = a.differential().block(k + 1);
    RatMatrix fa = f.block(k + 1);
    RatMatrix db = b.differential().block(k);
    for (size_t j = 0; j < na; ++j) {
      for (size_t i = 0; i < ma; ++i)
        blk(i, j) = -da(i, j);
      for (size_t i = 0; i < fa.rows(); ++i)
        blk(ma + i, j) = fa(i, j);
    }
    for (size_t j = 0; j < nb; ++j)
      for (size_t i = 0; i < db.rows(); ++i)
        blk(ma + i, na + j) = db(i, j);
    d.set_block(k, blk);
  }
  return Complex<Rat>(cone, d);
}

std::vector<int> cone_defects(const Complex<Rat>& a, const Complex<Rat>& b, const GradedMap<Rat>& f) {
  std::vector<int> bad;
  for (const auto& [k, g] : cohomology(mapping_cone(a, b, f)))
    if (g.dim > 0)
      bad.push_back(k);
  return bad;
}

std::string format_vec(const GradedSpace& space, const Vec<Rat>& v) {
  if (v.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : v) {
    if (!first)
      os << (c.sign() < 0 ? " - " : " + ");
    else if (c.sign() < 0)
      os << "-";
    Rat a = c.sign() < 0 ? -c : c;
    if (!a.is_one())
      os << a << "*";
    os << space.label(e);
    first = false;
  }
  return os.str();
}

} // namespace linfty
