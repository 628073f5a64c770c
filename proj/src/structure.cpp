#include "linfty/structure.hpp"

#include <sstream>

namespace linfty {

template <class S>
Vec<S> Structure<S>::curvature() const {
  auto it = ops.find(Word{});
  return it == ops.end() ? Vec<S>{} : it->second;
}

template <class S>
bool Morphism<S>::is_linear() const {
  for (const auto& [w, v] : components)
    if (w.size() > 1 && !v.empty())
      return false;
  return true;
}

std::string format_word(const GradedSpace& space, const Word& w) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < w.size(); ++i)
    os << (i ? "," : "") << space.label(w[i]);
  os << ")";
  return os.str();
}

namespace {

template <class S>
void check_entry_space(const GradedSpace& in, const GradedSpace& out, const Word& w, const Vec<S>& v,
                       int shift, const char* what) {
  for (const auto& e : w)
    if (!in.contains(e))
      throw Error(ErrorCode::SpaceMismatch, std::string(what) + ": input outside source space");
  if (!is_canonical(w))
    throw Error(ErrorCode::NonCanonicalWord, std::string(what) + " " + format_word(in, w));
  for (const auto& [e, c] : v) {
    if (!out.contains(e))
      throw Error(ErrorCode::SpaceMismatch, std::string(what) + " " + format_word(in, w) + ": output outside target");
    if (e.degree != word_degree(w) + shift)
      throw Error(ErrorCode::DegreeRuleViolation,
                  std::string(what) + " " + format_word(in, w) + " -> " + out.label(e) + " has output degree " +
                      std::to_string(e.degree) + ", expected " + std::to_string(word_degree(w) + shift));
    if (c.is_zero())
      throw Error(ErrorCode::SchemaError, std::string(what) + " " + format_word(in, w) + ": stored zero");
  }
}

} // namespace

template <class S>
void validate_structure(const Structure<S>& s) {
  for (int d : s.space.degrees())
    if (d < 1)
      throw Error(ErrorCode::DegreeRuleViolation, "space must have positive amplitude, found degree " + std::to_string(d));
  for (const auto& [w, v] : s.ops)
    check_entry_space(s.space, s.space, w, v, 1, "operation");
}

template <class S>
void validate_morphism(const Morphism<S>& m) {
  validate_structure(m.source);
  validate_structure(m.target);
  for (const auto& [w, v] : m.components) {
    if (w.empty())
      throw Error(ErrorCode::DegreeRuleViolation, "morphism has an arity-0 component");
    check_entry_space(m.source.space, m.target.space, w, v, 0, "component");
  }
}

template <class S>
Vec<S> apply_table(const MultiMap<S>& table, const SymElem<S>& x) {
  Vec<S> r;
  for (const auto& [w, c] : x) {
    auto it = table.find(w);
    if (it != table.end())
      axpy(r, c, it->second);
  }
  return r;
}

template <class S>
SymElem<S> coderivation(const MultiMap<S>& ops, const Word& w) {
  SymElem<S> r;
  for (const auto& u : coproduct(w)) {
    auto it = ops.find(u.left);
    if (it == ops.end())
      continue;
    auto p = sym_product(as_sym(it->second), unit_word<S>(u.right));
    add_scaled(r, S(Rat(u.count)), p);
  }
  return r;
}

template <class S>
SymElem<S> coalgebra_image(const MultiMap<S>& components, const Word& w) {
  if (w.empty())
    return unit_word<S>(w);
  SymElem<S> r;
  for (const auto& part : all_block_partitions(w)) {
    SymElem<S> acc = unit_word<S>(Word{});
    for (const auto& b : part.blocks) {
      auto it = components.find(b);
      if (it == components.end()) {
        acc.clear();
        break;
      }
      acc = sym_product(acc, as_sym(it->second));
      if (acc.empty())
        break;
    }
    add_scaled(r, S(Rat(part.count)), acc);
  }
  return r;
}

template <class S>
CheckReport<S> check_relations(const Structure<S>& s) {
  CheckReport<S> rep;
  int n = s.amplitude();
  if (n < 2)
    return rep;
  for (const auto& w : canonical_words(s.space, n - 2)) {
    ++rep.words_checked;
    auto defect = apply_table(s.ops, coderivation(s.ops, w));
    if (!defect.empty()) {
      rep.pass = false;
      rep.word = w;
      rep.defect = std::move(defect);
      return rep;
    }
  }
  return rep;
}

template <class S>
CheckReport<S> check_morphism(const Morphism<S>& m) {
  validate_morphism(m);
  CheckReport<S> rep;
  int n = m.target.amplitude();
  if (n < 1)
    return rep;
  for (const auto& w : canonical_words(m.source.space, n - 1)) {
    ++rep.words_checked;
    Vec<S> lhs = apply_table(m.components, coderivation(m.source.ops, w));
    Vec<S> rhs = apply_table(m.target.ops, coalgebra_image(m.components, w));
    axpy(lhs, S(Rat(-1)), rhs);
    if (!lhs.empty()) {
      rep.pass = false;
      rep.word = w;
      rep.defect = std::move(lhs);
      return rep;
    }
  }
  return rep;
}

template <class S>
Morphism<S> compose(const Morphism<S>& second, const Morphism<S>& first) {
  if (!(first.target.space == second.source.space))
    throw Error(ErrorCode::SpaceMismatch, "composition: target of the first map is not the source of the second");
  Morphism<S> r{first.source, second.target, {}};
  for (const auto& w : canonical_words(first.source.space, second.target.amplitude())) {
    if (w.empty())
      continue;
    auto v = apply_table(second.components, coalgebra_image(first.components, w));
    if (!v.empty())
      r.components.emplace(w, std::move(v));
  }
  return r;
}

template <class S>
Morphism<S> identity_morphism(const Structure<S>& s) {
  Morphism<S> r{s, s, {}};
  for (const auto& e : s.space.basis())
    r.components.emplace(Word{e}, Vec<S>{{e, S(Rat(1))}});
  return r;
}

template <class S>
GradedMap<S> linear_part(const MultiMap<S>& table, const GradedSpace& source, const GradedSpace& target, int degree) {
  GradedMap<S> m(source, target, degree);
  for (const auto& [w, v] : table)
    if (w.size() == 1)
      for (const auto& [e, c] : v)
        m.set(w[0], e, c);
  return m;
}

template <class S>
MultiMap<S> to_table(const GradedMap<S>& m) {
  MultiMap<S> t;
  for (const auto& e : m.source().basis()) {
    auto v = m.apply(e);
    if (!v.empty())
      t.emplace(Word{e}, std::move(v));
  }
  return t;
}

namespace {

GradedMap<Rat> invert_linear(const GradedSpace& space, const MultiMap<Rat>& psi) {
  auto lin = linear_part(psi, space, space, 0);
  GradedMap<Rat> inv(space, space, 0);
  for (int k : space.degrees()) {
    try {
      inv.set_block(k, inverse(lin.block(k)));
    } catch (const Error&) {
      throw Error(ErrorCode::NotInvertible, "linear part singular in degree " + std::to_string(k));
    }
  }
  return inv;
}

} // namespace

Structure<Rat> gauge_conjugate(const Structure<Rat>& s, const MultiMap<Rat>& psi) {
  auto inv = invert_linear(s.space, psi);
  Structure<Rat> out{s.space, {}};
  int n = s.amplitude();
  if (n < 1)
    return out;
  for (const auto& w : canonical_words(s.space, n - 1)) {
    Vec<Rat> d = apply_table(s.ops, coalgebra_image(psi, w));
    axpy(d, Rat(-1), apply_table(psi, coderivation(out.ops, w)));
    auto v = inv.apply(d);
    if (!v.empty())
      out.ops.emplace(w, std::move(v));
  }
  return out;
}

MultiMap<Rat> inverse_morphism(const GradedSpace& space, const MultiMap<Rat>& psi) {
  auto inv = invert_linear(space, psi);
  MultiMap<Rat> chi;
  for (const auto& w : canonical_words(space, space.max_degree())) {
    if (w.empty())
      continue;
    Vec<Rat> d;
    if (w.size() == 1)
      d.emplace(w[0], Rat(1));
    axpy(d, Rat(-1), apply_table(psi, coalgebra_image(chi, w)));
    auto v = inv.apply(d);
    if (!v.empty())
      chi.emplace(w, std::move(v));
  }
  return chi;
}

Complex<Rat> tangent_complex(const Structure<Rat>& s) {
  if (s.is_curved())
    throw Error(ErrorCode::NotClassical, "curvature " + format_vec(s.space, s.curvature()) + " is nonzero");
  return Complex<Rat>(s.space, linear_part(s.ops, s.space, s.space, 1));
}

EtaleReport etale_pair(const Morphism<Rat>& m) {
  auto a = tangent_complex(m.source);
  auto b = tangent_complex(m.target);
  auto f = linear_part(m.components, m.source.space, m.target.space, 0);
  EtaleReport rep;
  for (const auto& [k, g] : cohomology(a))
    rep.source_dims[k] = g.dim;
  for (const auto& [k, g] : cohomology(b))
    rep.target_dims[k] = g.dim;
  rep.defect_degrees = cone_defects(a, b, f);
  rep.etale = rep.defect_degrees.empty();
  return rep;
}

MultiMap<Rat> evaluate(const MultiMap<Poly>& m, std::span<const Rat> point) {
  MultiMap<Rat> r;
  for (const auto& [w, v] : m) {
    Vec<Rat> out;
    for (const auto& [e, c] : v)
      add_to(out, e, c.eval(point));
    if (!out.empty())
      r.emplace(w, std::move(out));
  }
  return r;
}

MultiMap<Poly> to_poly(const MultiMap<Rat>& m) {
  MultiMap<Poly> r;
  for (const auto& [w, v] : m) {
    Vec<Poly> out;
    for (const auto& [e, c] : v)
      out.emplace(e, Poly(c));
    r.emplace(w, std::move(out));
  }
  return r;
}

Structure<Poly> to_poly(const Structure<Rat>& s) { return {s.space, to_poly(s.ops)}; }

Structure<Rat> evaluate(const Structure<Poly>& s, std::span<const Rat> point) {
  return {s.space, evaluate(s.ops, point)};
}

#define LINFTY_INSTANTIATE(S)                                                                                  \
  template struct Structure<S>;                                                                                \
  template struct Morphism<S>;                                                                                 \
  template void validate_structure(const Structure<S>&);                                                       \
  template void validate_morphism(const Morphism<S>&);                                                         \
  template Vec<S> apply_table(const MultiMap<S>&, const SymElem<S>&);                                          \
  template SymElem<S> coderivation(const MultiMap<S>&, const Word&);                                           \
  template SymElem<S> coalgebra_image(const MultiMap<S>&, const Word&);                                        \
  template CheckReport<S> check_relations(const Structure<S>&);                                                \
  template CheckReport<S> check_morphism(const Morphism<S>&);                                                  \
  template Morphism<S> compose(const Morphism<S>&, const Morphism<S>&);                                        \
  template Morphism<S> identity_morphism(const Structure<S>&);                                                 \
  template GradedMap<S> linear_part(const MultiMap<S>&, const GradedSpace&, const GradedSpace&, int);          \
  template MultiMap<S> to_table(const GradedMap<S>&);

LINFTY_INSTANTIATE(Rat)
LINFTY_INSTANTIATE(Poly)
#undef LINFTY_INSTANTIATE

namespace fixtures {

Structure<Rat> e1() {
  Structure<Rat> s{GradedSpace({{1, {"e1"}}, {2, {"e2"}}}), {}};
  s.ops[{{1, 0}}] = {{{2, 0}, Rat(1)}};
  return s;
}

Structure<Rat> e2() {
  Structure<Rat> s{GradedSpace({{1, {"e1"}}}), {}};
  s.ops[{}] = {{{1, 0}, Rat(1)}};
  return s;
}

Structure<Rat> e4() {
  Structure<Rat> s{GradedSpace({{2, {"h"}}, {4, {"m"}}, {5, {"b", "c"}}}), {}};
  s.ops[{{4, 0}}] = {{{5, 0}, Rat(1)}};
  s.ops[{{2, 0}, {2, 0}}] = {{{5, 0}, Rat(1)}, {{5, 1}, Rat(1)}};
  return s;
}

Structure<Rat> e5() {
  Structure<Rat> s{GradedSpace({{1, {"x"}}, {2, {"k2"}}, {3, {"k3"}}}), {}};
  s.ops[{{2, 0}}] = {{{3, 0}, Rat(1)}};
  return s;
}

Structure<Rat> e5_target() { return {GradedSpace({{1, {"x'"}}}), {}}; }

Morphism<Rat> e5_projection() {
  Morphism<Rat> m{e5(), e5_target(), {}};
  m.components[{{1, 0}}] = {{{1, 0}, Rat(1)}};
  return m;
}

Structure<Rat> zero(const GradedSpace& space) { return {space, {}}; }

} // namespace fixtures

} // namespace linfty
