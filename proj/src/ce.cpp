#include "linfty/ce.hpp"

#include <sstream>

namespace linfty {

int ce_degree(const Word& w) { return -word_degree(w); }

namespace {

long multiplicity_factor(const Word& w) {
  long r = 1, run = 1;
  for (size_t i = 1; i <= w.size(); ++i) {
    if (i < w.size() && w[i] == w[i - 1]) {
      r *= ++run;
    } else {
      run = 1;
    }
  }
  return r;
}

template <class S>
SymElem<S> dual_of_table(const MultiMap<S>& table, BasisElem c) {
  SymElem<S> r;
  for (const auto& [w, v] : table) {
    auto it = v.find(c);
    if (it != v.end())
      add_term(r, w, S(Rat(1, multiplicity_factor(w))) * it->second);
  }
  return r;
}

} // namespace

template <class S>
CEPresentation<S> build_ce(const Structure<S>& s) {
  validate_structure(s);
  CEPresentation<S> p{s.space, {}};
  for (const auto& c : s.space.basis())
    p.q[c] = dual_of_table(s.ops, c);
  return p;
}

CEPresentation<Poly> build_ce(const BundleChart& b) {
  validate_chart(b);
  return build_ce(b.fiber);
}

template <class S>
SymElem<S> apply_derivation(const GeneratorTable<S>& gens, const SymElem<S>& x, bool odd) {
  SymElem<S> r;
  for (const auto& [w, c] : x) {
    int parity = 0;
    for (size_t i = 0; i < w.size(); ++i) {
      auto g = gens.find(w[i]);
      if (g != gens.end() && !g->second.empty()) {
        Word pre(w.begin(), w.begin() + i), post(w.begin() + i + 1, w.end());
        auto term = sym_product(sym_product(unit_word<S>(pre), g->second), unit_word<S>(post));
        S coef = (odd && parity) ? -c : c;
        add_scaled(r, coef, term);
      }
      parity ^= is_odd(w[i].degree) ? 1 : 0;
    }
  }
  return r;
}

template <class S>
SymElem<S> apply_algebra_map(const GeneratorTable<S>& gens, const SymElem<S>& x) {
  SymElem<S> r;
  for (const auto& [w, c] : x) {
    SymElem<S> acc = unit_word<S>({});
    for (const auto& e : w) {
      auto g = gens.find(e);
      if (g == gens.end()) {
        acc.clear();
        break;
      }
      acc = sym_product(acc, g->second);
      if (acc.empty())
        break;
    }
    add_scaled(r, c, acc);
  }
  return r;
}

template <class S>
QSquareReport<S> q_square_check(const CEPresentation<S>& p) {
  QSquareReport<S> rep;
  for (const auto& [c, qc] : p.q) {
    ++rep.generators_checked;
    auto d = apply_derivation(p.q, qc, true);
    if (!d.empty()) {
      rep.pass = false;
      rep.generator = c;
      rep.defect = std::move(d);
      return rep;
    }
  }
  return rep;
}

namespace {

/// The CE complex in degrees -depth-1..0, which is closed under Q.
struct Truncation {
  std::map<int, std::vector<Word>> words;
  std::map<Word, int> index;
  GradedSpace space;
  GradedMap<Rat> d;
};

Truncation truncate(const CEPresentation<Rat>& p, int depth) {
  Truncation t;
  for (const auto& w : canonical_words(p.space, depth + 1)) {
    int q = ce_degree(w);
    auto& bucket = t.words[q];
    t.index[w] = static_cast<int>(bucket.size());
    bucket.push_back(w);
  }
  std::map<int, std::vector<std::string>> labels;
  for (const auto& [q, ws] : t.words)
    for (const auto& w : ws)
      labels[q].push_back(format_word(p.space, w));
  t.space = GradedSpace(labels);
  t.d = GradedMap<Rat>(t.space, t.space, 1);
  for (const auto& [q, ws] : t.words)
    for (const auto& w : ws) {
      auto img = apply_derivation(p.q, unit_word<Rat>(w), true);
      for (const auto& [v, c] : img)
        t.d.set({q, t.index.at(w)}, {q + 1, t.index.at(v)}, c);
    }
  return t;
}

SymElem<Rat> to_sym(const Truncation& t, const Vec<Rat>& v) {
  SymElem<Rat> r;
  for (const auto& [e, c] : v)
    add_term(r, t.words.at(e.degree)[e.index], c);
  return r;
}

std::map<int, CEDegree> cohomology_of(const Truncation& t, int depth) {
  Complex<Rat> cx(t.space, t.d);
  auto groups = cohomology(cx);
  std::map<int, CEDegree> out;
  for (int q = -depth; q <= 0; ++q) {
    CEDegree d;
    d.chain_dim = t.space.dim(q);
    auto it = groups.find(q);
    if (it != groups.end()) {
      d.dim = it->second.dim;
      for (const auto& r : it->second.representatives)
        d.representatives.push_back(to_sym(t, r));
    }
    out[q] = std::move(d);
  }
  return out;
}

} // namespace

std::map<int, CEDegree> ce_cohomology(const CEPresentation<Rat>& p, int max_depth) {
  return cohomology_of(truncate(p, max_depth), max_depth);
}

std::map<int, CEDegree> ce_cohomology(const CEPresentation<Poly>& p, int) {
  (void)p;
  throw Error(ErrorCode::ChartBase, "cohomology over a polynomial base has no finite truncation");
}

CEMap ce_pullback(const Morphism<Rat>& m) {
  auto rep = check_morphism(m);
  if (!rep.pass)
    throw Error(ErrorCode::NotAMorphism, "morphism identity fails on " + format_word(m.source.space, rep.word));
  CEMap f{m.target.space, m.source.space, {}};
  for (const auto& c : m.target.space.basis())
    f.images[c] = dual_of_table(m.components, c);
  return f;
}

Verdict chain_map_check(const CEMap& f, const CEPresentation<Rat>& domain, const CEPresentation<Rat>& codomain) {
  for (const auto& [c, qc] : domain.q) {
    auto it = f.images.find(c);
    SymElem<Rat> img = it == f.images.end() ? SymElem<Rat>{} : it->second;
    auto lhs = apply_derivation(codomain.q, img, true);
    auto rhs = apply_algebra_map(f.images, qc);
    if (lhs != rhs)
      return {"chain-map", Status::Fail, "generator dual to " + domain.space.label(c)};
  }
  return {"chain-map", Status::Pass, {}};
}

QuasiIsoReport quasi_iso_check(const Morphism<Rat>& m, int max_depth) {
  auto f = ce_pullback(m);
  auto src = build_ce(m.source), tgt = build_ce(m.target);
  QuasiIsoReport rep;
  rep.chain_map = chain_map_check(f, tgt, src);
  auto ts = truncate(src, max_depth), tt = truncate(tgt, max_depth);
  auto hs = cohomology_of(ts, max_depth), ht = cohomology_of(tt, max_depth);
  for (int q = -max_depth; q <= 0; ++q) {
    QuasiIsoDegree d{hs[q].dim, ht[q].dim, 0};
    size_t rows = ts.space.dim(q);
    size_t nb = ts.space.dim(q - 1);
    RatMatrix a(rows, nb + ht[q].representatives.size());
    if (nb && rows) {
      const auto& blk = ts.d.block(q - 1);
      for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < nb; ++j)
          a(i, j) = blk(i, j);
    }
    for (size_t j = 0; j < ht[q].representatives.size(); ++j)
      for (const auto& [w, c] : apply_algebra_map(f.images, ht[q].representatives[j]))
        a(ts.index.at(w), nb + j) = c;
    size_t rb = 0;
    if (rows && nb) {
      RatMatrix b(rows, nb);
      for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < nb; ++j)
          b(i, j) = a(i, j);
      rb = rank(b);
    }
    d.rank = rows ? rank(a) - rb : 0;
    if (!(d.source_dim == d.target_dim && d.rank == d.source_dim))
      rep.failing_degrees.push_back(q);
    rep.degrees[q] = d;
  }
  rep.pass = rep.chain_map.status == Status::Pass && rep.failing_degrees.empty();
  return rep;
}

Verdict weak_equivalence_check(const Morphism<Rat>& m) {
  bool src = !m.source.is_curved(), tgt = !m.target.is_curved();
  if (src != tgt)
    return {"weak-equivalence", Status::Fail, "classical loci differ"};
  if (!src)
    return {"weak-equivalence", Status::Pass, {}};
  auto e = etale_pair(m);
  std::string detail;
  for (int k : e.defect_degrees)
    detail += (detail.empty() ? "cone cohomology in degree " : ", ") + std::to_string(k);
  return pass_if("weak-equivalence", e.etale, detail);
}

BigradingReport bigrading_audit(const CEPresentation<Rat>& p) {
  BigradingReport rep;
  std::map<size_t, BigradingComponent> parts;
  for (const auto& [c, qc] : p.q) {
    int k_src = -c.degree + 1, l_src = -1;
    for (const auto& [w, coef] : qc) {
      size_t n = w.size();
      auto& comp = parts[n];
      comp.arity = n;
      comp.name = n == 1 ? "delta" : "q" + std::to_string(n);
      int l = -static_cast<int>(n), k = ce_degree(w) + static_cast<int>(n);
      int dk = k - k_src, dl = l - l_src;
      if (comp.terms == 0) {
        comp.shift_k = dk;
        comp.shift_l = dl;
      }
      comp.ok = comp.ok && dk == comp.shift_k && dl == comp.shift_l && dk == static_cast<int>(n) &&
                dl == 1 - static_cast<int>(n);
      ++comp.terms;
    }
  }
  for (auto& [n, comp] : parts) {
    rep.pass = rep.pass && comp.ok;
    rep.components.push_back(comp);
  }
  return rep;
}

std::string format_sym(const GradedSpace& space, const SymElem<Rat>& x) {
  if (x.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, c] : x) {
    Rat a = c;
    if (!first)
      os << (a.sign() < 0 ? " - " : " + ");
    else if (a.sign() < 0)
      os << "-";
    if (a.sign() < 0)
      a = -a;
    std::string mono;
    for (size_t i = 0; i < w.size(); ++i)
      mono += (i ? "*" : "") + std::string("xi_") + space.label(w[i]);
    if (mono.empty())
      os << a;
    else if (a.is_one())
      os << mono;
    else
      os << a << "*" << mono;
    first = false;
  }
  return os.str();
}

#define LINFTY_CE_INSTANTIATE(S)                                                                        \
  template CEPresentation<S> build_ce(const Structure<S>&);                                              \
  template SymElem<S> apply_derivation(const GeneratorTable<S>&, const SymElem<S>&, bool);               \
  template SymElem<S> apply_algebra_map(const GeneratorTable<S>&, const SymElem<S>&);                   \
  template QSquareReport<S> q_square_check(const CEPresentation<S>&);

LINFTY_CE_INSTANTIATE(Rat)
LINFTY_CE_INSTANTIATE(Poly)

} // namespace linfty
