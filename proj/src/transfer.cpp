#include "linfty/transfer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace linfty {

const char* to_string(Status s) {
  switch (s) {
  case Status::Pass: return "pass";
  case Status::Fail: return "fail";
  case Status::Skipped: return "skipped";
  }
  return "?";
}

int Filtration::weight(BasisElem e) const {
  switch (kind) {
  case Kind::Natural: return e.degree;
  case Kind::Variation: return e.degree == level - 1 ? level : e.degree;
  case Kind::Custom: {
    auto it = weights.find(e);
    return it == weights.end() ? e.degree : it->second;
  }
  }
  return e.degree;
}

int Filtration::length(const GradedSpace& space) const {
  auto basis = space.basis();
  if (basis.empty())
    return 1;
  int lo = weight(basis.front()), hi = lo;
  for (const auto& e : basis) {
    lo = std::min(lo, weight(e));
    hi = std::max(hi, weight(e));
  }
  return hi - lo + 1;
}

ContractionData trivial_contraction(const GradedSpace& space) {
  return {space, GradedMap<Rat>(space, space, 1), GradedMap<Rat>(space, space, -1), Filtration::natural()};
}

MultiMap<Rat> perturbation(const Structure<Rat>& s, const GradedMap<Rat>& delta) {
  MultiMap<Rat> lam = s.ops;
  for (const auto& e : s.space.basis())
    add_entry(lam, Word{e}, scaled(delta.apply(e), Rat(-1)));
  return lam;
}

namespace {

std::string describe_map_entry(const GradedSpace& sp, BasisElem in, BasisElem out) {
  return sp.label(in) + " -> " + sp.label(out);
}

Verdict filtered_map(const GradedMap<Rat>& m, const Filtration& f, const std::string& name) {
  for (const auto& e : m.source().basis())
    for (const auto& [o, c] : m.apply(e))
      if (f.weight(o) < f.weight(e))
        return {name, Status::Fail,
                describe_map_entry(m.source(), e, o) + " lowers weight " + std::to_string(f.weight(e)) + " to " +
                    std::to_string(f.weight(o))};
  return {name, Status::Pass, {}};
}

Verdict filtered_perturbation(const MultiMap<Rat>& lam, const GradedSpace& sp, const Filtration& f) {
  for (const auto& [w, v] : lam) {
    int need = 1;
    for (const auto& e : w)
      need = std::max(need, f.weight(e) + 1);
    for (const auto& [o, c] : v)
      if (f.weight(o) < need)
        return {"perturbation-filtered", Status::Fail,
                "entry " + format_word(sp, w) + " -> " + sp.label(o) + " has weight " + std::to_string(f.weight(o)) +
                    ", needs " + std::to_string(need)};
  }
  return {"perturbation-filtered", Status::Pass, {}};
}

} // namespace

std::vector<Verdict> validate_contraction(const ContractionData& c, const Structure<Rat>& s) {
  if (!(c.space == s.space))
    throw Error(ErrorCode::SpaceMismatch, "contraction and structure live on different spaces");
  if (c.delta.degree() != 1 || c.eta.degree() != -1 || !(c.delta.source() == c.space) ||
      !(c.eta.source() == c.space) || !(c.delta.target() == c.space) || !(c.eta.target() == c.space))
    throw Error(ErrorCode::SpaceMismatch, "delta must have degree +1 and eta degree -1 on the space");
  std::vector<Verdict> out;
  out.push_back(pass_if("delta-square", (c.delta * c.delta).is_zero(), "delta*delta != 0"));
  out.push_back(pass_if("eta-square", (c.eta * c.eta).is_zero(), "eta*eta != 0"));
  {
    auto ede = c.eta * c.delta * c.eta;
    std::string witness;
    for (const auto& e : c.space.basis())
      if (ede.apply(e) != c.eta.apply(e)) {
        witness = "eta delta eta(" + c.space.label(e) + ") = " + format_vec(c.space, ede.apply(e)) +
                  " but eta(" + c.space.label(e) + ") = " + format_vec(c.space, c.eta.apply(e));
        break;
      }
    out.push_back(pass_if("eta-delta-eta", witness.empty(), witness));
  }
  out.push_back(filtered_map(c.delta, c.filtration, "delta-filtered"));
  out.push_back(filtered_map(c.eta, c.filtration, "eta-filtered"));
  out.push_back(filtered_perturbation(perturbation(s, c.delta), s.space, c.filtration));
  return out;
}

GradedMap<Rat> commutator(const ContractionData& c) { return c.delta * c.eta + c.eta * c.delta; }

HData compute_H(const ContractionData& c) {
  auto comm = commutator(c);
  auto ker = kernel_subspace(comm);
  HData h{ker.space, ker.inclusion, GradedMap<Rat>(c.space, ker.space, 0)};
  auto proj = GradedMap<Rat>::identity(c.space) - comm;
  // coordinates on H are the coefficients at the free columns
  for (int k : h.space.degrees()) {
    RatMatrix blk(h.space.dim(k), c.space.dim(k));
    RatMatrix p = proj.block(k);
    for (size_t i = 0; i < h.space.dim(k); ++i) {
      auto row = c.space.find(h.space.label({k, static_cast<int>(i)}));
      for (size_t j = 0; j < c.space.dim(k); ++j)
        blk(i, j) = p(row->index, j);
    }
    h.pi.set_block(k, blk);
  }
  return h;
}

namespace {

long binomial(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

// Symmetrised tensor-trick homotopy on Sym(L): eta acts in one slot, the
// projection P = id - [delta, eta] on the slots to its right, the identity on
// the slots to its left, averaged over all placements.
SymElem<Rat> symmetric_homotopy(const Word& w, const GradedMap<Rat>& eta, const GradedMap<Rat>& proj) {
  SymElem<Rat> r;
  int k = static_cast<int>(w.size());
  for (int a = 0; a < k; ++a) {
    auto ea = eta.apply(w[a]);
    if (ea.empty())
      continue;
    std::vector<int> others;
    for (int j = 0; j < k; ++j)
      if (j != a)
        others.push_back(j);
    int m = static_cast<int>(others.size());
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      std::vector<int> left, rest;
      for (int t = 0; t < m; ++t)
        ((mask >> t) & 1u ? left : rest).push_back(others[t]);
      std::vector<int> order = left;
      order.push_back(a);
      order.insert(order.end(), rest.begin(), rest.end());
      int sign = permutation_sign(w, order);
      int left_deg = 0;
      Word lw;
      for (int j : left) {
        left_deg += w[j].degree;
        lw.push_back(w[j]);
      }
      if (is_odd(left_deg))
        sign = -sign;
      Rat coef(sign, k * binomial(k - 1, static_cast<long>(left.size())));
      SymElem<Rat> acc = sym_product(unit_word<Rat>(lw), as_sym(ea));
      for (int j : rest) {
        if (acc.empty())
          break;
        acc = sym_product(acc, as_sym(proj.apply(w[j])));
      }
      add_scaled(r, coef, acc);
    }
  }
  return r;
}

GradedMap<Rat> deformed_homotopy(const GradedMap<Rat>& eta, const GradedMap<Rat>& lam1, int bound) {
  // sum_r (-1)^r eta (l1 eta)^r
  GradedMap<Rat> total = eta;
  GradedMap<Rat> term = eta;
  for (int r = 1;; ++r) {
    term = eta * lam1 * term;
    if (term.is_zero())
      return total;
    if (r > bound)
      throw Error(ErrorCode::NoConvergence, "deformed homotopy series does not terminate");
    total = (r % 2) ? total - term : total + term;
  }
}

} // namespace

TransferResult transfer(const Structure<Rat>& s, const ContractionData& c) {
  validate_structure(s);
  for (const auto& v : validate_contraction(c, s))
    if (v.status == Status::Fail)
      throw Error(ErrorCode::ContractionInvalid, v.name + ": " + v.detail);

  TransferResult t;
  t.source = s;
  t.contraction = c;
  t.lambda = perturbation(s, c.delta);
  t.h = compute_H(c);
  const auto& H = t.h.space;
  int n = s.amplitude();
  int flen = c.filtration.length(s.space);
  int sweep_limit = flen + 1;

  // phi = iota - eta (lambda . phi), solved length by length
  MultiMap<Rat> phi;
  auto hwords = canonical_words(H, n);
  size_t pos = 1; // skip the empty word
  while (pos < hwords.size()) {
    size_t len = hwords[pos].size(), end = pos;
    while (end < hwords.size() && hwords[end].size() == len)
      ++end;
    for (int sweep = 0;; ++sweep) {
      if (sweep > sweep_limit)
        throw Error(ErrorCode::NoConvergence, "phi at arity " + std::to_string(len) + " after " +
                                                  std::to_string(sweep_limit) + " sweeps; perturbation not filtered?");
      MultiMap<Rat> next = phi;
      bool changed = false;
      for (size_t i = pos; i < end; ++i) {
        const Word& w = hwords[i];
        Vec<Rat> v = len == 1 ? t.h.iota.apply(w[0]) : Vec<Rat>{};
        axpy(v, Rat(-1), c.eta.apply(apply_table(t.lambda, coalgebra_image(phi, w))));
        auto it = phi.find(w);
        if (it == phi.end() ? !v.empty() : it->second != v)
          changed = true;
        next.erase(w);
        if (!v.empty())
          next.emplace(w, std::move(v));
      }
      phi = std::move(next);
      t.phi_sweeps = std::max(t.phi_sweeps, sweep + 1);
      if (!changed)
        break;
    }
    pos = end;
  }

  t.mu = Structure<Rat>{H, {}};
  auto delta_h = t.h.pi * c.delta * t.h.iota;
  for (const auto& w : canonical_words(H, n - 1)) {
    Vec<Rat> v = t.h.pi.apply(apply_table(t.lambda, coalgebra_image(phi, w)));
    if (w.size() == 1)
      axpy(v, Rat(1), delta_h.apply(w[0]));
    if (!v.empty())
      t.mu.ops.emplace(w, std::move(v));
  }
  t.phi = Morphism<Rat>{t.mu, s, std::move(phi)};

  // pitilde = [len 1] pi - pitilde . lambda-hat . K, iterated to its fixed point
  auto proj = GradedMap<Rat>::identity(s.space) - commutator(c);
  std::vector<std::pair<Word, SymElem<Rat>>> pushed;
  for (const auto& w : canonical_words(s.space, n)) {
    if (w.empty())
      continue;
    SymElem<Rat> x;
    for (const auto& [kw, kc] : symmetric_homotopy(w, c.eta, proj))
      add_scaled(x, kc, coderivation(t.lambda, kw));
    pushed.emplace_back(w, std::move(x));
  }
  MultiMap<Rat> pt;
  int pt_limit = (flen + 1) * (n + 2);
  for (int sweep = 0;; ++sweep) {
    if (sweep > pt_limit)
      throw Error(ErrorCode::NoConvergence, "pitilde after " + std::to_string(pt_limit) + " sweeps");
    MultiMap<Rat> next;
    for (const auto& [w, x] : pushed) {
      Vec<Rat> v = w.size() == 1 ? t.h.pi.apply(w[0]) : Vec<Rat>{};
      axpy(v, Rat(-1), apply_table(pt, x));
      if (!v.empty())
        next.emplace(w, std::move(v));
    }
    t.pitilde_sweeps = sweep + 1;
    if (next == pt)
      break;
    pt = std::move(next);
  }
  t.pitilde = Morphism<Rat>{s, t.mu, std::move(pt)};

  auto lam1 = linear_part(t.lambda, s.space, s.space, 1);
  t.etatilde = deformed_homotopy(c.eta, lam1, flen + 1);
  return t;
}

namespace {

std::string first_map_difference(const GradedMap<Rat>& a, const GradedMap<Rat>& b, const std::string& what) {
  for (const auto& e : a.source().basis())
    if (a.apply(e) != b.apply(e))
      return what + " differs on " + a.source().label(e) + ": " + format_vec(a.target(), a.apply(e)) + " vs " +
             format_vec(b.target(), b.apply(e));
  return {};
}

Verdict report_verdict(const std::string& name, const CheckReport<Rat>& r, const GradedSpace& in,
                       const GradedSpace& out) {
  if (r.pass)
    return {name, Status::Pass, {}};
  return {name, Status::Fail, "word " + format_word(in, r.word) + " defect " + format_vec(out, r.defect)};
}

} // namespace

std::vector<Verdict> certify(const TransferResult& t) {
  const auto& c = t.contraction;
  const auto& L = t.source.space;
  const auto& H = t.h.space;
  std::vector<Verdict> out;
  out.push_back(report_verdict("mu-relations", check_relations(t.mu), H, H));
  out.push_back(report_verdict("phi-morphism", check_morphism(t.phi), H, L));
  {
    auto comp = compose(t.pitilde, t.phi);
    auto id = identity_morphism(t.mu);
    std::string witness;
    if (comp.components != id.components) {
      for (const auto& w : canonical_words(H, H.max_degree())) {
        if (w.empty())
          continue;
        auto a = comp.components.count(w) ? comp.components.at(w) : Vec<Rat>{};
        auto b = id.components.count(w) ? id.components.at(w) : Vec<Rat>{};
        if (a != b) {
          witness = "on " + format_word(H, w) + ": " + format_vec(H, a);
          break;
        }
      }
    }
    out.push_back(pass_if("pitilde-phi-identity", witness.empty(), witness));
  }
  out.push_back(report_verdict("pitilde-morphism", check_morphism(t.pitilde), L, H));

  auto idH = GradedMap<Rat>::identity(H);
  auto idL = GradedMap<Rat>::identity(L);
  out.push_back(pass_if("pi-iota", t.h.pi * t.h.iota == idH, first_map_difference(t.h.pi * t.h.iota, idH, "pi iota")));
  auto proj = idL - commutator(c);
  out.push_back(pass_if("iota-pi", t.h.iota * t.h.pi == proj, first_map_difference(t.h.iota * t.h.pi, proj, "iota pi")));
  out.push_back(pass_if("pi-eta", (t.h.pi * c.eta).is_zero(), "pi eta != 0"));
  out.push_back(pass_if("eta-iota", (c.eta * t.h.iota).is_zero(), "eta iota != 0"));

  auto full1 = linear_part(t.source.ops, L, L, 1);
  if (!(full1 * full1).is_zero()) {
    out.push_back({"etatilde-identity", Status::Skipped, "(delta + l1)^2 != 0 because of the curvature"});
  } else {
    auto phi1 = linear_part(t.phi.components, H, L, 0);
    auto pt1 = linear_part(t.pitilde.components, L, H, 0);
    auto lhs = full1 * t.etatilde + t.etatilde * full1;
    auto rhs = idL - phi1 * pt1;
    out.push_back(pass_if("etatilde-identity", lhs == rhs, first_map_difference(lhs, rhs, "[delta + l1, etatilde]")));
  }
  {
    // pitilde_1 (1 + l1 eta) = pi
    auto lam1 = linear_part(t.lambda, L, L, 1);
    auto pt1 = linear_part(t.pitilde.components, L, H, 0);
    auto lhs = pt1 + pt1 * lam1 * c.eta;
    out.push_back(pass_if("pitilde1-equation", lhs == t.h.pi, first_map_difference(lhs, t.h.pi, "pitilde1 (1 + l1 eta)")));
  }
  return out;
}

Verdict rank_audit(const GradedMap<Rat>& f, int iso_from, const std::string& name) {
  std::set<int> degs;
  for (int k : f.source().degrees())
    degs.insert(k);
  for (int k : f.target().degrees())
    degs.insert(k);
  for (int k : degs) {
    size_t r = rank(f.block(k));
    size_t ns = f.source().dim(k), nt = f.target().dim(k);
    if (k >= iso_from && !(r == ns && r == nt))
      return {name, Status::Fail, "degree " + std::to_string(k) + " not an isomorphism (rank " + std::to_string(r) +
                                      ", dims " + std::to_string(ns) + " -> " + std::to_string(nt) + ")"};
    if (k < iso_from && r != nt)
      return {name, Status::Fail, "degree " + std::to_string(k) + " not surjective (rank " + std::to_string(r) +
                                      ", target dim " + std::to_string(nt) + ")"};
  }
  return {name, Status::Pass, {}};
}

FirstcaseResult firstcase_reduce(const Morphism<Rat>& m, int k) {
  validate_morphism(m);
  if (m.source.is_curved() || m.target.is_curved())
    throw Error(ErrorCode::HypothesisFailed, "curvature must vanish at the point");
  if (!m.is_linear())
    throw Error(ErrorCode::HypothesisFailed, "morphism is not linear");
  if (k < 2)
    throw Error(ErrorCode::HypothesisFailed, "reduction degree must be at least 2");
  const auto& L = m.source.space;
  auto f = linear_part(m.components, L, m.target.space, 0);
  auto pre = rank_audit(f, k + 1, "input-ranks");
  if (pre.status == Status::Fail)
    throw Error(ErrorCode::HypothesisFailed, pre.detail);

  FirstcaseResult out;
  out.degree = k;
  out.kernel = kernel_subspace(f);
  const auto& K = out.kernel.space;
  const auto& j = out.kernel.inclusion;
  auto lam1 = linear_part(m.source.ops, L, L, 1);
  auto jret = split_mono_retraction(j);
  auto lam1_k = jret * lam1 * j;

  // l1 restricted to K^{k-1} -> K^k, as a map concentrated in one degree
  GradedSpace top({{k, K.labels().count(k) ? K.labels().at(k) : std::vector<std::string>{}}});
  GradedSpace below({{k - 1, K.labels().count(k - 1) ? K.labels().at(k - 1) : std::vector<std::string>{}}});
  GradedMap<Rat> restricted(below, top, 1);
  if (K.dim(k - 1) > 0 && K.dim(k) > 0)
    restricted.set_block(k - 1, lam1_k.block(k - 1));
  GradedMap<Rat> chi;
  try {
    chi = split_epi_section(restricted);
  } catch (const Error& e) {
    throw Error(ErrorCode::NotSurjectiveOnKernel, "l1: K^" + std::to_string(k - 1) + " -> K^" + std::to_string(k) +
                                                      ": " + e.what());
  }

  GradedMap<Rat> eta(L, L, -1);
  GradedMap<Rat> delta(L, L, 1);
  if (L.dim(k) > 0 && L.dim(k - 1) > 0) {
    delta.set_block(k - 1, lam1.block(k - 1));
    if (K.dim(k) > 0) {
      // eta = j chi theta on L^k
      RatMatrix theta = jret.block(k);
      RatMatrix jk = K.dim(k - 1) > 0 ? j.block(k - 1) : RatMatrix(L.dim(k - 1), 0);
      RatMatrix chik = K.dim(k - 1) > 0 ? chi.block(k) : RatMatrix(0, K.dim(k));
      eta.set_block(k, jk * chik * theta);
    }
  }
  out.contraction = ContractionData{L, delta, eta, Filtration::variation(k)};
  out.transfer = transfer(m.source, out.contraction);
  out.composed = compose(m, out.transfer.phi);

  out.verdicts.push_back(pass_if("eta-delta-eta", eta * delta * eta == eta, "eta delta eta != eta"));
  out.verdicts.push_back(pass_if("composed-linear", out.composed.is_linear(), "composition has higher components"));
  out.verdicts.push_back(
      rank_audit(linear_part(out.composed.components, out.transfer.h.space, m.target.space, 0), k, "composed-ranks"));
  {
    auto rep = check_morphism(out.composed);
    out.verdicts.push_back(pass_if("composed-morphism", rep.pass,
                                   "word " + format_word(out.transfer.h.space, rep.word) + " defect " +
                                       format_vec(m.target.space, rep.defect)));
  }
  return out;
}

Step1Result step1_pipeline(const Morphism<Rat>& m) {
  validate_morphism(m);
  if (m.source.is_curved() || m.target.is_curved())
    throw Error(ErrorCode::HypothesisFailed, "curvature must vanish at the point");
  if (!m.is_linear())
    throw Error(ErrorCode::HypothesisFailed, "morphism is not linear");
  auto f = linear_part(m.components, m.source.space, m.target.space, 0);
  int top = std::max(m.source.amplitude(), m.target.amplitude());
  auto surj = rank_audit(f, top + 1, "input-surjective");
  if (surj.status == Status::Fail)
    throw Error(ErrorCode::HypothesisFailed, surj.detail);

  Step1Result out;
  out.final_morphism = m;
  for (int k = m.source.amplitude(); k >= 2; --k) {
    const auto& cur = out.final_morphism;
    auto g = linear_part(cur.components, cur.source.space, cur.target.space, 0);
    if (kernel_subspace(g).space.dim(k) == 0)
      continue;
    out.chain.push_back(firstcase_reduce(cur, k));
    out.final_morphism = out.chain.back().composed;
  }
  const auto& fin = out.final_morphism;
  out.verdicts.push_back(pass_if("final-linear", fin.is_linear(), "final morphism has higher components"));
  out.verdicts.push_back(rank_audit(linear_part(fin.components, fin.source.space, fin.target.space, 0), 2, "final-ranks"));
  for (const auto& step : out.chain)
    for (const auto& v : step.verdicts)
      if (v.status == Status::Fail)
        out.verdicts.push_back({"step-" + std::to_string(step.degree) + "-" + v.name, v.status, v.detail});
  return out;
}

} // namespace linfty

namespace linfty::fixtures {

ContractionData e4_contraction() {
  auto L = e4().space;
  GradedMap<Rat> delta(L, L, 1), eta(L, L, -1);
  delta.set({4, 0}, {5, 0}, Rat(1));
  eta.set({5, 0}, {4, 0}, Rat(1));
  return {L, delta, eta, Filtration::variation(5)};
}

} // namespace linfty::fixtures
