#include "linfty/ce.hpp"

namespace linfty {

namespace {

/// Dual of a linear endomorphism f of L: xi_c -> sum_e f(e)[c] xi_e.
GeneratorTable<Rat> dual_table(const GradedMap<Rat>& f) {
  GeneratorTable<Rat> g;
  for (const auto& e : f.source().basis())
    for (const auto& [c, x] : f.apply(e))
      add_term(g[c], Word{e}, x);
  std::erase_if(g, [](const auto& kv) { return kv.second.empty(); });
  return g;
}

Rat binomial(size_t n, size_t k) {
  Rat r(1);
  for (size_t i = 0; i < k; ++i)
    r = r * Rat(static_cast<long>(n - i)) / Rat(static_cast<long>(i + 1));
  return r;
}

} // namespace

TransferHomotopy transfer_homotopy_h(const TransferResult& t) {
  const auto& L = t.source.space;
  if (!(t.etatilde.source() == L && t.etatilde.target() == L && t.etatilde.degree() == -1))
    throw Error(ErrorCode::MissingEtaTilde, "transfer result carries no deformed homotopy on the source space");
  const auto& H = t.h.space;
  auto phi1 = linear_part(t.phi.components, H, L, 0);
  auto pi1 = linear_part(t.pitilde.components, L, H, 0);
  TransferHomotopy h;
  h.projector = dual_table(phi1 * pi1);
  h.eta_dual = dual_table(t.etatilde);
  h.differential = dual_table(linear_part(t.source.ops, L, L, 1));
  return h;
}

// h(W) = sum over unshuffles (A, B) with B nonempty of
//   sign(A,B) (-1)^{|A|} / C(|W|, |A|) * P(A) * E(B) / |B|
SymElem<Rat> apply_h(const TransferHomotopy& h, const SymElem<Rat>& x) {
  SymElem<Rat> r;
  for (const auto& [w, c] : x) {
    size_t k = w.size();
    for (size_t i = 0; i < k; ++i)
      for (const auto& u : unshuffles(w, i)) {
        Rat coef = c * Rat(u.count) / binomial(k, i) / Rat(static_cast<long>(u.right.size()));
        if (is_odd(word_degree(u.left)))
          coef = -coef;
        auto a = apply_algebra_map(h.projector, unit_word<Rat>(u.left));
        auto b = apply_derivation(h.eta_dual, unit_word<Rat>(u.right), true);
        add_scaled(r, coef, sym_product(a, b));
      }
  }
  return r;
}

HeqReport heq_check(const TransferResult& t, size_t max_weight) {
  HeqReport rep;
  if (t.source.is_curved()) {
    rep.status = Status::Skipped;
    rep.detail = "identity is stated for uncurved sources";
    return rep;
  }
  auto h = transfer_homotopy_h(t);
  const auto& L = t.source.space;
  int top = L.empty() ? 0 : L.max_degree() * static_cast<int>(max_weight);
  for (const auto& w : canonical_words(L, top, max_weight)) {
    ++rep.words_checked;
    auto unit = unit_word<Rat>(w);
    auto lhs = apply_derivation(h.differential, apply_h(h, unit), true);
    auto back = apply_h(h, apply_derivation(h.differential, unit, true));
    add_scaled(lhs, Rat(1), back);
    auto rhs = unit;
    add_scaled(rhs, Rat(-1), apply_algebra_map(h.projector, unit));
    if (lhs != rhs) {
      rep.status = Status::Fail;
      rep.word = w;
      add_scaled(lhs, Rat(-1), rhs);
      rep.defect = std::move(lhs);
      rep.detail = "identity fails on " + format_word(L, w);
      return rep;
    }
  }
  return rep;
}

} // namespace linfty
