#include "linfty/transfer.hpp"

namespace linfty {

namespace {

// l(args[0] . args[1] . ...) by expanding every argument in the basis.
Vec<Rat> multi_eval(const MultiMap<Rat>& table, const std::vector<Vec<Rat>>& args) {
  Vec<Rat> out;
  Word w;
  auto rec = [&](auto&& self, size_t i, const Rat& coef) -> void {
    if (i == args.size()) {
      auto c = canonicalize(w);
      if (!c)
        return;
      auto it = table.find(c->first);
      if (it != table.end())
        axpy(out, c->second < 0 ? -coef : coef, it->second);
      return;
    }
    for (const auto& [e, x] : args[i]) {
      w.push_back(e);
      self(self, i + 1, coef * x);
      w.pop_back();
    }
  };
  rec(rec, 0, Rat(1));
  return out;
}

struct Expansion {
  const MultiMap<Rat>& lam;
  const GradedMap<Rat>& eta;
  GradedMap<Rat> lam1;
  int bound;

  // sum_r (-eta l1)^r x
  Vec<Rat> resolvent(Vec<Rat> x) const {
    Vec<Rat> total;
    for (int r = 0; !x.empty(); ++r) {
      if (r > bound)
        throw Error(ErrorCode::NoConvergence, "tree expansion does not terminate");
      axpy(total, Rat(1), x);
      x = scaled(eta.apply(lam1.apply(x)), Rat(-1));
    }
    return total;
  }
  Vec<Rat> tree_root(const Vec<Rat>& inner) const { return scaled(resolvent(eta.apply(inner)), Rat(-1)); }
};

Vec<Rat> lookup(const MultiMap<Rat>& t, const Word& w) {
  auto it = t.find(w);
  return it == t.end() ? Vec<Rat>{} : it->second;
}

} // namespace

OracleTables expansion_oracle(const Structure<Rat>& s, const ContractionData& c) {
  OracleTables out;
  auto lam = perturbation(s, c.delta);
  auto h = compute_H(c);
  const auto& H = h.space;
  int n = s.amplitude();
  Expansion ex{lam, c.eta, linear_part(lam, s.space, s.space, 1), c.filtration.length(s.space) + 1};

  // inner(w): sum over the trees with at least two leaves below the root
  auto inner = [&](const Word& w) -> Vec<Rat> {
    Vec<Rat> v;
    if (w.size() == 2) {
      v = multi_eval(lam, {lookup(out.phi, {w[0]}), lookup(out.phi, {w[1]})});
    } else if (w.size() == 3) {
      const int splits[3][3] = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}};
      for (const auto& sp : splits) {
        int sign = permutation_sign(w, {sp[0], sp[1], sp[2]});
        Word pair{w[sp[0]], w[sp[1]]};
        auto two = lookup(out.phi, pair);
        auto one = lookup(out.phi, {w[sp[2]]});
        // blocks ordered by smallest position
        auto val = sp[2] == 0 ? multi_eval(lam, {one, two}) : multi_eval(lam, {two, one});
        if (sp[2] == 0)
          sign = 1;
        axpy(v, Rat(sign), val);
      }
      axpy(v, Rat(1),
           multi_eval(lam, {lookup(out.phi, {w[0]}), lookup(out.phi, {w[1]}), lookup(out.phi, {w[2]})}));
    }
    return v;
  };

  for (const auto& w : canonical_words(H, n, 3)) {
    if (w.empty())
      continue;
    Vec<Rat> v = w.size() == 1 ? ex.resolvent(h.iota.apply(w[0])) : ex.tree_root(inner(w));
    if (!v.empty())
      out.phi.emplace(w, std::move(v));
  }
  auto delta_h = h.pi * c.delta * h.iota;
  for (const auto& w : canonical_words(H, n - 1, 3)) {
    Vec<Rat> v;
    if (w.empty()) {
      v = lookup(lam, w);
    } else {
      v = ex.lam1.apply(lookup(out.phi, w));
      axpy(v, Rat(1), inner(w));
    }
    v = h.pi.apply(v);
    if (w.size() == 1)
      axpy(v, Rat(1), delta_h.apply(w[0]));
    if (!v.empty())
      out.mu.emplace(w, std::move(v));
  }
  return out;
}

Verdict oracle_agreement(const TransferResult& t) {
  auto o = expansion_oracle(t.source, t.contraction);
  auto restrict3 = [](const MultiMap<Rat>& m) {
    MultiMap<Rat> r;
    for (const auto& [w, v] : m)
      if (w.size() <= 3)
        r.emplace(w, v);
    return r;
  };
  const auto& H = t.h.space;
  auto diff = [&](const MultiMap<Rat>& a, const MultiMap<Rat>& b, const GradedSpace& out, const char* what) {
    for (const auto& w : canonical_words(H, H.max_degree() + t.source.amplitude(), 3)) {
      auto x = lookup(a, w), y = lookup(b, w);
      if (x != y)
        return std::string(what) + format_word(H, w) + ": solver " + format_vec(out, x) + ", trees " + format_vec(out, y);
    }
    return std::string();
  };
  std::string d = diff(restrict3(t.phi.components), o.phi, t.source.space, "phi");
  if (d.empty())
    d = diff(restrict3(t.mu.ops), o.mu, H, "mu");
  return pass_if("oracle-agreement", d.empty(), d);
}

} // namespace linfty
