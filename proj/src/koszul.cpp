#include "linfty/koszul.hpp"

#include <bit>
#include <functional>
#include <sstream>

#include "linfty/error.hpp"
#include "linfty/linalg.hpp"

namespace linfty {

KoszulChart KoszulChart::euler(size_t n, size_t k) {
  KoszulChart c{n, k, {}};
  for (size_t i = 0; i < k; ++i)
    c.u.push_back(Poly::variable(i));
  return c;
}

bool KoszulChart::is_euler() const {
  if (u.size() != k)
    return false;
  for (size_t i = 0; i < k; ++i)
    if (!(u[i] == Poly::variable(i)))
      return false;
  return true;
}

namespace {

void add(KoszulElem& x, const KoszulMonomial& m, const Rat& c) {
  if (c.is_zero())
    return;
  auto [it, fresh] = x.try_emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero())
      x.erase(it);
  }
}

int exponent_at(const Exponent& e, size_t i) { return i < e.size() ? e[i] : 0; }

/// Sign of moving xi_i to its sorted slot in mask.
int insertion_sign(unsigned mask, size_t i) {
  return (std::popcount(mask & ((1u << i) - 1)) % 2) ? -1 : 1;
}

void check_chart(const KoszulChart& c) {
  if (c.k > c.n || c.k > 16)
    throw Error(ErrorCode::SchemaError, "fiber count must not exceed the number of coordinates");
  if (c.u.size() != c.k)
    throw Error(ErrorCode::SchemaError, "u needs one entry per fiber coordinate");
  for (const auto& p : c.u)
    if (p.num_vars_used() > c.n)
      throw Error(ErrorCode::UnknownVariable, "u uses a variable beyond the chart");
}

void for_each_exponent(size_t n, int total, const std::function<void(const Exponent&)>& f) {
  Exponent e(n, 0);
  std::function<void(size_t, int)> rec = [&](size_t i, int left) {
    if (i + 1 >= n) {
      if (n)
        e[n - 1] = left;
      if (n || left == 0)
        f(trim(e));
      return;
    }
    for (int a = 0; a <= left; ++a) {
      e[i] = a;
      rec(i + 1, left - a);
    }
  };
  rec(0, total);
}

} // namespace

KoszulElem koszul_iota(const KoszulChart& c, const KoszulElem& x) {
  check_chart(c);
  KoszulElem r;
  for (const auto& [m, coef] : x) {
    const auto& [exp, mask] = m;
    int pos = 0;
    for (size_t i = 0; i < c.k; ++i) {
      if (!(mask & (1u << i)))
        continue;
      Rat sg = (pos % 2) ? Rat(-1) : Rat(1);
      Poly term = Poly::monomial(exp, coef * sg) * c.u[i];
      for (const auto& [e, a] : term.terms())
        add(r, {e, mask & ~(1u << i)}, a);
      ++pos;
    }
  }
  return r;
}

KoszulElem koszul_eta(const KoszulChart& c, const KoszulMonomial& m) {
  check_chart(c);
  if (!c.is_euler())
    throw Error(ErrorCode::NotEulerForm, "u must be (x_1, .., x_k); apply the tubular change of frame first");
  const auto& [exp, mask] = m;
  long w = std::popcount(mask);
  for (size_t i = 0; i < c.k; ++i)
    w += exponent_at(exp, i);
  KoszulElem r;
  if (w == 0)
    return r;
  for (size_t i = 0; i < c.k; ++i) {
    int a = exponent_at(exp, i);
    if (a == 0 || (mask & (1u << i)))
      continue;
    Exponent e = exp;
    e[i] -= 1;
    add(r, {trim(e), mask | (1u << i)}, Rat(a * insertion_sign(mask, i)) / Rat(w));
  }
  return r;
}

KoszulElem koszul_restrict(const KoszulChart& c, const KoszulMonomial& m) {
  const auto& [exp, mask] = m;
  KoszulElem r;
  if (mask)
    return r;
  for (size_t i = 0; i < c.k; ++i)
    if (exponent_at(exp, i))
      return r;
  add(r, m, Rat(1));
  return r;
}

namespace {

KoszulElem eta_of(const KoszulChart& c, const KoszulElem& x) {
  KoszulElem r;
  for (const auto& [m, a] : x)
    for (const auto& [m2, b] : koszul_eta(c, m))
      add(r, m2, a * b);
  return r;
}

} // namespace

KoszulReport koszul_identity_check(const KoszulChart& c, int max_degree) {
  check_chart(c);
  KoszulReport rep;
  for (int d = 0; d <= max_degree; ++d)
    for_each_exponent(c.n, d, [&](const Exponent& e) {
      for (unsigned mask = 0; mask < (1u << c.k); ++mask) {
        if (!rep.pass)
          return;
        KoszulMonomial m{e, mask};
        KoszulElem one{{m, Rat(1)}};
        auto lhs = eta_of(c, koszul_iota(c, one));
        for (const auto& [m2, b] : koszul_iota(c, eta_of(c, one)))
          add(lhs, m2, b);
        KoszulElem rhs = one;
        for (const auto& [m2, b] : koszul_restrict(c, m))
          add(rhs, m2, -b);
        ++rep.monomials_checked;
        if (lhs != rhs) {
          rep.pass = false;
          rep.witness = format_koszul(one);
        }
      }
    });
  return rep;
}

std::map<int, size_t> koszul_window_cohomology(const KoszulChart& c, int max_weight) {
  check_chart(c);
  RatMatrix block(c.k, c.k);
  for (size_t i = 0; i < c.k; ++i) {
    if (c.u[i].total_degree() != 1 || !c.u[i].constant_term().is_zero())
      throw Error(ErrorCode::HypothesisFailed, "u must be linear homogeneous");
    for (size_t j = 0; j < c.k; ++j)
      block(i, j) = c.u[i].diff(j).constant_term();
  }
  if (rank(block) != c.k)
    throw Error(ErrorCode::HypothesisFailed, "fiber block of u is not invertible");

  std::map<int, size_t> out;
  for (size_t p = 1; p <= c.k; ++p)
    out[-static_cast<int>(p)] = 0;
  for (int w = 0; w <= max_weight; ++w) {
    // chains[p]: monomials of weight w with p odd factors
    std::vector<std::vector<KoszulMonomial>> chains(c.k + 2);
    for (unsigned mask = 0; mask < (1u << c.k); ++mask) {
      int p = std::popcount(mask);
      if (p > w)
        continue;
      for_each_exponent(c.n, w - p, [&](const Exponent& e) { chains[p].push_back({e, mask}); });
    }
    auto iota_rank = [&](size_t p) -> size_t {
      if (p == 0 || p > c.k || chains[p].empty() || chains[p - 1].empty())
        return 0;
      std::map<KoszulMonomial, size_t> row;
      for (size_t i = 0; i < chains[p - 1].size(); ++i)
        row[chains[p - 1][i]] = i;
      RatMatrix m(chains[p - 1].size(), chains[p].size());
      for (size_t j = 0; j < chains[p].size(); ++j)
        for (const auto& [mono, a] : koszul_iota(c, {{chains[p][j], Rat(1)}}))
          m(row.at(mono), j) = a;
      return rank(m);
    };
    for (size_t p = 1; p <= c.k; ++p)
      out[-static_cast<int>(p)] += chains[p].size() - iota_rank(p) - iota_rank(p + 1);
  }
  return out;
}

std::string format_koszul(const KoszulElem& x) {
  if (x.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : x) {
    Rat a = c;
    os << (first ? (a.sign() < 0 ? "-" : "") : (a.sign() < 0 ? " - " : " + "));
    if (a.sign() < 0)
      a = -a;
    std::string mono;
    const auto& [exp, mask] = m;
    for (size_t i = 0; i < exp.size(); ++i)
      if (exp[i])
        mono += (mono.empty() ? "" : "*") + std::string("x") + std::to_string(i + 1) +
                (exp[i] > 1 ? "^" + std::to_string(exp[i]) : "");
    for (size_t i = 0; i < 16; ++i)
      if (mask & (1u << i))
        mono += (mono.empty() ? "" : "*") + std::string("xi") + std::to_string(i + 1);
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

} // namespace linfty
