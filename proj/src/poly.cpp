#include "linfty/poly.hpp"

#include <algorithm>
#include <sstream>

#include "linfty/error.hpp"

namespace linfty {

Exponent trim(Exponent e) {
  while (!e.empty() && e.back() == 0)
    e.pop_back();
  return e;
}

Poly::Poly(const Rat& c) {
  if (!c.is_zero())
    terms_.emplace(Exponent{}, c);
}

Poly Poly::variable(size_t i) {
  Exponent e(i + 1, 0);
  e[i] = 1;
  return monomial(std::move(e), Rat(1));
}

Poly Poly::monomial(Exponent exp, const Rat& coef) {
  Poly p;
  p.add_term(trim(std::move(exp)), coef);
  return p;
}

void Poly::add_term(Exponent exp, const Rat& coef) {
  if (coef.is_zero())
    return;
  auto [it, inserted] = terms_.emplace(std::move(exp), coef);
  if (!inserted) {
    it->second += coef;
    if (it->second.is_zero())
      terms_.erase(it);
  }
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

std::optional<Rat> Poly::as_constant() const {
  if (!is_constant())
    return std::nullopt;
  return constant_term();
}

Rat Poly::constant_term() const {
  auto it = terms_.find(Exponent{});
  return it == terms_.end() ? Rat(0) : it->second;
}

size_t Poly::num_vars_used() const {
  size_t n = 0;
  for (const auto& [e, c] : terms_)
    n = std::max(n, e.size());
  return n;
}

int Poly::total_degree() const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int x : e)
      s += x;
    d = std::max(d, s);
  }
  return d;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [e, c] : o.terms_)
    add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [e, c] : o.terms_)
    add_term(e, -c);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponent e(std::max(ea.size(), eb.size()), 0);
      for (size_t i = 0; i < ea.size(); ++i)
        e[i] += ea[i];
      for (size_t i = 0; i < eb.size(); ++i)
        e[i] += eb[i];
      r.add_term(std::move(e), ca * cb);
    }
  }
  return r;
}

Poly& Poly::operator*=(const Poly& o) {
  *this = *this * o;
  return *this;
}

Poly Poly::operator-() const {
  Poly r;
  for (const auto& [e, c] : terms_)
    r.terms_.emplace(e, -c);
  return r;
}

namespace {

Rat rat_pow(const Rat& base, int k) {
  Rat r(1);
  for (int i = 0; i < k; ++i)
    r *= base;
  return r;
}

Poly poly_pow(const Poly& base, int k) {
  Poly r(1);
  for (int i = 0; i < k; ++i)
    r *= base;
  return r;
}

} // namespace

Rat Poly::eval(std::span<const Rat> point) const {
  Rat total;
  for (const auto& [e, c] : terms_) {
    if (e.size() > point.size())
      throw Error(ErrorCode::UnknownVariable,
                  "polynomial uses variable #" + std::to_string(e.size() - 1) + " but only " +
                      std::to_string(point.size()) + " coordinates were assigned");
    Rat t = c;
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0)
        t *= rat_pow(point[i], e[i]);
    total += t;
  }
  return total;
}

Poly Poly::diff(size_t var) const {
  Poly r;
  for (const auto& [e, c] : terms_) {
    if (var >= e.size() || e[var] == 0)
      continue;
    Exponent d = e;
    d[var] -= 1;
    r.add_term(trim(std::move(d)), c * Rat(e[var]));
  }
  return r;
}

Poly Poly::subst(std::span<const Poly> images) const {
  Poly r;
  for (const auto& [e, c] : terms_) {
    if (e.size() > images.size())
      throw Error(ErrorCode::UnknownVariable,
                  "substitution supplies " + std::to_string(images.size()) +
                      " images but the polynomial uses variable #" + std::to_string(e.size() - 1));
    Poly t(c);
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0)
        t *= poly_pow(images[i], e[i]);
    r += t;
  }
  return r;
}

std::string Poly::str(const std::vector<std::string>& names) const {
  if (terms_.empty())
    return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    Rat coef = c;
    if (!first)
      os << (coef.sign() < 0 ? " - " : " + ");
    else if (coef.sign() < 0)
      os << "-";
    if (coef.sign() < 0)
      coef = -coef;
    bool has_var = !e.empty();
    if (!has_var || !coef.is_one())
      os << coef.str() << (has_var ? "*" : "");
    bool first_var = true;
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0)
        continue;
      if (!first_var)
        os << "*";
      os << (i < names.size() ? names[i] : "x" + std::to_string(i));
      if (e[i] > 1)
        os << "^" << e[i];
      first_var = false;
    }
    first = false;
  }
  return os.str();
}

Rat poly_eval(const Poly& p, const std::vector<std::string>& vars,
              const std::map<std::string, Rat>& point) {
  std::vector<Rat> values;
  values.reserve(vars.size());
  for (const auto& v : vars) {
    auto it = point.find(v);
    if (it == point.end())
      throw Error(ErrorCode::UnknownVariable, "no value assigned to coordinate '" + v + "'");
    values.push_back(it->second);
  }
  return p.eval(values);
}

} // namespace linfty
