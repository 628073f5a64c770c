#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linfty/rational.hpp"

namespace linfty {

/// Exponent multi-index. Trailing zeros are trimmed so that constants have an
/// empty exponent and polynomials over different numbers of variables mix.
using Exponent = std::vector<int>;

/// Sparse multivariate polynomial with exact rational coefficients. Variables
/// are positional; their names live with the chart that owns the polynomial.
class Poly {
public:
  Poly() = default;
  Poly(const Rat& c); // NOLINT(google-explicit-constructor)
  Poly(long c) : Poly(Rat(c)) {} // NOLINT(google-explicit-constructor)

  static Poly variable(size_t i);
  static Poly monomial(Exponent exp, const Rat& coef);

  const std::map<Exponent, Rat>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::optional<Rat> as_constant() const;
  Rat constant_term() const;
  /// One more than the largest variable index that occurs.
  size_t num_vars_used() const;
  int total_degree() const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator-() const;
  friend bool operator==(const Poly& a, const Poly& b) = default;

  /// Throws UnknownVariable when a term uses a variable past point.size().
  Rat eval(std::span<const Rat> point) const;
  Poly diff(size_t var) const;
  /// Substitutes images[i] for variable i.
  Poly subst(std::span<const Poly> images) const;

  std::string str(const std::vector<std::string>& names) const;

private:
  void add_term(Exponent exp, const Rat& coef);
  std::map<Exponent, Rat> terms_;
};

Exponent trim(Exponent e);

/// Evaluation with named coordinates; every name in vars must be assigned.
Rat poly_eval(const Poly& p, const std::vector<std::string>& vars,
              const std::map<std::string, Rat>& point);

} // namespace linfty
