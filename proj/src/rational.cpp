#include "linfty/rational.hpp"

#include <cctype>
#include <ostream>

#include "linfty/error.hpp"

namespace linfty {

const char* to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::PolynomialEntries: return "PolynomialEntries";
  case ErrorCode::NotAComplex: return "NotAComplex";
  case ErrorCode::NotSurjective: return "NotSurjective";
  case ErrorCode::NotInjective: return "NotInjective";
  case ErrorCode::NotInvertible: return "NotInvertible";
  case ErrorCode::UnknownVariable: return "UnknownVariable";
  case ErrorCode::SpaceMismatch: return "SpaceMismatch";
  case ErrorCode::DegreeRuleViolation: return "DegreeRuleViolation";
  case ErrorCode::NotClassical: return "NotClassical";
  case ErrorCode::NoConvergence: return "NoConvergence";
  case ErrorCode::ContractionInvalid: return "ContractionInvalid";
  case ErrorCode::HypothesisFailed: return "HypothesisFailed";
  case ErrorCode::NotSurjectiveOnKernel: return "NotSurjectiveOnKernel";
  case ErrorCode::NonConstantKernel: return "NonConstantKernel";
  case ErrorCode::RegularityFails: return "RegularityFails";
  case ErrorCode::NotVanishingOnY: return "NotVanishingOnY";
  case ErrorCode::NotEulerForm: return "NotEulerForm";
  case ErrorCode::ChartBase: return "ChartBase";
  case ErrorCode::NotAMorphism: return "NotAMorphism";
  case ErrorCode::MissingEtaTilde: return "MissingEtaTilde";
  case ErrorCode::SchemaError: return "SchemaError";
  case ErrorCode::NonCanonicalWord: return "NonCanonicalWord";
  case ErrorCode::UnknownCommand: return "UnknownCommand";
  }
  return "Error";
}

Rat::Rat(long n, long d) {
  if (d == 0)
    throw Error(ErrorCode::SchemaError, "zero denominator");
  v_ = mpq_class(n, d);
  v_.canonicalize();
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero())
    throw Error(ErrorCode::NotInvertible, "division by zero");
  v_ /= o.v_;
  return *this;
}

namespace {

bool is_integer_text(std::string_view s) {
  if (s.empty())
    return false;
  size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size())
    return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      return false;
  return true;
}

} // namespace

Rat Rat::parse(std::string_view text) {
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_integer_text(num) || !is_integer_text(den) || den[0] == '-')
    throw Error(ErrorCode::SchemaError, "malformed rational \"" + std::string(text) + "\"");
  mpz_class n{std::string(num)}, d{std::string(den)};
  if (d == 0)
    throw Error(ErrorCode::SchemaError, "zero denominator in \"" + std::string(text) + "\"");
  mpq_class q(n, d);
  q.canonicalize();
  return Rat(q);
}

std::string Rat::str() const {
  if (v_.get_den() == 1)
    return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

} // namespace linfty
