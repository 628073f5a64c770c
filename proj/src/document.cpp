#include "linfty/document.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace linfty {

namespace {

constexpr int kVersion = 1;

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

void check_keys(const Json& j, const std::string& path, const std::vector<std::string>& required,
                const std::vector<std::string>& optional = {}) {
  if (!j.is_object())
    schema(path, "expected an object");
  for (const auto& k : required)
    if (!j.contains(k))
      schema(path, "missing field \"" + k + "\"");
  for (const auto& [k, v] : j.items()) {
    bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                 std::find(optional.begin(), optional.end(), k) != optional.end();
    if (!known)
      schema(path + "." + k, "unknown field");
  }
}

const Json& array_at(const Json& j, const std::string& key, const std::string& path) {
  const auto& a = j.at(key);
  if (!a.is_array())
    schema(path + "." + key, "expected an array");
  return a;
}

std::string string_of(const Json& j, const std::string& path) {
  if (!j.is_string())
    schema(path, "expected a string");
  return j.get<std::string>();
}

int int_of(const Json& j, const std::string& path) {
  if (!j.is_number_integer())
    schema(path, "expected an integer");
  return j.get<int>();
}

Rat rat_of(const Json& j, const std::string& path) {
  std::string s = string_of(j, path);
  try {
    return Rat::parse(s);
  } catch (const Error& e) {
    schema(path, e.what());
  }
}

std::string item(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

Poly poly_of(const Json& j, size_t nvars, const std::string& path) {
  if (!j.is_array())
    schema(path, "expected an array of terms");
  Poly p;
  std::set<Exponent> seen;
  for (size_t i = 0; i < j.size(); ++i) {
    auto ip = item(path, i);
    check_keys(j[i], ip, {"exp", "coef"});
    const auto& e = j[i]["exp"];
    if (!e.is_array() || e.size() != nvars)
      schema(ip + ".exp", "expected " + std::to_string(nvars) + " exponents");
    Exponent exp;
    for (size_t v = 0; v < e.size(); ++v) {
      int a = int_of(e[v], item(ip + ".exp", v));
      if (a < 0)
        schema(item(ip + ".exp", v), "negative exponent");
      exp.push_back(a);
    }
    Rat c = rat_of(j[i]["coef"], ip + ".coef");
    if (c.is_zero())
      schema(ip + ".coef", "zero coefficients are omitted");
    if (!seen.insert(trim(exp)).second)
      schema(ip, "repeated exponent");
    p += Poly::monomial(exp, c);
  }
  return p;
}

GradedSpace space_of(const Json& j, const std::string& path) {
  if (!j.is_array())
    schema(path, "expected an array of degrees");
  std::map<int, std::vector<std::string>> labels;
  std::set<std::string> all;
  for (size_t i = 0; i < j.size(); ++i) {
    auto ip = item(path, i);
    check_keys(j[i], ip, {"degree", "basis"});
    int d = int_of(j[i]["degree"], ip + ".degree");
    if (labels.count(d))
      schema(ip + ".degree", "repeated degree");
    const auto& b = array_at(j[i], "basis", ip);
    if (b.empty())
      schema(ip + ".basis", "empty degrees are omitted");
    for (size_t k = 0; k < b.size(); ++k) {
      auto label = string_of(b[k], item(ip + ".basis", k));
      if (label.empty() || !all.insert(label).second)
        schema(item(ip + ".basis", k), "labels must be nonempty and unique");
      labels[d].push_back(label);
    }
  }
  return GradedSpace(labels);
}

BasisElem elem_of(const GradedSpace& sp, const Json& j, const std::string& path) {
  auto label = string_of(j, path);
  auto e = sp.find(label);
  if (!e)
    schema(path, "unknown basis label \"" + label + "\"");
  return *e;
}

Word word_of(const GradedSpace& sp, const Json& j, const std::string& path) {
  if (!j.is_array())
    schema(path, "expected an array of labels");
  Word w;
  for (size_t i = 0; i < j.size(); ++i)
    w.push_back(elem_of(sp, j[i], item(path, i)));
  if (!is_canonical(w))
    throw Error(ErrorCode::NonCanonicalWord, path + ": " + format_word(sp, w) +
                                                 " is not canonical (sorted by degree then position, "
                                                 "no repeated odd element)");
  return w;
}

template <class S, class CoefReader>
Vec<S> vec_of(const GradedSpace& target, const Json& j, const std::string& path, CoefReader read) {
  if (!j.is_array())
    schema(path, "expected an array of {basis, coef}");
  Vec<S> v;
  for (size_t i = 0; i < j.size(); ++i) {
    auto ip = item(path, i);
    check_keys(j[i], ip, {"basis", "coef"});
    auto e = elem_of(target, j[i]["basis"], ip + ".basis");
    S c = read(j[i]["coef"], ip + ".coef");
    if (c.is_zero())
      schema(ip + ".coef", "zero coefficients are omitted");
    if (v.count(e))
      schema(ip + ".basis", "repeated basis element");
    v.emplace(e, c);
  }
  return v;
}

template <class S, class CoefReader>
MultiMap<S> table_of(const GradedSpace& source, const GradedSpace& target, const Json& j, const std::string& path,
                     CoefReader read) {
  if (!j.is_array())
    schema(path, "expected an array of entries");
  MultiMap<S> t;
  for (size_t i = 0; i < j.size(); ++i) {
    auto ip = item(path, i);
    check_keys(j[i], ip, {"word", "value"});
    auto w = word_of(source, j[i]["word"], ip + ".word");
    auto v = vec_of<S>(target, j[i]["value"], ip + ".value", read);
    if (v.empty())
      schema(ip + ".value", "empty entries are omitted");
    if (!t.emplace(w, std::move(v)).second)
      schema(ip + ".word", "repeated word");
  }
  return t;
}

std::vector<std::string> coords_of(const Json& j, const std::string& path) {
  if (!j.is_array())
    schema(path, "expected an array of names");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (size_t i = 0; i < j.size(); ++i) {
    auto s = string_of(j[i], item(path, i));
    if (s.empty() || !seen.insert(s).second)
      schema(item(path, i), "coordinate names must be nonempty and unique");
    out.push_back(s);
  }
  return out;
}

void check_header(const Json& j, const std::string& path) {
  if (!j.is_object())
    schema(path, "expected an object");
  if (!j.contains("version"))
    schema(path, "missing field \"version\"");
  if (int_of(j["version"], path + ".version") != kVersion)
    schema(path + ".version", "unsupported version");
  if (!j.contains("kind"))
    schema(path, "missing field \"kind\"");
}

Document parse_at(const Json& j, const std::string& path);

GradedMap<Rat> linear_of(const GradedSpace& sp, int degree, const Json& j, const std::string& path) {
  if (!j.is_array())
    schema(path, "expected an array of entries");
  GradedMap<Rat> m(sp, sp, degree);
  std::set<BasisElem> seen;
  for (size_t i = 0; i < j.size(); ++i) {
    auto ip = item(path, i);
    check_keys(j[i], ip, {"from", "value"});
    auto from = elem_of(sp, j[i]["from"], ip + ".from");
    if (!seen.insert(from).second)
      schema(ip + ".from", "repeated source element");
    auto v = vec_of<Rat>(sp, j[i]["value"], ip + ".value", rat_of);
    for (const auto& [e, c] : v) {
      if (e.degree != from.degree + degree)
        throw Error(ErrorCode::DegreeRuleViolation, ip + ": " + sp.label(from) + " -> " + sp.label(e) +
                                                        " must have degree " + std::to_string(degree));
      m.set(from, e, c);
    }
  }
  return m;
}

Filtration filtration_of(const GradedSpace& sp, const Json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind"))
    schema(path, "expected an object with a kind");
  auto kind = string_of(j["kind"], path + ".kind");
  if (kind == "natural") {
    check_keys(j, path, {"kind"});
    return Filtration::natural();
  }
  if (kind == "variation") {
    check_keys(j, path, {"kind", "level"});
    return Filtration::variation(int_of(j["level"], path + ".level"));
  }
  if (kind == "custom") {
    check_keys(j, path, {"kind", "weights"});
    const auto& w = array_at(j, "weights", path);
    std::map<BasisElem, int> weights;
    for (size_t i = 0; i < w.size(); ++i) {
      auto ip = item(path + ".weights", i);
      check_keys(w[i], ip, {"basis", "weight"});
      weights[elem_of(sp, w[i]["basis"], ip + ".basis")] = int_of(w[i]["weight"], ip + ".weight");
    }
    for (const auto& e : sp.basis())
      if (!weights.count(e))
        schema(path + ".weights", "no weight for " + sp.label(e));
    return Filtration::custom(weights);
  }
  schema(path + ".kind", "unknown filtration kind \"" + kind + "\"");
}

Document parse_at(const Json& j, const std::string& path) {
  check_header(j, path);
  auto kind = string_of(j["kind"], path + ".kind");
  if (kind == "structure") {
    check_keys(j, path, {"version", "kind", "space", "ops"});
    auto sp = space_of(j["space"], path + ".space");
    Structure<Rat> s{sp, table_of<Rat>(sp, sp, j["ops"], path + ".ops", rat_of)};
    validate_structure(s);
    return s;
  }
  if (kind == "bundle") {
    check_keys(j, path, {"version", "kind", "coords", "space", "ops"});
    auto coords = coords_of(j["coords"], path + ".coords");
    auto sp = space_of(j["space"], path + ".space");
    auto read = [&](const Json& c, const std::string& p) { return poly_of(c, coords.size(), p); };
    BundleChart b{coords, {sp, table_of<Poly>(sp, sp, j["ops"], path + ".ops", read)}};
    validate_chart(b);
    return b;
  }
  if (kind == "morphism") {
    check_keys(j, path, {"version", "kind", "source", "target", "components"}, {"base_map"});
    auto src = parse_at(j["source"], path + ".source");
    auto tgt = parse_at(j["target"], path + ".target");
    if (auto* s = std::get_if<Structure<Rat>>(&src)) {
      auto* t = std::get_if<Structure<Rat>>(&tgt);
      if (!t)
        schema(path + ".target", "expected a structure to match the source");
      if (j.contains("base_map"))
        schema(path + ".base_map", "only bundle morphisms carry a base map");
      Morphism<Rat> m{*s, *t, table_of<Rat>(s->space, t->space, j["components"], path + ".components", rat_of)};
      validate_morphism(m);
      return m;
    }
    if (auto* s = std::get_if<BundleChart>(&src)) {
      auto* t = std::get_if<BundleChart>(&tgt);
      if (!t)
        schema(path + ".target", "expected a bundle to match the source");
      if (!j.contains("base_map"))
        schema(path, "missing field \"base_map\"");
      const auto& bm = array_at(j, "base_map", path);
      std::vector<Poly> base;
      for (size_t i = 0; i < bm.size(); ++i)
        base.push_back(poly_of(bm[i], s->base_dim(), item(path + ".base_map", i)));
      auto read = [&](const Json& c, const std::string& p) { return poly_of(c, s->base_dim(), p); };
      BundleMorphism m{*s, *t, base,
                       table_of<Poly>(s->fiber.space, t->fiber.space, j["components"], path + ".components", read)};
      validate_bundle_morphism(m);
      return m;
    }
    schema(path + ".source", "expected a structure or bundle");
  }
  if (kind == "contraction") {
    check_keys(j, path, {"version", "kind", "space", "delta", "eta", "filtration"});
    auto sp = space_of(j["space"], path + ".space");
    return ContractionData{sp, linear_of(sp, 1, j["delta"], path + ".delta"), linear_of(sp, -1, j["eta"], path + ".eta"),
                           filtration_of(sp, j["filtration"], path + ".filtration")};
  }
  if (kind == "points") {
    check_keys(j, path, {"version", "kind", "coords", "points"});
    PointsDoc d{coords_of(j["coords"], path + ".coords"), {}};
    const auto& ps = array_at(j, "points", path);
    for (size_t i = 0; i < ps.size(); ++i) {
      auto ip = item(path + ".points", i);
      check_keys(ps[i], ip, d.coords);
      Point p;
      for (const auto& c : d.coords)
        p.push_back(rat_of(ps[i][c], ip + "." + c));
      d.points.push_back(std::move(p));
    }
    return d;
  }
  if (kind == "job") {
    check_keys(j, path, {"version", "kind", "cmd"}, {"input", "contraction", "points", "degrees", "weights"});
    JobSpec job;
    job.cmd = string_of(j["cmd"], path + ".cmd");
    for (auto [key, slot] : {std::pair{"input", &job.input}, std::pair{"contraction", &job.contraction},
                             std::pair{"points", &job.points}})
      if (j.contains(key))
        *slot = string_of(j[key], path + "." + key);
    if (j.contains("degrees"))
      job.degrees = int_of(j["degrees"], path + ".degrees");
    if (j.contains("weights"))
      job.weights = int_of(j["weights"], path + ".weights");
    return job;
  }
  schema(path + ".kind", "unknown kind \"" + kind + "\"");
}

} // namespace

Document parse_document(const Json& j) { return parse_at(j, "$"); }

Document parse_document(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_document(j);
}

Document load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::SchemaError, "cannot read " + path.filename().string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_document(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + std::string(e.what()).substr(std::string(to_string(e.code())).size() + 2));
  }
}

Json rat_json(const Rat& r) { return r.str(); }

Json poly_json(const Poly& p, size_t nvars) {
  Json a = Json::array();
  for (const auto& [e, c] : p.terms()) {
    Json exp = Json::array();
    for (size_t i = 0; i < nvars; ++i)
      exp.push_back(i < e.size() ? e[i] : 0);
    a.push_back(Json{{"exp", exp}, {"coef", rat_json(c)}});
  }
  return a;
}

Json space_json(const GradedSpace& s) {
  Json a = Json::array();
  for (const auto& [d, labels] : s.labels())
    a.push_back(Json{{"degree", d}, {"basis", labels}});
  return a;
}

Json vec_json(const GradedSpace& target, const Vec<Rat>& v) {
  Json a = Json::array();
  for (const auto& [e, c] : v)
    a.push_back(Json{{"basis", target.label(e)}, {"coef", rat_json(c)}});
  return a;
}

namespace {

Json word_json(const GradedSpace& sp, const Word& w) {
  Json a = Json::array();
  for (const auto& e : w)
    a.push_back(sp.label(e));
  return a;
}

Json header(const char* kind) { return Json{{"version", kVersion}, {"kind", kind}}; }

} // namespace

Json table_json(const GradedSpace& source, const GradedSpace& target, const MultiMap<Rat>& t) {
  Json a = Json::array();
  for (const auto& [w, v] : t)
    if (!v.empty())
      a.push_back(Json{{"word", word_json(source, w)}, {"value", vec_json(target, v)}});
  return a;
}

Json poly_table_json(const GradedSpace& source, const GradedSpace& target, const MultiMap<Poly>& t, size_t nvars) {
  Json a = Json::array();
  for (const auto& [w, v] : t) {
    if (v.empty())
      continue;
    Json val = Json::array();
    for (const auto& [e, c] : v)
      val.push_back(Json{{"basis", target.label(e)}, {"coef", poly_json(c, nvars)}});
    a.push_back(Json{{"word", word_json(source, w)}, {"value", val}});
  }
  return a;
}

Json linear_map_json(const GradedMap<Rat>& m) {
  Json a = Json::array();
  for (const auto& e : m.source().basis()) {
    auto v = m.apply(e);
    if (!v.empty())
      a.push_back(Json{{"from", m.source().label(e)}, {"value", vec_json(m.target(), v)}});
  }
  return a;
}

Json point_json(const std::vector<std::string>& coords, const Point& p) {
  Json o = Json::object();
  for (size_t i = 0; i < coords.size() && i < p.size(); ++i)
    o[coords[i]] = rat_json(p[i]);
  return o;
}

Json matrix_json(const RatMatrix& m) {
  Json a = Json::array();
  for (size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (size_t j = 0; j < m.cols(); ++j)
      row.push_back(rat_json(m(i, j)));
    a.push_back(row);
  }
  return a;
}

std::string document_kind(const Document& d) {
  static const char* names[] = {"structure", "bundle", "morphism", "morphism", "contraction", "points", "job"};
  return names[d.index()];
}

Json to_json(const Document& d) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Structure<Rat>>) {
          Json j = header("structure");
          j["space"] = space_json(x.space);
          j["ops"] = table_json(x.space, x.space, x.ops);
          return j;
        } else if constexpr (std::is_same_v<T, BundleChart>) {
          Json j = header("bundle");
          j["coords"] = x.coords;
          j["space"] = space_json(x.fiber.space);
          j["ops"] = poly_table_json(x.fiber.space, x.fiber.space, x.fiber.ops, x.base_dim());
          return j;
        } else if constexpr (std::is_same_v<T, Morphism<Rat>>) {
          Json j = header("morphism");
          j["source"] = to_json(Document(x.source));
          j["target"] = to_json(Document(x.target));
          j["components"] = table_json(x.source.space, x.target.space, x.components);
          return j;
        } else if constexpr (std::is_same_v<T, BundleMorphism>) {
          Json j = header("morphism");
          j["source"] = to_json(Document(x.source));
          j["target"] = to_json(Document(x.target));
          Json base = Json::array();
          for (const auto& p : x.base_map)
            base.push_back(poly_json(p, x.source.base_dim()));
          j["base_map"] = base;
          j["components"] = poly_table_json(x.source.fiber.space, x.target.fiber.space, x.components,
                                            x.source.base_dim());
          return j;
        } else if constexpr (std::is_same_v<T, ContractionData>) {
          Json j = header("contraction");
          j["space"] = space_json(x.space);
          j["delta"] = linear_map_json(x.delta);
          j["eta"] = linear_map_json(x.eta);
          Json f;
          switch (x.filtration.kind) {
          case Filtration::Kind::Natural:
            f = Json{{"kind", "natural"}};
            break;
          case Filtration::Kind::Variation:
            f = Json{{"kind", "variation"}, {"level", x.filtration.level}};
            break;
          case Filtration::Kind::Custom: {
            Json w = Json::array();
            for (const auto& [e, v] : x.filtration.weights)
              w.push_back(Json{{"basis", x.space.label(e)}, {"weight", v}});
            f = Json{{"kind", "custom"}, {"weights", w}};
            break;
          }
          }
          j["filtration"] = f;
          return j;
        } else if constexpr (std::is_same_v<T, PointsDoc>) {
          Json j = header("points");
          j["coords"] = x.coords;
          Json ps = Json::array();
          for (const auto& p : x.points)
            ps.push_back(point_json(x.coords, p));
          j["points"] = ps;
          return j;
        } else {
          Json j = header("job");
          j["cmd"] = x.cmd;
          if (x.input)
            j["input"] = *x.input;
          if (x.contraction)
            j["contraction"] = *x.contraction;
          if (x.points)
            j["points"] = *x.points;
          if (x.degrees)
            j["degrees"] = *x.degrees;
          if (x.weights)
            j["weights"] = *x.weights;
          return j;
        }
      },
      d);
}

std::string serialize_document(const Document& d) { return to_json(d).dump(2) + "\n"; }

} // namespace linfty
