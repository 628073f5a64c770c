#include "linfty/bundle.hpp"

#include <set>
#include <sstream>

namespace linfty {

bool BundleMorphism::is_linear() const {
  for (const auto& [w, v] : components)
    if (w.size() > 1 && !v.empty())
      return false;
  return true;
}

namespace {

void check_vars(const Poly& p, size_t n, const std::string& where) {
  if (p.num_vars_used() > n)
    throw Error(ErrorCode::UnknownVariable, where + " uses a variable beyond the " + std::to_string(n) + " coordinates");
}

void check_table_vars(const MultiMap<Poly>& t, size_t n, const std::string& where) {
  for (const auto& [w, v] : t)
    for (const auto& [e, c] : v)
      check_vars(c, n, where);
}

Vec<Poly> lookup(const MultiMap<Poly>& t, const Word& w) {
  auto it = t.find(w);
  return it == t.end() ? Vec<Poly>{} : it->second;
}

Vec<Poly> subst_vec(const Vec<Poly>& v, std::span<const Poly> images) {
  Vec<Poly> r;
  for (const auto& [e, c] : v)
    add_to(r, e, c.subst(images));
  return r;
}

MultiMap<Poly> subst_table(const MultiMap<Poly>& t, std::span<const Poly> images) {
  MultiMap<Poly> r;
  for (const auto& [w, v] : t) {
    auto s = subst_vec(v, images);
    if (!s.empty())
      r.emplace(w, std::move(s));
  }
  return r;
}

Vec<Rat> eval_vec(const Vec<Poly>& v, const Point& p) {
  Vec<Rat> r;
  for (const auto& [e, c] : v)
    add_to(r, e, c.eval(p));
  return r;
}

GradedSpace degree_part(const GradedSpace& sp, int lo, int hi) {
  std::map<int, std::vector<std::string>> labels;
  for (const auto& [d, ls] : sp.labels())
    if (d >= lo && d <= hi)
      labels.emplace(d, ls);
  return GradedSpace(labels);
}

std::vector<Poly> identity_vars(size_t n) {
  std::vector<Poly> r;
  for (size_t i = 0; i < n; ++i)
    r.push_back(Poly::variable(i));
  return r;
}

bool is_affine(const std::vector<Poly>& ps) {
  for (const auto& p : ps)
    if (p.total_degree() > 1)
      return false;
  return true;
}

} // namespace

void validate_chart(const BundleChart& b) {
  validate_structure(b.fiber);
  check_table_vars(b.fiber.ops, b.base_dim(), "operation coefficient");
}

void validate_bundle_morphism(const BundleMorphism& m) {
  validate_chart(m.source);
  validate_chart(m.target);
  if (m.base_map.size() != m.target.base_dim())
    throw Error(ErrorCode::SpaceMismatch, "base map needs one polynomial per target coordinate");
  for (const auto& p : m.base_map)
    check_vars(p, m.source.base_dim(), "base map");
  check_table_vars(m.components, m.source.base_dim(), "component coefficient");
  validate_morphism(Morphism<Poly>{m.source.fiber, m.target.fiber, m.components});
}

BundleChart point_chart(const Structure<Rat>& s) { return {{}, to_poly(s)}; }

BundleMorphism point_morphism(const Morphism<Rat>& m) {
  return {point_chart(m.source), point_chart(m.target), {}, to_poly(m.components)};
}

BundleMorphism constant_morphism(const Morphism<Rat>& m, const std::vector<std::string>& coords) {
  return {{coords, to_poly(m.source)}, {coords, to_poly(m.target)}, identity_vars(coords.size()), to_poly(m.components)};
}

Point point_from(const std::map<std::string, Rat>& named, const std::vector<std::string>& coords) {
  Point p;
  for (const auto& c : coords) {
    auto it = named.find(c);
    if (it == named.end())
      throw Error(ErrorCode::UnknownVariable, "point does not assign " + c);
    p.push_back(it->second);
  }
  for (const auto& [k, v] : named)
    if (std::find(coords.begin(), coords.end(), k) == coords.end())
      throw Error(ErrorCode::UnknownVariable, "point assigns unknown coordinate " + k);
  return p;
}

std::string format_point(const std::vector<std::string>& coords, const Point& p) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < p.size(); ++i)
    os << (i ? ", " : "") << (i < coords.size() ? coords[i] : "?") << "=" << p[i];
  os << ")";
  return os.str();
}

Structure<Rat> fiber_at(const BundleChart& b, const Point& p) {
  if (p.size() != b.base_dim())
    throw Error(ErrorCode::UnknownVariable, "point has " + std::to_string(p.size()) + " coordinates, chart has " +
                                                std::to_string(b.base_dim()));
  return evaluate(b.fiber, p);
}

bool classical_check(const BundleChart& b, const Point& p) { return !fiber_at(b, p).is_curved(); }

Point image_point(const BundleMorphism& m, const Point& p) {
  Point q;
  for (const auto& f : m.base_map)
    q.push_back(f.eval(p));
  return q;
}

CheckReport<Poly> check_bundle_morphism(const BundleMorphism& m) {
  validate_bundle_morphism(m);
  Structure<Poly> pulled{m.target.fiber.space, subst_table(m.target.fiber.ops, m.base_map)};
  return check_morphism(Morphism<Poly>{m.source.fiber, pulled, m.components});
}

namespace {

GradedSpace tangent_space(const BundleChart& b) {
  auto labels = b.fiber.space.labels();
  if (!b.coords.empty())
    labels[0] = b.coords;
  return GradedSpace(labels);
}

} // namespace

Complex<Rat> tangent_at(const BundleChart& b, const Point& p) {
  auto fib = fiber_at(b, p);
  if (fib.is_curved())
    throw Error(ErrorCode::NotClassical, "curvature does not vanish at " + format_point(b.coords, p));
  auto sp = tangent_space(b);
  GradedMap<Rat> d(sp, sp, 1);
  auto curv = lookup(b.fiber.ops, {});
  if (b.base_dim() > 0 && sp.dim(1) > 0) {
    RatMatrix jac(sp.dim(1), b.base_dim());
    for (const auto& [e, c] : curv)
      for (size_t j = 0; j < b.base_dim(); ++j)
        jac(e.index, j) = c.diff(j).eval(p);
    d.set_block(0, jac);
  }
  auto lin = linear_part(fib.ops, fib.space, fib.space, 1);
  for (const auto& [k, blk] : lin.blocks())
    d.set_block(k, blk);
  return Complex<Rat>(sp, d);
}

GradedMap<Rat> tangent_map_at(const BundleMorphism& m, const Point& p) {
  auto q = image_point(m, p);
  if (!classical_check(m.source, p))
    throw Error(ErrorCode::NotClassical, "source curvature does not vanish at " + format_point(m.source.coords, p));
  if (!classical_check(m.target, q))
    throw Error(ErrorCode::NotClassical, "target curvature does not vanish at " + format_point(m.target.coords, q));
  auto src = tangent_space(m.source), tgt = tangent_space(m.target);
  GradedMap<Rat> f(src, tgt, 0);
  if (m.source.base_dim() > 0 && m.target.base_dim() > 0)
    f.set_block(0, jacobian(m.base_map, p));
  auto phi1 = linear_part(evaluate(m.components, p), m.source.fiber.space, m.target.fiber.space, 0);
  for (const auto& [k, blk] : phi1.blocks())
    f.set_block(k, blk);
  return f;
}

EtaleReport etale_at(const BundleMorphism& m, const Point& p) {
  auto f = tangent_map_at(m, p);
  auto a = tangent_at(m.source, p);
  auto b = tangent_at(m.target, image_point(m, p));
  EtaleReport rep;
  for (const auto& [k, g] : cohomology(a))
    rep.source_dims[k] = g.dim;
  for (const auto& [k, g] : cohomology(b))
    rep.target_dims[k] = g.dim;
  rep.defect_degrees = cone_defects(a, b, f);
  rep.etale = rep.defect_degrees.empty();
  return rep;
}

std::vector<PointReport> fibration_check(const BundleMorphism& m, const std::vector<Point>& points) {
  validate_bundle_morphism(m);
  std::vector<PointReport> out;
  for (const auto& p : points) {
    if (p.size() != m.source.base_dim())
      throw Error(ErrorCode::UnknownVariable, "point " + format_point(m.source.coords, p) + " has the wrong length");
    PointReport rep{p, {}};
    size_t r = m.target.base_dim() ? rank(jacobian(m.base_map, p)) : 0;
    rep.verdicts.push_back(pass_if("submersion", r == m.target.base_dim(),
                                   "Jacobian rank " + std::to_string(r) + " < " + std::to_string(m.target.base_dim())));
    auto phi1 = linear_part(evaluate(m.components, p), m.source.fiber.space, m.target.fiber.space, 0);
    std::string bad;
    for (int k : m.target.fiber.space.degrees()) {
      size_t rk = rank(phi1.block(k));
      if (rk < m.target.fiber.space.dim(k)) {
        bad = "degree " + std::to_string(k) + ": rank " + std::to_string(rk) + " < " +
              std::to_string(m.target.fiber.space.dim(k));
        break;
      }
    }
    rep.verdicts.push_back(pass_if("surjective", bad.empty(), bad));
    out.push_back(std::move(rep));
  }
  return out;
}

SplitResult lastcase_split(const BundleMorphism& m, const std::vector<Point>& points) {
  validate_bundle_morphism(m);
  if (!m.is_linear())
    throw Error(ErrorCode::HypothesisFailed, "morphism is not linear");
  const auto& Lsp = m.source.fiber.space;
  const auto& Tsp = m.target.fiber.space;
  auto L1 = degree_part(Lsp, 1, 1);
  auto T1 = degree_part(Tsp, 1, 1);
  auto phi1_poly = linear_part(m.components, Lsp, Tsp, 0);

  GradedMap<Rat> phi1(L1, T1, 0);
  if (L1.dim(1) > 0 && T1.dim(1) > 0) {
    auto c = to_rat(phi1_poly.block(1));
    if (!c)
      throw Error(ErrorCode::NonConstantKernel, "phi_1 in degree 1 has non-constant entries");
    phi1.set_block(1, *c);
  }

  SplitResult out;
  out.kernel = kernel_subspace(phi1);
  const auto& K = out.kernel.space;
  out.theta = K.empty() ? GradedMap<Rat>(L1, K, 0) : split_mono_retraction(out.kernel.inclusion);
  auto complement = kernel_subspace(out.theta);
  auto restricted = phi1 * complement.inclusion;
  GradedMap<Rat> rinv(T1, complement.space, 0);
  if (T1.dim(1) > 0 || complement.space.dim(1) > 0) {
    if (T1.dim(1) != complement.space.dim(1))
      throw Error(ErrorCode::HypothesisFailed, "phi_1 is not surjective in degree 1");
    try {
      rinv.set_block(1, inverse(restricted.block(1)));
    } catch (const Error&) {
      throw Error(ErrorCode::HypothesisFailed, "phi_1 is not surjective in degree 1");
    }
  }
  out.sigma = complement.inclusion * rinv;

  auto curv = lookup(m.source.fiber.ops, {});
  for (int i = 0; i < static_cast<int>(K.dim(1)); ++i) {
    Poly ui;
    for (const auto& [e, c] : curv)
      ui += Poly(out.theta.entry(e, {1, i})) * c;
    out.u.push_back(ui);
  }
  out.pulled_target = subst_vec(lookup(m.target.fiber.ops, {}), m.base_map);

  // s = j(u) + sigma(f*t)
  Vec<Poly> recon;
  for (int i = 0; i < static_cast<int>(out.u.size()); ++i)
    for (const auto& [e, c] : out.kernel.inclusion.apply(BasisElem{1, i}))
      add_to(recon, e, Poly(c) * out.u[i]);
  for (const auto& [e, c] : out.pulled_target)
    for (const auto& [f, x] : out.sigma.apply(e))
      add_to(recon, f, Poly(x) * c);
  out.verdicts.push_back(pass_if("reconstruction", recon == curv, "j(u) + sigma(f*t) differs from the curvature"));
  out.verdicts.push_back(pass_if("theta-retraction", K.empty() || out.theta * out.kernel.inclusion ==
                                                                       GradedMap<Rat>::identity(K),
                                 "theta j != id"));

  out.subbundle = {out.u, complement.space, degree_part(Lsp, 2, Lsp.max_degree())};

  size_t msrc = m.source.base_dim(), mtgt = m.target.base_dim();
  for (const auto& p : points) {
    PointReport rep{p, {}};
    rep.verdicts.push_back(pass_if("classical", classical_check(m.source, p), "curvature nonzero"));
    auto q = image_point(m, p);
    rep.verdicts.push_back(pass_if("image-classical", classical_check(m.target, q), "target curvature nonzero"));
    // phi_1 iso in degrees >= 2 at p
    auto phi_p = evaluate(phi1_poly, p);
    std::string bad;
    for (int k = 2; k <= std::max(Lsp.max_degree(), Tsp.max_degree()); ++k) {
      size_t rk = rank(phi_p.block(k));
      if (!(rk == Lsp.dim(k) && rk == Tsp.dim(k)))
        bad = "phi_1 not an isomorphism in degree " + std::to_string(k);
    }
    if (!bad.empty())
      throw Error(ErrorCode::HypothesisFailed, bad + " at " + format_point(m.source.coords, p));

    RatMatrix du = out.u.empty() ? RatMatrix(0, msrc) : jacobian(out.u, p);
    RatMatrix df = mtgt ? jacobian(m.base_map, p) : RatMatrix(0, msrc);
    RatMatrix ker_df = mtgt ? kernel_matrix(df) : RatMatrix::identity(msrc);
    RatMatrix ker_du = out.u.empty() ? RatMatrix::identity(msrc) : kernel_matrix(du);
    RatMatrix reg = du * ker_df;
    if (reg.rows() != reg.cols() || rank(reg) != reg.rows())
      throw Error(ErrorCode::RegularityFails, "Du restricted to ker Df is not invertible at " +
                                                  format_point(m.source.coords, p));
    rep.verdicts.push_back({"regularity", Status::Pass, {}});
    RatMatrix loc = df * ker_du;
    rep.verdicts.push_back(pass_if("local-diffeomorphism", loc.rows() == loc.cols() && rank(loc) == loc.rows(),
                                   "Df restricted to ker Du is not an isomorphism"));
    out.points.push_back(std::move(rep));
  }
  return out;
}

namespace {

std::optional<SectionGerm> synthesize_section(const BundleMorphism& m, const SplitResult& split, std::string& note) {
  size_t msrc = m.source.base_dim(), mtgt = m.target.base_dim();
  if (!is_affine(m.base_map) || !is_affine(split.u)) {
    note = "SectionNotSynthesizable: base map or u is not affine";
    return std::nullopt;
  }
  size_t r = split.u.size();
  if (r + mtgt != msrc) {
    note = "SectionNotSynthesizable: [Du; Df] is not square";
    return std::nullopt;
  }
  Point origin(msrc, Rat(0));
  RatMatrix a(msrc, msrc);
  RatMatrix du = r ? jacobian(split.u, origin) : RatMatrix(0, msrc);
  RatMatrix df = mtgt ? jacobian(m.base_map, origin) : RatMatrix(0, msrc);
  for (size_t j = 0; j < msrc; ++j) {
    for (size_t i = 0; i < r; ++i)
      a(i, j) = du(i, j);
    for (size_t i = 0; i < mtgt; ++i)
      a(r + i, j) = df(i, j);
  }
  RatMatrix ainv;
  try {
    ainv = inverse(a);
  } catch (const Error&) {
    note = "SectionNotSynthesizable: [Du; Df] is singular";
    return std::nullopt;
  }
  // x(y) = A^{-1} [-u(0); y - f(0)]
  std::vector<Poly> rhs;
  for (const auto& ui : split.u)
    rhs.push_back(Poly(-ui.constant_term()));
  for (size_t i = 0; i < mtgt; ++i)
    rhs.push_back(Poly::variable(i) - Poly(m.base_map[i].constant_term()));
  SectionGerm g;
  for (size_t i = 0; i < msrc; ++i) {
    Poly xi;
    for (size_t j = 0; j < msrc; ++j)
      xi += Poly(ainv(i, j)) * rhs[j];
    g.base.push_back(xi);
  }
  bool base_ok = true;
  for (size_t i = 0; i < mtgt; ++i)
    base_ok = base_ok && m.base_map[i].subst(g.base) == Poly::variable(i);
  g.verdicts.push_back(pass_if("section-base", base_ok, "f after the section is not the identity"));
  bool in_y = true;
  for (const auto& ui : split.u)
    in_y = in_y && ui.subst(g.base).is_zero();
  g.verdicts.push_back(pass_if("section-in-Y", in_y, "the section leaves Y"));

  // fiber part: sigma in degree 1, phi_1^{-1} above
  const auto& Lsp = m.source.fiber.space;
  const auto& Tsp = m.target.fiber.space;
  auto phi1 = linear_part(m.components, Lsp, Tsp, 0);
  MultiMap<Poly> comps;
  for (const auto& e : Tsp.basis(1))
    for (const auto& [f, c] : split.sigma.apply(e))
      add_to(comps[{e}], f, Poly(c));
  for (int k : Tsp.degrees()) {
    if (k < 2)
      continue;
    auto blk = to_rat(phi1.block(k));
    if (!blk) {
      note = "fiber section needs constant phi_1 in degree " + std::to_string(k);
      g.verdicts.push_back({"section-fiber-morphism", Status::Skipped, note});
      return g;
    }
    RatMatrix inv = inverse(*blk);
    for (size_t j = 0; j < inv.cols(); ++j)
      for (size_t i = 0; i < inv.rows(); ++i)
        if (!inv(i, j).is_zero())
          add_to(comps[{{k, static_cast<int>(j)}}], BasisElem{k, static_cast<int>(i)}, Poly(inv(i, j)));
  }
  std::erase_if(comps, [](const auto& kv) { return kv.second.empty(); });
  Structure<Poly> over{Lsp, subst_table(m.source.fiber.ops, g.base)};
  g.fiber = Morphism<Poly>{m.target.fiber, over, comps};
  auto rep = check_morphism(g.fiber);
  g.verdicts.push_back(pass_if("section-fiber-morphism", rep.pass, "identity fails on a word"));
  // phi after the section is the identity of the target fibers
  auto phi_sub = subst_table(m.components, g.base);
  bool comp_ok = true;
  for (const auto& e : Tsp.basis()) {
    Vec<Poly> img;
    for (const auto& [f, c] : lookup(comps, {e}))
      axpy(img, c, lookup(phi_sub, {f}));
    comp_ok = comp_ok && img == Vec<Poly>{{e, Poly(1)}};
  }
  g.verdicts.push_back(pass_if("section-composes", comp_ok, "phi after the section is not the identity"));
  return g;
}

} // namespace

RecapResult recap_pipeline(const BundleMorphism& m, const std::vector<Point>& points) {
  validate_bundle_morphism(m);
  if (!m.is_linear())
    throw Error(ErrorCode::HypothesisFailed, "pipelines accept linear morphisms only");
  RecapResult out;
  out.reduced = m;

  const auto& Lsp = m.source.fiber.space;
  auto src_ops = m.source.fiber.ops;
  auto tgt_ops = m.target.fiber.ops;
  bool curved = src_ops.count({}) || tgt_ops.count({});
  src_ops.erase(Word{});
  tgt_ops.erase(Word{});
  Structure<Poly> src_flat{Lsp, src_ops}, tgt_flat{m.target.fiber.space, tgt_ops};
  Point zero_src(m.source.base_dim(), Rat(0));
  bool constant = true;
  for (const MultiMap<Poly>* t : std::initializer_list<const MultiMap<Poly>*>{&src_ops, &tgt_ops, &m.components})
    for (const auto& [w, v] : *t)
      for (const auto& [e, c] : v)
        constant = constant && c.is_constant();

  bool needs_step1 = false;
  if (constant) {
    auto phi1 = linear_part(evaluate(m.components, zero_src), Lsp, m.target.fiber.space, 0);
    auto ker = kernel_subspace(phi1);
    for (int k : ker.space.degrees())
      needs_step1 = needs_step1 || k >= 2;
  } else {
    for (const auto& p : points) {
      auto phi1 = linear_part(evaluate(m.components, p), Lsp, m.target.fiber.space, 0);
      for (int k : kernel_subspace(phi1).space.degrees())
        needs_step1 = needs_step1 || k >= 2;
    }
  }
  if (needs_step1) {
    if (!constant || curved)
      throw Error(ErrorCode::HypothesisFailed, "Step 1 is supported for constant, uncurved operations only");
    Morphism<Rat> pm{evaluate(src_flat, zero_src), evaluate(tgt_flat, Point(m.target.base_dim(), Rat(0))),
                     evaluate(m.components, zero_src)};
    out.step1 = step1_pipeline(pm);
    const auto& fin = out.step1.final_morphism;
    out.reduced = BundleMorphism{{m.source.coords, to_poly(fin.source)}, m.target, m.base_map, to_poly(fin.components)};
  } else {
    out.step1.verdicts.push_back({"step1", Status::Skipped, "phi_1 already injective in degrees >= 2"});
  }
  out.split = lastcase_split(out.reduced, points);
  out.section = synthesize_section(out.reduced, out.split, out.section_note);

  // classical points of Y map injectively to classical points of the target
  std::set<Point> images;
  bool injective = true, classical = true;
  for (const auto& p : points) {
    bool on_y = true;
    for (const auto& ui : out.split.u)
      on_y = on_y && ui.eval(p).is_zero();
    if (!on_y || !classical_check(out.reduced.source, p))
      continue;
    auto q = image_point(out.reduced, p);
    injective = injective && images.insert(q).second;
    classical = classical && classical_check(out.reduced.target, q);
  }
  out.verdicts.push_back(pass_if("classical-points-bijective", injective && classical,
                                 injective ? "an image point is not classical" : "two classical points of Y share an image"));
  for (const auto& v : out.step1.verdicts)
    out.verdicts.push_back(v);
  for (const auto& v : out.split.verdicts)
    out.verdicts.push_back(v);
  for (const auto& pr : out.split.points)
    for (const auto& v : pr.verdicts)
      out.verdicts.push_back({v.name + "@" + format_point(out.reduced.source.coords, pr.point), v.status, v.detail});
  if (out.section)
    for (const auto& v : out.section->verdicts)
      out.verdicts.push_back(v);
  return out;
}

TubularResult tubular_psi(const std::vector<Poly>& u, size_t k, size_t n) {
  std::vector<Poly> on_y = identity_vars(n);
  for (size_t i = 0; i < k && i < n; ++i)
    on_y[i] = Poly();
  for (size_t j = 0; j < u.size(); ++j) {
    check_vars(u[j], n, "u");
    if (!u[j].subst(on_y).is_zero())
      throw Error(ErrorCode::NotVanishingOnY, "component " + std::to_string(j) + " of u");
  }
  TubularResult out{PolyMatrix(u.size(), k), {}};
  for (size_t j = 0; j < u.size(); ++j)
    for (size_t i = 0; i < k; ++i) {
      Poly integral;
      Poly partial = u[j].diff(i);
      for (const auto& [exp, c] : partial.terms()) {
        long w = 0;
        for (size_t l = 0; l < exp.size() && l < k; ++l)
          w += exp[l];
        integral += Poly::monomial(exp, c / Rat(w + 1));
      }
      out.psi(j, i) = integral;
    }
  bool euler = true, boundary = true;
  for (size_t j = 0; j < u.size(); ++j) {
    Poly sum;
    for (size_t i = 0; i < k; ++i) {
      sum += Poly::variable(i) * out.psi(j, i);
      boundary = boundary && out.psi(j, i).subst(on_y) == u[j].diff(i).subst(on_y);
    }
    euler = euler && sum == u[j];
  }
  out.verdicts.push_back(pass_if("euler-identity", euler, "sum_i x_i Psi_i != u"));
  out.verdicts.push_back(pass_if("boundary-jacobian", boundary, "Psi on Y differs from the Jacobian"));
  return out;
}

namespace fixtures {

BundleChart b1() {
  BundleChart b{{"x"}, {GradedSpace({{1, {"e"}}}), {}}};
  b.fiber.ops[{}] = {{{1, 0}, Poly::variable(0)}};
  return b;
}

BundleChart b1_degenerate() {
  BundleChart b{{"x"}, {GradedSpace({{1, {"e"}}}), {}}};
  b.fiber.ops[{}] = {{{1, 0}, Poly::variable(0) * Poly::variable(0)}};
  return b;
}

BundleMorphism to_point(const BundleChart& b) { return {b, {{}, {GradedSpace(), {}}}, {}, {}}; }

} // namespace fixtures

} // namespace linfty
