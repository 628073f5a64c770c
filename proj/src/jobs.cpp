#include "linfty/jobs.hpp"

#include <chrono>
#include <regex>
#include <sstream>

#include "linfty/ce.hpp"
#include "linfty/koszul.hpp"

namespace linfty {

namespace fs = std::filesystem;

const std::vector<std::string>& job_commands() {
  static const std::vector<std::string> cmds{"check-relations", "check-morphism", "transfer",  "reduce",
                                             "split",           "pipeline",       "etale",     "ce",
                                             "cohomology",      "quasi-iso",      "koszul-verify", "heq",
                                             "bigrading"};
  return cmds;
}

namespace {

bool is_input_error(ErrorCode c) {
  switch (c) {
  case ErrorCode::SchemaError:
  case ErrorCode::NonCanonicalWord:
  case ErrorCode::DegreeRuleViolation:
  case ErrorCode::UnknownVariable:
  case ErrorCode::UnknownCommand:
  case ErrorCode::SpaceMismatch:
  case ErrorCode::ChartBase:
  case ErrorCode::PolynomialEntries:
    return true;
  default:
    return false;
  }
}

Json verdict_json(const Verdict& v) {
  Json j{{"name", v.name}, {"status", to_string(v.status)}};
  if (!v.detail.empty())
    j["detail"] = v.detail;
  return j;
}

Json poly_vec_json(const GradedSpace& sp, const Vec<Poly>& v, size_t nvars) {
  Json a = Json::array();
  for (const auto& [e, c] : v)
    a.push_back(Json{{"basis", sp.label(e)}, {"coef", poly_json(c, nvars)}});
  return a;
}

Json polys_json(const std::vector<Poly>& ps, size_t nvars) {
  Json a = Json::array();
  for (const auto& p : ps)
    a.push_back(poly_json(p, nvars));
  return a;
}

Json labels_json(const GradedSpace& sp, const Word& w) {
  Json a = Json::array();
  for (const auto& e : w)
    a.push_back(sp.label(e));
  return a;
}

template <class S>
Json sym_json(const GradedSpace& sp, const SymElem<S>& x, size_t nvars) {
  Json a = Json::array();
  for (const auto& [w, c] : x) {
    Json coef;
    if constexpr (std::is_same_v<S, Rat>)
      coef = rat_json(c);
    else
      coef = poly_json(c, nvars);
    a.push_back(Json{{"word", labels_json(sp, w)}, {"coef", coef}});
  }
  return a;
}

/// Inputs of one job, loaded lazily with path context.
class Inputs {
public:
  Inputs(const JobSpec& job, fs::path base) : job_(job), base_(std::move(base)) {}

  Document input() const { return load("input", job_.input); }

  template <class T>
  T input_as(const char* expected) const {
    auto d = input();
    if (auto* p = std::get_if<T>(&d))
      return *p;
    throw Error(ErrorCode::SchemaError, "input: expected a " + std::string(expected) + " document, got " + document_kind(d));
  }

  ContractionData contraction(const GradedSpace& space) const {
    auto d = load("contraction", job_.contraction);
    auto* c = std::get_if<ContractionData>(&d);
    if (!c)
      throw Error(ErrorCode::SchemaError, "contraction: expected a contraction document");
    if (!(c->space == space))
      throw Error(ErrorCode::SpaceMismatch, "contraction space differs from the structure space");
    return *c;
  }

  std::vector<Point> points(const std::vector<std::string>& coords) const {
    if (!job_.points) {
      if (coords.empty())
        return {Point{}};
      return {};
    }
    auto d = load("points", job_.points);
    auto* p = std::get_if<PointsDoc>(&d);
    if (!p)
      throw Error(ErrorCode::SchemaError, "points: expected a points document");
    if (p->coords != coords)
      throw Error(ErrorCode::UnknownVariable, "points: coordinates differ from the chart");
    return p->points;
  }

private:
  Document load(const char* what, const std::optional<std::string>& path) const {
    if (!path)
      throw Error(ErrorCode::SchemaError, std::string("job is missing \"") + what + "\"");
    return load_document(base_ / *path);
  }
  const JobSpec& job_;
  fs::path base_;
};

struct Builder {
  std::vector<Verdict> verdicts;
  Json result = Json::object();

  void add(Verdict v) { verdicts.push_back(std::move(v)); }
  void add_all(const std::vector<Verdict>& vs, const std::string& suffix = {}) {
    for (const auto& v : vs)
      verdicts.push_back({v.name + suffix, v.status, v.detail});
  }
};

Json morphism_summary(const Morphism<Rat>& m) {
  return Json{{"source_space", space_json(m.source.space)},
              {"source_ops", table_json(m.source.space, m.source.space, m.source.ops)},
              {"target_space", space_json(m.target.space)},
              {"components", table_json(m.source.space, m.target.space, m.components)}};
}

BundleMorphism as_bundle(const Document& d) {
  if (auto* b = std::get_if<BundleMorphism>(&d))
    return *b;
  if (auto* m = std::get_if<Morphism<Rat>>(&d))
    return point_morphism(*m);
  throw Error(ErrorCode::SchemaError, "input: expected a morphism document, got " + document_kind(d));
}

Json point_reports_json(const std::vector<std::string>& coords, const std::vector<PointReport>& reps) {
  Json a = Json::array();
  for (const auto& r : reps) {
    Json vs = Json::array();
    for (const auto& v : r.verdicts)
      vs.push_back(verdict_json(v));
    a.push_back(Json{{"point", point_json(coords, r.point)}, {"verdicts", vs}});
  }
  return a;
}

int default_or(const std::optional<int>& v, int d) { return v ? *v : d; }

void run_check_relations(const Inputs& in, Builder& b) {
  auto d = in.input();
  if (auto* s = std::get_if<Structure<Rat>>(&d)) {
    auto r = check_relations(*s);
    b.result["words_checked"] = r.words_checked;
    if (!r.pass) {
      b.result["failing_word"] = labels_json(s->space, r.word);
      b.result["defect"] = vec_json(s->space, r.defect);
    }
    b.add(pass_if("relations", r.pass, "fails on " + format_word(s->space, r.word)));
  } else if (auto* c = std::get_if<BundleChart>(&d)) {
    auto r = check_relations(c->fiber);
    b.result["words_checked"] = r.words_checked;
    if (!r.pass) {
      b.result["failing_word"] = labels_json(c->fiber.space, r.word);
      b.result["defect"] = poly_vec_json(c->fiber.space, r.defect, c->base_dim());
    }
    b.add(pass_if("relations", r.pass, "fails on " + format_word(c->fiber.space, r.word)));
  } else {
    throw Error(ErrorCode::SchemaError, "input: expected a structure or bundle document");
  }
}

void run_check_morphism(const Inputs& in, Builder& b) {
  auto d = in.input();
  if (auto* m = std::get_if<Morphism<Rat>>(&d)) {
    auto r = check_morphism(*m);
    b.result["words_checked"] = r.words_checked;
    if (!r.pass) {
      b.result["failing_word"] = labels_json(m->source.space, r.word);
      b.result["defect"] = vec_json(m->target.space, r.defect);
    }
    b.add(pass_if("morphism", r.pass, "fails on " + format_word(m->source.space, r.word)));
  } else if (auto* m = std::get_if<BundleMorphism>(&d)) {
    auto r = check_bundle_morphism(*m);
    b.result["words_checked"] = r.words_checked;
    if (!r.pass) {
      b.result["failing_word"] = labels_json(m->source.fiber.space, r.word);
      b.result["defect"] = poly_vec_json(m->target.fiber.space, r.defect, m->source.base_dim());
    }
    b.add(pass_if("morphism", r.pass, "fails on " + format_word(m->source.fiber.space, r.word)));
  } else {
    throw Error(ErrorCode::SchemaError, "input: expected a morphism document");
  }
}

void run_transfer(const Inputs& in, Builder& b) {
  auto s = in.input_as<Structure<Rat>>("structure");
  auto c = in.contraction(s.space);
  b.add_all(validate_contraction(c, s));
  if (!all_pass(b.verdicts))
    return;
  auto t = transfer(s, c);
  b.result["H"] = space_json(t.h.space);
  b.result["mu"] = table_json(t.h.space, t.h.space, t.mu.ops);
  b.result["phi"] = table_json(t.h.space, t.source.space, t.phi.components);
  b.result["pitilde"] = table_json(t.source.space, t.h.space, t.pitilde.components);
  b.result["etatilde"] = linear_map_json(t.etatilde);
  b.result["sweeps"] = Json{{"phi", t.phi_sweeps}, {"pitilde", t.pitilde_sweeps}};
  b.add_all(certify(t));
  b.add(oracle_agreement(t));
}

void run_reduce(const Inputs& in, Builder& b) {
  auto m = in.input_as<Morphism<Rat>>("morphism");
  auto r = step1_pipeline(m);
  Json chain = Json::array();
  for (const auto& step : r.chain) {
    chain.push_back(Json{{"degree", step.degree},
                         {"kernel", space_json(step.kernel.space)},
                         {"H", space_json(step.transfer.h.space)}});
    b.add_all(step.verdicts, "@k=" + std::to_string(step.degree));
  }
  b.result["chain"] = chain;
  b.result["final"] = morphism_summary(r.final_morphism);
  b.add_all(r.verdicts);
}

Json split_json(const BundleMorphism& m, const SplitResult& s) {
  size_t n = m.source.base_dim();
  return Json{{"kernel", space_json(s.kernel.space)},
              {"theta", linear_map_json(s.theta)},
              {"sigma", linear_map_json(s.sigma)},
              {"u", polys_json(s.u, n)},
              {"pulled_target", poly_vec_json(m.source.fiber.space, s.pulled_target, n)},
              {"subbundle", Json{{"equations", polys_json(s.subbundle.equations, n)},
                                 {"e1", space_json(s.subbundle.e1)},
                                 {"higher", space_json(s.subbundle.higher)}}},
              {"points", point_reports_json(m.source.coords, s.points)}};
}

void run_split(const Inputs& in, Builder& b) {
  auto m = as_bundle(in.input());
  auto s = lastcase_split(m, in.points(m.source.coords));
  b.result = split_json(m, s);
  b.add_all(s.verdicts);
  for (const auto& p : s.points)
    b.add_all(p.verdicts, "@" + format_point(m.source.coords, p.point));
}

void run_pipeline(const Inputs& in, Builder& b) {
  auto m = as_bundle(in.input());
  auto r = recap_pipeline(m, in.points(m.source.coords));
  Json chain = Json::array();
  for (const auto& step : r.step1.chain)
    chain.push_back(Json{{"degree", step.degree}, {"H", space_json(step.transfer.h.space)}});
  b.result["step1"] = chain;
  b.result["reduced_source"] = space_json(r.reduced.source.fiber.space);
  b.result["split"] = split_json(r.reduced, r.split);
  if (r.section) {
    b.result["section"] =
        Json{{"base", polys_json(r.section->base, m.target.base_dim())},
             {"fiber", poly_table_json(r.section->fiber.source.space, r.section->fiber.target.space,
                                       r.section->fiber.components, m.target.base_dim())}};
  } else {
    b.result["section_note"] = r.section_note;
  }
  b.add_all(r.verdicts);
}

void run_etale(const Inputs& in, Builder& b) {
  auto d = in.input();
  if (auto* m = std::get_if<Morphism<Rat>>(&d)) {
    auto e = etale_pair(*m);
    b.result["source_dims"] = e.source_dims;
    b.result["target_dims"] = e.target_dims;
    b.result["defect_degrees"] = e.defect_degrees;
    b.add(pass_if("etale", e.etale, "mapping cone is not acyclic"));
    return;
  }
  auto m = as_bundle(d);
  auto pts = in.points(m.source.coords);
  Json per = Json::array();
  for (const auto& p : pts) {
    auto e = etale_at(m, p);
    per.push_back(Json{{"point", point_json(m.source.coords, p)},
                       {"source_dims", e.source_dims},
                       {"target_dims", e.target_dims},
                       {"defect_degrees", e.defect_degrees}});
    b.add(pass_if("etale@" + format_point(m.source.coords, p), e.etale, "mapping cone is not acyclic"));
  }
  b.result["points"] = per;
  auto fib = fibration_check(m, pts);
  b.result["fibration"] = point_reports_json(m.source.coords, fib);
}

template <class S>
Json presentation_json(const CEPresentation<S>& p, size_t nvars) {
  Json gens = Json::array();
  for (const auto& e : p.space.basis()) {
    auto it = p.q.find(e);
    SymElem<S> q = it == p.q.end() ? SymElem<S>{} : it->second;
    gens.push_back(Json{{"dual_of", p.space.label(e)}, {"degree", -e.degree}, {"q", sym_json(p.space, q, nvars)}});
  }
  return gens;
}

void run_ce(const Inputs& in, Builder& b) {
  auto d = in.input();
  if (auto* s = std::get_if<Structure<Rat>>(&d)) {
    auto p = build_ce(*s);
    b.result["generators"] = presentation_json(p, 0);
    auto r = q_square_check(p);
    b.add(pass_if("q-square", r.pass, r.generator ? "Q^2 != 0 on the dual of " + s->space.label(*r.generator) : ""));
  } else if (auto* c = std::get_if<BundleChart>(&d)) {
    auto p = build_ce(*c);
    b.result["generators"] = presentation_json(p, c->base_dim());
    auto r = q_square_check(p);
    b.add(pass_if("q-square", r.pass,
                  r.generator ? "Q^2 != 0 on the dual of " + c->fiber.space.label(*r.generator) : ""));
  } else {
    throw Error(ErrorCode::SchemaError, "input: expected a structure or bundle document");
  }
}

Json cohomology_json(const GradedSpace& sp, const std::map<int, CEDegree>& h) {
  Json a = Json::array();
  for (const auto& [q, d] : h) {
    Json reps = Json::array();
    for (const auto& r : d.representatives)
      reps.push_back(format_sym(sp, r));
    a.push_back(Json{{"degree", q}, {"dim", d.dim}, {"chain_dim", d.chain_dim}, {"representatives", reps}});
  }
  return a;
}

void run_cohomology(const Inputs& in, Builder& b, int depth) {
  auto d = in.input();
  if (auto* c = std::get_if<BundleChart>(&d)) {
    ce_cohomology(build_ce(*c), depth); // throws ChartBase
    return;
  }
  auto s = in.input_as<Structure<Rat>>("structure");
  auto h = ce_cohomology(build_ce(s), depth);
  b.result["degrees"] = cohomology_json(s.space, h);
  size_t classical = s.is_curved() ? 0 : 1;
  b.result["classical_points"] = classical;
  b.add(pass_if("h0-classical-points", h.at(0).dim == classical,
                "dim H^0 = " + std::to_string(h.at(0).dim) + ", classical points = " + std::to_string(classical)));
}

void run_quasi_iso(const Inputs& in, Builder& b, int depth) {
  auto m = in.input_as<Morphism<Rat>>("morphism");
  auto r = quasi_iso_check(m, depth);
  Json degs = Json::array();
  for (const auto& [q, d] : r.degrees)
    degs.push_back(Json{{"degree", q}, {"source_dim", d.source_dim}, {"target_dim", d.target_dim}, {"rank", d.rank}});
  b.result["degrees"] = degs;
  b.result["failing_degrees"] = r.failing_degrees;
  b.add(r.chain_map);
  std::string failing;
  for (int q : r.failing_degrees)
    failing += (failing.empty() ? "" : ", ") + std::to_string(q);
  b.add(pass_if("quasi-iso", r.pass, "induced map not bijective in degrees " + failing));
  if (m.source.amplitude() <= 1 && m.target.amplitude() <= 1) {
    auto w = weak_equivalence_check(m);
    b.result["weak_equivalence"] = to_string(w.status);
    b.add(pass_if("etale-agreement", (w.status == Status::Pass) == r.pass,
                  "quasi-iso and weak equivalence disagree: " + w.detail));
  }
}

bool is_linear_homogeneous(const std::vector<Poly>& u) {
  for (const auto& p : u)
    for (const auto& [e, c] : p.terms()) {
      int deg = 0;
      for (int a : e)
        deg += a;
      if (deg != 1)
        return false;
    }
  return true;
}

void run_koszul(const Inputs& in, Builder& b, int degree) {
  auto chart = in.input_as<BundleChart>("bundle");
  const auto& sp = chart.fiber.space;
  if (sp.degrees() != std::vector<int>{1} && !sp.empty())
    throw Error(ErrorCode::HypothesisFailed, "Koszul chart needs a fiber concentrated in degree 1");
  for (const auto& [w, v] : chart.fiber.ops)
    if (!w.empty())
      throw Error(ErrorCode::HypothesisFailed, "Koszul chart carries only the curvature");
  KoszulChart c;
  c.n = chart.base_dim();
  c.k = sp.dim(1);
  if (c.k > c.n)
    throw Error(ErrorCode::HypothesisFailed, "fiber rank exceeds the base dimension");
  auto curv = chart.fiber.curvature();
  for (const auto& e : sp.basis(1)) {
    auto it = curv.find(e);
    c.u.push_back(it == curv.end() ? Poly() : it->second);
  }
  b.result["n"] = c.n;
  b.result["k"] = c.k;
  b.result["euler_form"] = c.is_euler();
  KoszulChart target = c;
  if (!c.is_euler()) {
    auto t = tubular_psi(c.u, c.k, c.n);
    Json psi = Json::array();
    for (size_t i = 0; i < t.psi.rows(); ++i) {
      Json row = Json::array();
      for (size_t j = 0; j < t.psi.cols(); ++j)
        row.push_back(poly_json(t.psi(i, j), c.n));
      psi.push_back(row);
    }
    b.result["psi"] = psi;
    b.add_all(t.verdicts);
    target = KoszulChart::euler(c.n, c.k);
  }
  auto r = koszul_identity_check(target, degree);
  b.result["monomials_checked"] = r.monomials_checked;
  b.add(pass_if("koszul-identity", r.pass, r.witness));
  if (!is_linear_homogeneous(c.u)) {
    b.add({"window-resolution", Status::Skipped, "curvature is not linear homogeneous"});
    return;
  }
  try {
    auto h = koszul_window_cohomology(c, degree);
    Json dims = Json::array();
    bool zero = true;
    for (const auto& [q, dim] : h) {
      dims.push_back(Json{{"degree", q}, {"dim", dim}});
      zero = zero && dim == 0;
    }
    b.result["window_cohomology"] = dims;
    b.add(pass_if("window-resolution", zero, "negative-degree Koszul cohomology is nonzero"));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::HypothesisFailed)
      throw;
    b.add({"window-resolution", Status::Skipped, e.what()});
  }
}

void run_heq(const Inputs& in, Builder& b, int weights) {
  auto s = in.input_as<Structure<Rat>>("structure");
  auto c = in.contraction(s.space);
  auto t = transfer(s, c);
  auto r = heq_check(t, static_cast<size_t>(weights));
  b.result["words_checked"] = r.words_checked;
  if (r.word) {
    b.result["failing_word"] = labels_json(s.space, *r.word);
    b.result["defect"] = format_sym(s.space, r.defect);
  }
  b.add({"heq", r.status, r.detail});
}

void run_bigrading(const Inputs& in, Builder& b) {
  auto s = in.input_as<Structure<Rat>>("structure");
  auto r = bigrading_audit(build_ce(s));
  Json comps = Json::array();
  std::string bad;
  for (const auto& c : r.components) {
    comps.push_back(Json{{"name", c.name},
                         {"arity", c.arity},
                         {"shift", Json::array({c.shift_k, c.shift_l})},
                         {"terms", c.terms},
                         {"ok", c.ok}});
    if (!c.ok)
      bad += (bad.empty() ? "" : ", ") + c.name;
  }
  b.result["components"] = comps;
  b.add(pass_if("bigrading", r.pass, "components off their bidegree: " + bad));
}

Json job_echo(const JobSpec& job) {
  Json j{{"cmd", job.cmd}};
  if (job.input)
    j["input"] = *job.input;
  if (job.contraction)
    j["contraction"] = *job.contraction;
  if (job.points)
    j["points"] = *job.points;
  if (job.degrees)
    j["degrees"] = *job.degrees;
  if (job.weights)
    j["weights"] = *job.weights;
  return j;
}

void dispatch(const JobSpec& job, const Inputs& in, Builder& b) {
  const auto& cmd = job.cmd;
  if (cmd == "check-relations")
    run_check_relations(in, b);
  else if (cmd == "check-morphism")
    run_check_morphism(in, b);
  else if (cmd == "transfer")
    run_transfer(in, b);
  else if (cmd == "reduce")
    run_reduce(in, b);
  else if (cmd == "split")
    run_split(in, b);
  else if (cmd == "pipeline")
    run_pipeline(in, b);
  else if (cmd == "etale")
    run_etale(in, b);
  else if (cmd == "ce")
    run_ce(in, b);
  else if (cmd == "cohomology")
    run_cohomology(in, b, default_or(job.degrees, 4));
  else if (cmd == "quasi-iso")
    run_quasi_iso(in, b, default_or(job.degrees, 4));
  else if (cmd == "koszul-verify")
    run_koszul(in, b, default_or(job.degrees, 6));
  else if (cmd == "heq")
    run_heq(in, b, default_or(job.weights, 4));
  else if (cmd == "bigrading")
    run_bigrading(in, b);
  else
    throw Error(ErrorCode::UnknownCommand, "\"" + cmd + "\"");
}

} // namespace

JobOutcome run_job(const JobSpec& job, const fs::path& base_dir) {
  auto start = std::chrono::steady_clock::now();
  JobOutcome out;
  Json& rep = out.report;
  rep["job"] = job_echo(job);
  Builder b;
  std::optional<Json> error;
  try {
    if (job.degrees && *job.degrees < 0)
      throw Error(ErrorCode::SchemaError, "$.degrees: must be nonnegative");
    if (job.weights && *job.weights < 0)
      throw Error(ErrorCode::SchemaError, "$.weights: must be nonnegative");
    Inputs in(job, base_dir);
    dispatch(job, in, b);
    out.exit_code = all_pass(b.verdicts) ? kExitPass : kExitCheckFailed;
  } catch (const Error& e) {
    error = Json{{"code", to_string(e.code())}, {"message", e.what()}};
    out.exit_code = is_input_error(e.code()) ? kExitInputError : kExitCheckFailed;
  } catch (const std::exception& e) {
    error = Json{{"code", "InternalError"}, {"message", e.what()}};
    out.exit_code = kExitCheckFailed;
  }
  rep["status"] = out.exit_code == kExitPass ? "pass" : out.exit_code == kExitCheckFailed ? "fail" : "error";
  Json vs = Json::array();
  for (const auto& v : b.verdicts)
    vs.push_back(verdict_json(v));
  rep["verdicts"] = vs;
  rep["result"] = b.result;
  if (error)
    rep["error"] = *error;
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  rep["timing_ms"] = ms;
  return out;
}

JobOutcome run_job_file(const fs::path& job_path) {
  try {
    auto d = load_document(job_path);
    auto* job = std::get_if<JobSpec>(&d);
    if (!job)
      throw Error(ErrorCode::SchemaError, job_path.string() + ": expected a job document");
    return run_job(*job, job_path.parent_path());
  } catch (const Error& e) {
    JobOutcome out;
    out.report["job"] = Json{{"file", job_path.filename().string()}};
    out.report["status"] = "error";
    out.report["verdicts"] = Json::array();
    out.report["result"] = Json::object();
    out.report["error"] = Json{{"code", to_string(e.code())}, {"message", e.what()}};
    out.report["timing_ms"] = 0;
    out.exit_code = kExitInputError;
    return out;
  }
}

std::string render_report(const Json& report, const std::string& format) {
  if (format == "json")
    return report.dump(2) + "\n";
  if (format != "text")
    throw Error(ErrorCode::SchemaError, "unknown format \"" + format + "\"");
  std::ostringstream os;
  os << "job: " << report["job"].value("cmd", std::string("?")) << "\n";
  os << "status: " << report["status"].get<std::string>() << "\n";
  for (const auto& v : report["verdicts"]) {
    os << "  [" << v["status"].get<std::string>() << "] " << v["name"].get<std::string>();
    if (v.contains("detail"))
      os << ": " << v["detail"].get<std::string>();
    os << "\n";
  }
  if (report.contains("error"))
    os << "error: " << report["error"]["message"].get<std::string>() << "\n";
  if (!report["result"].empty())
    os << "result:\n" << report["result"].dump(2) << "\n";
  os << "timing_ms: " << report["timing_ms"].dump() << "\n";
  return os.str();
}

std::string strip_timing(const std::string& rendered) {
  static const std::regex timing(R"((,\n)?[ ]*"?timing_ms"?: [0-9]+\n)");
  return std::regex_replace(rendered, timing, "\n");
}

} // namespace linfty
