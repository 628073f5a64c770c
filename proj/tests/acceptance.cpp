// Acceptance suite: one PASS/FAIL line per criterion. Usage:
//   acceptance <path to linfty binary> <fixtures directory>
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "linfty/ce.hpp"
#include "linfty/jobs.hpp"
#include "linfty/koszul.hpp"
#include "support/random_instances.hpp"

using namespace linfty;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail; // first failure, or a summary on success
};

/// Accumulates checks; keeps the first failure as the witness.
class Tally {
public:
  void check(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && pass_) {
      pass_ = false;
      witness_ = what;
    }
  }
  void verdicts(const std::vector<Verdict>& vs, const std::string& where) {
    for (const auto& v : vs)
      check(v.status != Status::Fail, where + ": " + v.name + " " + v.detail);
  }
  Outcome done(const std::string& summary) const {
    return {pass_, pass_ ? summary + " (" + std::to_string(checks_) + " checks)" : witness_};
  }

private:
  bool pass_ = true;
  size_t checks_ = 0;
  std::string witness_;
};

Status status_of(const std::vector<Verdict>& vs, const std::string& name) {
  for (const auto& v : vs)
    if (v.name == name)
      return v.status;
  return Status::Skipped;
}

std::vector<testkit::TransferInstance> transfer_suite() {
  std::vector<testkit::TransferInstance> out{{fixtures::e4(), fixtures::e4_contraction()}};
  testkit::Rng rng(7001);
  for (int i = 0; i < 25; ++i)
    out.push_back(testkit::random_transfer_instance(rng, i % 3 == 2));
  return out;
}

Outcome relation_ce_duality() {
  Tally t;
  std::vector<Structure<Rat>> suite{fixtures::e1(), fixtures::e2(), fixtures::e4(), fixtures::e5(),
                                    fixtures::e5_target()};
  auto bogus = fixtures::e1();
  bogus.ops[{}] = {{BasisElem{1, 0}, Rat(1)}};
  suite.push_back(bogus);
  testkit::Rng rng(7000);
  for (int i = 0; i < 50; ++i) {
    auto sp = testkit::random_space(rng, 6, 5);
    auto s = testkit::random_structure(rng, sp, i % 4 == 0);
    suite.push_back(s);
    if (i % 2 == 0 && !s.ops.empty()) {
      auto broken = s;
      auto& slot = broken.ops.rbegin()->second;
      slot.begin()->second += Rat(1, 2);
      suite.push_back(broken);
    }
  }
  size_t failing = 0;
  for (size_t i = 0; i < suite.size(); ++i) {
    bool rel = check_relations(suite[i]).pass;
    bool q2 = q_square_check(build_ce(suite[i])).pass;
    failing += rel ? 0 : 1;
    t.check(rel == q2, "instance " + std::to_string(i) + ": relations " + (rel ? "pass" : "fail") +
                           " but Q^2 check " + (q2 ? "pass" : "fail"));
  }
  t.check(failing > 0, "no instance violates the relations, the equivalence is untested");
  return t.done(std::to_string(suite.size()) + " structures, " + std::to_string(failing) + " violating");
}

Outcome transfer_identities(const std::vector<TransferResult>& ts) {
  Tally t;
  const char* required[] = {"mu-relations", "phi-morphism", "pitilde-phi-identity", "pitilde-morphism"};
  for (size_t i = 0; i < ts.size(); ++i) {
    auto vs = certify(ts[i]);
    t.verdicts(vs, "transfer " + std::to_string(i));
    for (const char* name : required)
      t.check(status_of(vs, name) == Status::Pass, "transfer " + std::to_string(i) + ": " + name + " not certified");
    t.check(status_of(vs, "etatilde-identity") != Status::Fail, "transfer " + std::to_string(i) + ": etatilde");
  }
  return t.done(std::to_string(ts.size()) + " transfers");
}

Outcome oracle_equivalence(const std::vector<TransferResult>& ts) {
  Tally t;
  for (size_t i = 0; i < ts.size(); ++i) {
    auto v = oracle_agreement(ts[i]);
    t.check(v.status == Status::Pass, "transfer " + std::to_string(i) + ": " + v.detail);
  }
  return t.done(std::to_string(ts.size()) + " transfers, arities <= 3");
}

Outcome inclusion_etale(const std::vector<TransferResult>& ts) {
  Tally t;
  size_t tested = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (ts[i].mu.is_curved())
      continue;
    ++tested;
    auto e = etale_pair(ts[i].phi);
    t.check(e.etale, "transfer " + std::to_string(i) + ": inclusion not etale");
  }
  t.check(tested >= 10, "too few uncurved transfers");
  return t.done(std::to_string(tested) + " uncurved inclusions");
}

Outcome firstcase_step1() {
  Tally t;
  auto e5 = firstcase_reduce(fixtures::e5_projection(), 3);
  t.verdicts(e5.verdicts, "E5 firstcase");
  t.check(e5.composed.is_linear(), "E5: phi iota not linear");
  std::vector<Morphism<Rat>> suite{fixtures::e5_projection()};
  testkit::Rng rng(7002);
  for (int i = 0; i < 10; ++i)
    suite.push_back(testkit::random_admissible_fibration(rng));
  size_t steps = 0;
  for (size_t i = 0; i < suite.size(); ++i) {
    auto r = step1_pipeline(suite[i]);
    std::string where = "instance " + std::to_string(i);
    t.verdicts(r.verdicts, where);
    t.check(status_of(r.verdicts, "final-ranks") == Status::Pass, where + ": degrees >= 2 not isomorphic");
    for (const auto& step : r.chain) {
      ++steps;
      t.verdicts(step.verdicts, where + " k=" + std::to_string(step.degree));
      t.check(step.composed.is_linear(), where + ": composed map not linear");
      t.check(status_of(step.verdicts, "composed-ranks") == Status::Pass, where + ": rank audit");
    }
  }
  return t.done(std::to_string(suite.size()) + " fibrations, " + std::to_string(steps) + " reduction steps");
}

BundleMorphism identity_on(const BundleChart& b) {
  auto m = constant_morphism(identity_morphism(fiber_at(b, Point(b.base_dim(), Rat(0)))), b.coords);
  m.source = b;
  m.target = b;
  return m;
}

BundleMorphism mixed_split() {
  Poly x = Poly::variable(0), y = Poly::variable(1);
  BundleChart src{{"x", "y"}, {GradedSpace({{1, {"a", "k"}}}), {}}};
  src.fiber.ops[{}] = {{{1, 0}, y}, {{1, 1}, x + x * y}};
  BundleChart tgt{{"y"}, {GradedSpace({{1, {"b"}}}), {}}};
  tgt.fiber.ops[{}] = {{{1, 0}, Poly::variable(0)}};
  BundleMorphism m{src, tgt, {y}, {}};
  m.components[{BasisElem{1, 0}}] = {{{1, 0}, Poly(1)}};
  return m;
}

Outcome lastcase_suite() {
  Tally t;
  struct Case {
    std::string name;
    BundleMorphism m;
    std::vector<Point> points;
    bool affine;
  };
  std::vector<Case> suite{
      {"b1 to point", fixtures::to_point(fixtures::b1()), {{Rat(0)}}, true},
      {"b1 identity", identity_on(fixtures::b1()), {{Rat(0)}}, true},
      {"E5 over a line", constant_morphism(fixtures::e5_projection(), {"y"}), {{Rat(0)}, {Rat(2)}}, true},
      {"mixed curvature", mixed_split(), {{Rat(0), Rat(0)}}, false},
  };
  size_t sections = 0;
  for (const auto& c : suite) {
    auto r = recap_pipeline(c.m, c.points);
    t.verdicts(r.verdicts, c.name);
    t.check(status_of(r.split.verdicts, "reconstruction") == Status::Pass, c.name + ": reconstruction");
    t.check(r.split.points.size() == c.points.size(), c.name + ": not every point certified");
    for (const auto& p : r.split.points) {
      t.check(status_of(p.verdicts, "regularity") == Status::Pass, c.name + ": regularity");
      t.check(status_of(p.verdicts, "local-diffeomorphism") == Status::Pass, c.name + ": local diffeomorphism");
    }
    if (c.affine) {
      t.check(r.section.has_value(), c.name + ": no section synthesised");
      t.check(status_of(r.verdicts, "section-composes") == Status::Pass, c.name + ": section does not compose");
      sections += r.section ? 1 : 0;
    }
  }
  try {
    lastcase_split(fixtures::to_point(fixtures::b1_degenerate()), {{Rat(0)}});
    t.check(false, "degenerate curvature accepted as regular");
  } catch (const Error& e) {
    t.check(e.code() == ErrorCode::RegularityFails, std::string("degenerate: ") + e.what());
  }
  return t.done(std::to_string(suite.size()) + " morphisms, " + std::to_string(sections) + " sections");
}

Outcome koszul_suite() {
  Tally t;
  size_t monomials = 0;
  for (size_t n = 1; n <= 3; ++n)
    for (size_t k = 1; k <= std::min<size_t>(n, 2); ++k) {
      auto r = koszul_identity_check(KoszulChart::euler(n, k), 6);
      monomials += r.monomials_checked;
      t.check(r.pass, "n=" + std::to_string(n) + " k=" + std::to_string(k) + ": " + r.witness);
    }
  testkit::Rng rng(7003);
  std::uniform_int_distribution<int> coef(-3, 3), ex(0, 2);
  for (int trial = 0; trial < 10; ++trial) {
    size_t n = 2 + trial % 2, k = 1 + trial % 2;
    std::vector<Poly> u;
    for (size_t j = 0; j < k; ++j) {
      Poly p = Poly::variable(j);
      for (int term = 0; term < 3; ++term) {
        std::vector<int> e(n);
        for (auto& v : e)
          v = ex(rng);
        e[term % k] += 1;
        p += Poly::monomial(e, Rat(coef(rng)));
      }
      u.push_back(p);
    }
    auto r = tubular_psi(u, k, n);
    t.check(status_of(r.verdicts, "euler-identity") == Status::Pass, "tubular trial " + std::to_string(trial));
    t.check(status_of(r.verdicts, "boundary-jacobian") == Status::Pass, "tubular trial " + std::to_string(trial));
  }
  return t.done(std::to_string(monomials) + " monomials, 10 tubular charts");
}

Outcome heq_bigrading(const std::vector<TransferResult>& ts) {
  Tally t;
  size_t tested = 0;
  for (size_t i = 0; i < ts.size() && tested < 11; ++i) {
    if (ts[i].source.is_curved())
      continue;
    ++tested;
    auto r = heq_check(ts[i], 4);
    t.check(r.status == Status::Pass, "transfer " + std::to_string(i) + ": " + r.detail);
    for (const auto* s : {&ts[i].source, &ts[i].mu}) {
      auto b = bigrading_audit(build_ce(*s));
      t.check(b.pass, "transfer " + std::to_string(i) + ": bigrading");
      for (const auto& c : b.components) {
        int n = static_cast<int>(c.arity);
        t.check(c.shift_k == n && c.shift_l == 1 - n, "component " + c.name + " has the wrong shift");
      }
    }
  }
  t.check(tested == 11, "fewer than E4 plus 10 uncurved transfers");
  return t.done("E4 plus " + std::to_string(tested - 1) + " transfers, weight <= 4");
}

Outcome ce_equivalences(const std::vector<TransferResult>& ts) {
  Tally t;
  std::vector<Morphism<Rat>> weq{identity_morphism(fixtures::e4()), fixtures::e5_projection(),
                                 {fixtures::e1(), fixtures::zero(GradedSpace()), {}}};
  for (const auto& tr : ts)
    if (!tr.mu.is_curved())
      weq.push_back(tr.phi);
  for (size_t i = 0; i < weq.size(); ++i) {
    auto r = quasi_iso_check(weq[i], 4);
    t.check(r.pass, "weak equivalence " + std::to_string(i) + " not a quasi-isomorphism");
  }
  std::vector<Structure<Rat>> points{fixtures::e1(), fixtures::e2(), fixtures::e4(), fixtures::e5(),
                                     fixtures::e5_target()};
  for (const auto& tr : ts)
    points.push_back(tr.source);
  for (size_t i = 0; i < points.size(); ++i) {
    size_t classical = points[i].is_curved() ? 0 : 1;
    t.check(ce_cohomology(build_ce(points[i]), 0).at(0).dim == classical, "H^0 mismatch on structure " + std::to_string(i));
  }
  GradedSpace one({{1, {"a"}}}), two({{1, {"a", "b"}}}), other({{1, {"c"}}});
  MultiMap<Rat> a_to_c{{Word{BasisElem{1, 0}}, {{BasisElem{1, 0}, Rat(1)}}}};
  Structure<Rat> a{one, {}}, ab{two, {}}, c{other, {}}, e{GradedSpace(), {}};
  Structure<Rat> a_curved{one, {{Word{}, {{BasisElem{1, 0}, Rat(1)}}}}};
  Structure<Rat> c_curved{other, {{Word{}, {{BasisElem{1, 0}, Rat(1)}}}}};
  std::vector<Morphism<Rat>> smooth{{e, e, {}},         {a, c, a_to_c},        {a, e, {}},
                                    {e, a, {}},         {ab, c, a_to_c},       {a_curved, c_curved, a_to_c},
                                    {a_curved, e, {}},  {c, a, {}}};
  for (size_t i = 0; i < smooth.size(); ++i) {
    bool qi = quasi_iso_check(smooth[i], 4).pass;
    bool we = weak_equivalence_check(smooth[i]).status == Status::Pass;
    t.check(qi == we, "quasi-smooth morphism " + std::to_string(i) + ": quasi-iso and etale disagree");
  }
  return t.done(std::to_string(weq.size()) + " weak equivalences, " + std::to_string(points.size()) +
                " point counts, " + std::to_string(smooth.size()) + " quasi-smooth morphisms");
}

struct Spawned {
  std::string out;
  int code = -1;
};

Spawned spawn(const std::string& cmd) {
  Spawned r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p)
    return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0)
    r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_goldens(const std::string& cli, const fs::path& fixtures_dir, Clock::time_point suite_start) {
  Tally t;
  std::map<std::string, int> expected;
  {
    std::ifstream in(fixtures_dir / "golden" / "exit-codes.txt");
    std::string name;
    int code;
    while (in >> name >> code)
      expected[name] = code;
  }
  std::vector<fs::path> jobs;
  for (const auto& entry : fs::directory_iterator(fixtures_dir / "jobs"))
    if (entry.path().extension() == ".json")
      jobs.push_back(entry.path());
  std::sort(jobs.begin(), jobs.end());
  t.check(!jobs.empty(), "no shipped jobs");
  t.check(jobs.size() == expected.size(), "exit-code manifest does not list every job");
  std::set<int> codes;
  for (const auto& job : jobs) {
    auto name = job.stem().string();
    auto golden = fixtures_dir / "golden" / (name + ".json");
    t.check(fs::exists(golden), name + ": no golden report");
    auto r = spawn("'" + cli + "' run '" + job.string() + "' 2>/dev/null");
    codes.insert(r.code);
    t.check(strip_timing(r.out) == strip_timing(slurp(golden)), name + ": report differs from the golden file");
    t.check(expected.count(name) && expected[name] == r.code, name + ": exit code " + std::to_string(r.code));
    std::string status;
    try {
      status = Json::parse(r.out).at("status").get<std::string>();
    } catch (const std::exception&) {
      status = "unparseable";
    }
    int implied = status == "pass" ? 0 : status == "fail" ? 1 : status == "error" ? 2 : -1;
    t.check(implied == r.code, name + ": status " + status + " disagrees with exit code");
  }
  t.check(codes == std::set<int>{0, 1, 2}, "shipped jobs do not exercise every exit code");
  auto elapsed = std::chrono::duration<double>(Clock::now() - suite_start).count();
  t.check(elapsed < 300, "acceptance suite exceeded 5 minutes");
  return t.done(std::to_string(jobs.size()) + " jobs");
}

} // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <linfty binary> <fixtures dir>\n";
    return 2;
  }
  auto suite_start = Clock::now();
  std::vector<TransferResult> transfers;
  for (const auto& inst : transfer_suite())
    transfers.push_back(transfer(inst.structure, inst.contraction));
  double transfer_seconds = std::chrono::duration<double>(Clock::now() - suite_start).count();

  struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {1, "relations hold exactly when Q squares to zero", 10, relation_ce_duality},
      {2, "transfer identities", 30, [&] { return transfer_identities(transfers); }},
      {3, "transfer agrees with the tree expansion", 30, [&] { return oracle_equivalence(transfers); }},
      {4, "uncurved transfer inclusions are etale", 30, [&] { return inclusion_etale(transfers); }},
      {5, "degreewise reduction of fibrations", 60, firstcase_step1},
      {6, "curvature splitting and section synthesis", 60, lastcase_suite},
      {7, "Koszul homotopy identity and tubular charts", 60, koszul_suite},
      {8, "transfer homotopy identity and bigrading", 60, [&] { return heq_bigrading(transfers); }},
      {9, "CE quasi-isomorphisms and classical points", 60, [&] { return ce_equivalences(transfers); }},
      {10, "CLI golden reports and exit codes", 300, [&] { return cli_goldens(argv[1], argv[2], suite_start); }},
  };
  bool all = true;
  for (const auto& c : criteria) {
    auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.id == 2)
      seconds += transfer_seconds;
    if (o.pass && seconds >= c.limit_seconds) {
      o.pass = false;
      o.detail = "runtime limit exceeded";
    }
    all = all && o.pass;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", seconds);
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << timing
              << "] " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
