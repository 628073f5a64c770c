#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "linfty/jobs.hpp"

using namespace linfty;

namespace {

int emit(const JobOutcome& out, const std::string& format, const std::string& out_path) {
  std::string text = render_report(out.report, format);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "cannot write " << out_path << "\n";
      return kExitInputError;
    }
    f << text;
  }
  if (out.exit_code == kExitInputError && out.report.contains("error"))
    std::cerr << out.report["error"]["message"].get<std::string>() << "\n";
  return out.exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact L-infinity structure toolkit"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string out_path;
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Write the report here instead of stdout");
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  };

  std::string job_file;
  auto* run = app.add_subcommand("run", "Run a job document");
  run->add_option("job", job_file, "Job file")->required();
  add_output(run);

  JobSpec job;
  std::string input, contraction, points;
  int degrees = 0, weights = 0;
  std::vector<CLI::App*> commands;
  std::vector<std::pair<CLI::Option*, CLI::Option*>> counters;
  for (const auto& cmd : job_commands()) {
    auto* sub = app.add_subcommand(cmd, "Run the " + cmd + " job");
    sub->add_option("--input", input, "Input document")->required();
    sub->add_option("--contraction", contraction, "Contraction document");
    sub->add_option("--points", points, "Points document");
    auto* d = sub->add_option("--degrees", degrees, "Degree or depth bound");
    auto* w = sub->add_option("--weights", weights, "Weight bound");
    add_output(sub);
    commands.push_back(sub);
    counters.emplace_back(d, w);
  }

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "UnknownCommand: \"" << argv[1] << "\"\n";
    return kExitInputError;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInputError;
  }

  if (run->parsed())
    return emit(run_job_file(job_file), format, out_path);

  for (size_t i = 0; i < commands.size(); ++i) {
    if (!commands[i]->parsed())
      continue;
    job.cmd = commands[i]->get_name();
    job.input = input;
    if (!contraction.empty())
      job.contraction = contraction;
    if (!points.empty())
      job.points = points;
    if (counters[i].first->count())
      job.degrees = degrees;
    if (counters[i].second->count())
      job.weights = weights;
    return emit(run_job(job, std::filesystem::current_path()), format, out_path);
  }
  return kExitInputError;
}
