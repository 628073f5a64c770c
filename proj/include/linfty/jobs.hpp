#pragma once

#include <filesystem>
#include <string>

#include "linfty/document.hpp"

namespace linfty {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

/// Commands accepted by run_job.
const std::vector<std::string>& job_commands();

struct JobOutcome {
  Json report;
  int exit_code = kExitPass;
};

/// Runs one job; input paths are resolved against base_dir. Never throws:
/// malformed input yields exit code 2 and an error block, a failed check or a
/// failed hypothesis yields exit code 1.
JobOutcome run_job(const JobSpec& job, const std::filesystem::path& base_dir);
/// Loads a job document and runs it relative to its own directory.
JobOutcome run_job_file(const std::filesystem::path& job_path);

/// "json" (canonical, timing_ms last) or "text".
std::string render_report(const Json& report, const std::string& format);
/// Report text without the timing line, for golden comparison.
std::string strip_timing(const std::string& rendered);

} // namespace linfty
