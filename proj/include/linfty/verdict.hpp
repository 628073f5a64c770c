#pragma once

#include <string>
#include <vector>

namespace linfty {

enum class Status { Pass, Fail, Skipped };

const char* to_string(Status s);

/// One named check with its outcome; detail carries the witness on failure
/// and the reason when skipped.
struct Verdict {
  std::string name;
  Status status = Status::Pass;
  std::string detail;
};

inline Verdict pass_if(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok ? Status::Pass : Status::Fail, ok ? std::string() : std::move(detail)};
}

/// Skipped verdicts do not count as failures.
inline bool all_pass(const std::vector<Verdict>& vs) {
  for (const auto& v : vs)
    if (v.status == Status::Fail)
      return false;
  return true;
}

} // namespace linfty
