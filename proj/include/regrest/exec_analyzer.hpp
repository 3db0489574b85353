#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "regrest/commit_context.hpp"
#include "regrest/prompt_synth.hpp"
#include "regrest/workspace.hpp"

namespace regrest {

enum class RiprLevel : int {
  NotReached = 0,
  Reached = 1,
  OutputChanged = 2,
  BugTriggered = 3,
};

const char* ripr_level_name(RiprLevel level);

struct ExecutionRecord {
  Side side = Side::Pre;
  std::string stdout_data;
  std::string stderr_data;
  int exit_code = 0; // negative = signal, kTimeoutExitCode on timeout
  bool timed_out = false;
  double wall_time = 0;
  std::string workdir;
};

struct CrashSignature {
  std::string kind;      // e.g. "heap-buffer-overflow"
  std::string top_frame; // first in-target stack frame, or "unknown"

  bool operator==(const CrashSignature&) const = default;
};

struct CoverageSet {
  std::set<std::pair<std::string, int>> entries; // (repo-relative file, line)
};

// Runs the resolved command in `workdir` (created fresh), materializing
// `inputs` as input_1..input_N and substituting {inputN} placeholders.
// The first command token is resolved against build.binary_dir.
ExecutionRecord execute(const BuildArtifact& build, const std::string& cmd,
                        const std::vector<std::string>& inputs,
                        double exec_timeout, const std::string& workdir,
                        const std::string& sanitizer_options = {});

// Keyword rule from the crash oracle: any "Sanitizer" occurrence in
// stdout+stderr yields a signature; unparsable reports yield "unknown".
std::optional<CrashSignature> detect_sanitizer(const ExecutionRecord& rec);

// Parses gcov JSON intermediate output for every counter file under the
// artifact. Missing counters yield an empty set unless error_on_no_counters.
CoverageSet collect_coverage(const BuildArtifact& build,
                             bool error_on_no_counters = false);

bool reached(const CoverageSet& cov_pre, const CoverageSet& cov_post,
             const ChangedLineSet& lines_pre, const ChangedLineSet& lines_post);

// Strips sanitizer report blocks (addresses and pids vary run to run) and
// replaces the record's workdir path with a fixed token.
std::pair<std::string, std::string> normalize_output(const ExecutionRecord& rec);

bool outputs_differ(const ExecutionRecord& rec_pre,
                    const ExecutionRecord& rec_post);

RiprLevel classify(Scenario scenario,
                   const std::optional<CrashSignature>& sig_pre,
                   const std::optional<CrashSignature>& sig_post, bool differ,
                   bool reached);

} // namespace regrest
