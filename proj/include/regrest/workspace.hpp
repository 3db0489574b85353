#pragma once

#include <string>
#include <vector>

#include "regrest/commit_context.hpp"

namespace regrest {

struct CommitRef {
  std::string repo_path;
  std::string commit_id; // full hex id
  std::string parent_id; // full hex id of the first parent
};

// User-supplied build commands; the harness never guesses build systems.
// Commands run through /bin/sh in the checkout root with EXTRA_CFLAGS set to
// the instrumentation flags selected by the profile.
struct BuildRecipe {
  std::vector<std::string> commands;
  std::vector<std::string> binaries; // paths relative to the checkout root
  std::string sanitizer_flags = "-fsanitize=address -g";
  std::string coverage_flags = "--coverage";

  std::string fingerprint() const;
};

struct InstrumentProfile {
  bool sanitizer = false;
  bool coverage = false;
};

struct BuildArtifact {
  Side side = Side::Pre;
  std::string commit_id;
  std::string root;       // isolated checkout + build tree
  std::string binary_dir; // where recipe binaries live (== root)
  InstrumentProfile profile;
  std::string build_log;
  bool cache_hit = false;
};

CommitRef resolve_commit(const std::string& repo_path, const std::string& rev);

// message = raw commit body, raw_diff = textual diff against the first parent.
CommitInfo extract_commit_info(const CommitRef& ref);

class Workspace {
public:
  explicit Workspace(std::string cache_root);

  // Checks out the requested side into an isolated directory, runs the recipe
  // and verifies the binaries. Cached by (commit, side, profile, recipe hash).
  BuildArtifact build_version(const CommitRef& ref, Side side,
                              const BuildRecipe& recipe,
                              InstrumentProfile profile);

private:
  std::string cache_root_;
};

// Removes accumulated coverage counters (.gcda) under the artifact; idempotent.
void reset_coverage_counters(const BuildArtifact& build);

} // namespace regrest
