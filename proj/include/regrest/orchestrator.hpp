#pragma once

#include <string>
#include <vector>

#include "regrest/exec_analyzer.hpp"
#include "regrest/llm_gateway.hpp"
#include "regrest/prompt_synth.hpp"
#include "regrest/workspace.hpp"

namespace regrest {

struct RunConfig {
  int iterations = 5;
  int repetitions = 5;
  bool feedback_enabled = true;
  double exec_timeout = 10.0;
  size_t budget_tokens = 16384;
  std::string sanitizer_options =
      "abort_on_error=1:detect_leaks=0:allocator_may_return_null=1";
  // Zeroes recorded wall times so replay-driven runs are byte-identical.
  bool deterministic_timing = false;
};

struct Attempt {
  int ordinal = 1;
  Candidate candidate;
  ExecutionRecord rec_pre;
  ExecutionRecord rec_post;
  RiprLevel outcome = RiprLevel::NotReached;
  std::vector<std::pair<std::string, int>> covered_changed;
  std::string prompt_hash;
  bool error = false;
  std::string error_note;
  bool output_differed = false;
  bool reached_commit = false;
};

struct TrialResult {
  std::vector<Attempt> attempts;
  RiprLevel best = RiprLevel::NotReached;
  int score = 0;
  bool stopped_early = false;
  double wall_time = 0;
};

struct CampaignResult {
  std::vector<TrialResult> trials;
  double avg_score = 0;
  double normalized = 0; // avg_score / 3
  int bug_count = 0;
  double avg_time = 0;
  Scenario scenario = Scenario::BugFinding;
  std::string commit_id;
};

// Everything one feedback loop needs; builds must carry coverage
// instrumentation for reaching analysis.
struct TrialContext {
  CommitInfo info;
  ChangedLineSet lines_pre;
  ChangedLineSet lines_post;
  BuildArtifact build_pre;
  BuildArtifact build_post;
  PromptConfig prompt_config;
  RunConfig run_config;
  Provider* provider = nullptr;
  std::string work_root; // per-run scratch dir for attempt workdirs
};

class LedgerWriter {
public:
  LedgerWriter() = default;
  explicit LedgerWriter(std::string path);
  void append(int trial, const Attempt& attempt, Scenario scenario,
              const std::string& commit_id);
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

// Condenses a finished attempt into the feedback entry the next prompt sees.
AttemptFeedback feedback_from(const Attempt& attempt);

int trial_score(const TrialResult& trial);

TrialResult run_trial(TrialContext& ctx, int trial_index,
                      LedgerWriter* ledger = nullptr);

CampaignResult run_campaign(TrialContext& ctx, int repetitions,
                            LedgerWriter* ledger = nullptr);

// Scoring over already-finished trials: avg_score, normalized (= avg/3),
// bug_count and avg_time.
CampaignResult aggregate_campaign(std::vector<TrialResult> trials,
                                  Scenario scenario,
                                  const std::string& commit_id);

} // namespace regrest
