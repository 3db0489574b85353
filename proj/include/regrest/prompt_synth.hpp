#pragma once

#include <string>
#include <vector>

#include "regrest/commit_context.hpp"

namespace regrest {

enum class Scenario { BugFinding, BugReproduction };

const char* scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct PromptConfig {
  Scenario scenario = Scenario::BugFinding;
  std::string program_desc; // e.g. "JavaScript interpreter"
  InfoLevel info_level = InfoLevel::Both;
  bool gen_cmd = false;
  int input_slots = 1;
  std::string cmd_template; // numbered {inputN} placeholders
  bool feedback_enabled = true;
  std::string templates_dir;            // optional override for task wording
  size_t feedback_output_cap = 8 * 1024; // per stream, bytes
};

struct Prompt {
  std::string text;
  std::vector<std::string> sections; // ordered marker names
};

// What one prior attempt contributes to the next prompt. Outputs must already
// be normalized (no host paths) by the execution analyzer.
struct AttemptFeedback {
  int ordinal = 1;
  std::vector<std::string> inputs;
  bool error = false;
  std::string error_note;
  std::string outcome_name;
  bool reached = false;
  std::vector<std::string> covered_changed; // "file:line"
  bool output_differed = false;
  std::string output_pre;  // combined stdout+stderr, pre side
  std::string output_post; // combined stdout+stderr, post side
  int exit_code_pre = 0;
  int exit_code_post = 0;
};

// Pure rendering: identical arguments yield identical bytes.
Prompt synthesize(const PromptConfig& config, const CommitPayload& payload,
                  const std::vector<AttemptFeedback>& history);

std::string render_attempt_feedback(const AttemptFeedback& attempt,
                                    bool feedback_enabled, size_t output_cap);

} // namespace regrest
