#pragma once

#include <string>

#include "regrest/llm_gateway.hpp"
#include "regrest/orchestrator.hpp"
#include "regrest/prompt_synth.hpp"
#include "regrest/workspace.hpp"

namespace regrest {

struct SubjectConfig {
  std::string name;
  std::string program_desc;
  std::string repo_path;
  BuildRecipe recipe;
  std::string cmd_template;
  int input_slots = 1;
};

struct TargetConfig {
  std::string rev;
  Scenario scenario = Scenario::BugFinding;
};

struct HarnessConfig {
  SubjectConfig subject;
  TargetConfig target;
  PromptConfig prompt; // scenario/desc/cmd fields filled from subject+target
  LlmConfig llm;
  RunConfig run;
  std::string output_dir = "regrest-out";
};

// Parses and cross-validates a JSON config document. Throws ConfigError.
HarnessConfig load_config(const std::string& path);
HarnessConfig parse_config(const std::string& json_text);

} // namespace regrest
