#include "regrest/prompt_synth.hpp"

#include <filesystem>
#include <sstream>

#include "regrest/errors.hpp"
#include "regrest/util.hpp"

namespace fs = std::filesystem;

namespace regrest {

const char* scenario_name(Scenario s) {
  return s == Scenario::BugFinding ? "bug_finding" : "bug_reproduction";
}

Scenario scenario_from_name(const std::string& name) {
  std::string n = to_lower(name);
  if (n == "bug_finding" || n == "bugfinding" || n == "find")
    return Scenario::BugFinding;
  if (n == "bug_reproduction" || n == "bugreproduction" || n == "reproduce")
    return Scenario::BugReproduction;
  throw ConfigError("unknown scenario: " + name);
}

namespace {

// Default task wording; a templates directory with bug_finding.txt /
// bug_reproduction.txt overrides these so ablations can swap phrasing
// without a rebuild. Placeholders: {{program_desc}}, {{goal}}, {{format_spec}}.
constexpr const char* kTaskTemplate =
    "You are testing {{program_desc}}.\n"
    "Your goal is to generate a test input that {{goal}}.\n"
    "{{format_spec}}\n";

std::string goal_phrase(Scenario s) {
  if (s == Scenario::BugFinding)
    return "triggers a bug introduced by the commit below";
  return "reproduces the bug that was fixed by the commit below, i.e. fails "
         "on the version before the commit but not after";
}

std::string format_spec(const PromptConfig& c) {
  std::ostringstream out;
  if (c.input_slots == 1) {
    out << "Return the test input wrapped in a triple-backtick fenced block, "
           "along with a brief explanation of the expected behavior.";
  } else {
    out << "The program takes " << c.input_slots
        << " input files. Return each input wrapped in its own triple-backtick "
           "fenced block, in order, along with a brief explanation of the "
           "expected behavior.";
  }
  if (c.gen_cmd) {
    out << " Also return the command line used to run the program in a "
           "separate fenced block labeled cmd; refer to the input files as ";
    for (int i = 1; i <= c.input_slots; ++i) {
      if (i > 1) out << (i == c.input_slots ? " and " : ", ");
      out << "{input" << i << "}";
    }
    out << ".";
  }
  return out.str();
}

std::string load_task_template(const PromptConfig& c) {
  if (!c.templates_dir.empty()) {
    fs::path p = fs::path(c.templates_dir) /
                 (std::string(scenario_name(c.scenario)) + ".txt");
    if (fs::exists(p)) return read_file(p.string());
  }
  return kTaskTemplate;
}

} // namespace

std::string render_attempt_feedback(const AttemptFeedback& a,
                                    bool feedback_enabled, size_t output_cap) {
  std::ostringstream out;
  out << "### Attempt " << a.ordinal << "\n";
  for (size_t i = 0; i < a.inputs.size(); ++i) {
    out << "Previously generated input";
    if (a.inputs.size() > 1) out << " " << (i + 1);
    out << ":\n```\n" << a.inputs[i];
    if (!a.inputs[i].empty() && a.inputs[i].back() != '\n') out << "\n";
    out << "```\n";
  }
  if (a.inputs.empty()) out << "No usable input was produced.\n";

  if (!feedback_enabled) return out.str();

  if (a.error) {
    out << "Result: the attempt failed before execution (" << a.error_note
        << ").\n";
    return out.str();
  }

  out << "Result: " << a.outcome_name << ".\n";
  if (a.reached) {
    out << "The execution reached code changed by the commit";
    if (!a.covered_changed.empty()) {
      out << "; covered changed lines: ";
      for (size_t i = 0; i < a.covered_changed.size(); ++i) {
        if (i) out << ", ";
        out << a.covered_changed[i];
      }
    }
    out << ".\n";
  } else {
    out << "The execution did not reach any code changed by the commit.\n";
  }
  out << (a.output_differed
              ? "The output differed between the two versions.\n"
              : "The output was identical on both versions.\n");

  auto emit_output = [&](const char* label, const std::string& text,
                         int exit_code) {
    out << label << " (return code " << exit_code << "):\n```\n";
    if (text.size() > output_cap) {
      out << text.substr(0, output_cap) << "\n[output truncated]\n";
    } else {
      out << text;
      if (!text.empty() && text.back() != '\n') out << "\n";
    }
    out << "```\n";
  };
  emit_output("Program output before the commit", a.output_pre, a.exit_code_pre);
  emit_output("Program output after the commit", a.output_post, a.exit_code_post);
  return out.str();
}

Prompt synthesize(const PromptConfig& config, const CommitPayload& payload,
                  const std::vector<AttemptFeedback>& history) {
  Prompt prompt;
  std::ostringstream out;

  std::string task = load_task_template(config);
  task = replace_all(task, "{{program_desc}}", config.program_desc);
  task = replace_all(task, "{{goal}}", goal_phrase(config.scenario));
  task = replace_all(task, "{{format_spec}}", format_spec(config));

  out << "# Task Description\n" << task;
  if (task.empty() || task.back() != '\n') out << "\n";
  prompt.sections.push_back("TaskDescription");

  out << "\n# Commit Information\n";
  prompt.sections.push_back("CommitInformation");
  if (payload.message) {
    out << "## Commit Message\n" << *payload.message;
    if (payload.message->empty() || payload.message->back() != '\n') out << "\n";
  }
  if (payload.diff_text) {
    out << "## Code Diff\n" << *payload.diff_text;
    if (payload.diff_text->empty() || payload.diff_text->back() != '\n')
      out << "\n";
  }

  if (!history.empty()) {
    out << "\n# Attempt History\n";
    prompt.sections.push_back("AttemptHistory");
    for (const AttemptFeedback& a : history)
      out << render_attempt_feedback(a, config.feedback_enabled,
                                     config.feedback_output_cap);
  }

  prompt.text = out.str();
  return prompt;
}

} // namespace regrest
