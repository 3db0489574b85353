#include "regrest/config.hpp"

#include <regex>

#include <json.hpp>

#include "regrest/errors.hpp"
#include "regrest/util.hpp"

using nlohmann::json;

namespace regrest {

namespace {

int count_placeholder_slots(const std::string& cmd_template) {
  static const std::regex slot_re(R"(\{input(\d+)\})");
  int max_slot = 0;
  for (auto it = std::sregex_iterator(cmd_template.begin(), cmd_template.end(),
                                      slot_re);
       it != std::sregex_iterator(); ++it)
    max_slot = std::max(max_slot, std::stoi((*it)[1]));
  return max_slot;
}

} // namespace

HarnessConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  HarnessConfig cfg;
  try {
    const json& subject = doc.at("subject");
    cfg.subject.name = subject.value("name", "subject");
    cfg.subject.program_desc = subject.at("program_desc").get<std::string>();
    cfg.subject.repo_path = subject.at("repo_path").get<std::string>();
    cfg.subject.cmd_template = subject.value("cmd_template", "");
    cfg.subject.input_slots = subject.value("input_slots", 1);

    const json& build = subject.at("build");
    cfg.subject.recipe.commands =
        build.at("commands").get<std::vector<std::string>>();
    cfg.subject.recipe.binaries =
        build.at("binaries").get<std::vector<std::string>>();
    cfg.subject.recipe.sanitizer_flags =
        build.value("sanitizer_flags", cfg.subject.recipe.sanitizer_flags);
    cfg.subject.recipe.coverage_flags =
        build.value("coverage_flags", cfg.subject.recipe.coverage_flags);

    const json& target = doc.at("target");
    cfg.target.rev = target.at("rev").get<std::string>();
    cfg.target.scenario =
        scenario_from_name(target.value("scenario", "bug_finding"));

    const json& prompt = doc.value("prompt", json::object());
    cfg.prompt.scenario = cfg.target.scenario;
    cfg.prompt.program_desc = cfg.subject.program_desc;
    cfg.prompt.info_level =
        info_level_from_name(prompt.value("info_level", "both"));
    cfg.prompt.gen_cmd = prompt.value("gen_cmd", false);
    cfg.prompt.input_slots = cfg.subject.input_slots;
    cfg.prompt.cmd_template = cfg.subject.cmd_template;
    cfg.prompt.feedback_enabled = prompt.value("feedback_enabled", true);
    cfg.prompt.templates_dir = prompt.value("templates_dir", "");
    cfg.prompt.feedback_output_cap =
        prompt.value("feedback_output_cap", cfg.prompt.feedback_output_cap);

    const json& llm = doc.value("llm", json::object());
    cfg.llm.provider = provider_kind_from_name(llm.value("provider", "replay"));
    cfg.llm.model = llm.value("model", cfg.llm.model);
    cfg.llm.temperature = llm.value("temperature", cfg.llm.temperature);
    cfg.llm.max_tokens = llm.value("max_tokens", cfg.llm.max_tokens);
    cfg.llm.request_timeout =
        llm.value("request_timeout", cfg.llm.request_timeout);
    cfg.llm.endpoint = llm.value("endpoint", "");
    cfg.llm.api_key_env = llm.value("api_key_env", cfg.llm.api_key_env);
    cfg.llm.store_dir = llm.value("store_dir", "");

    const json& run = doc.value("run", json::object());
    cfg.run.iterations = run.value("iterations", cfg.run.iterations);
    cfg.run.repetitions = run.value("repetitions", cfg.run.repetitions);
    cfg.run.feedback_enabled = cfg.prompt.feedback_enabled;
    cfg.run.exec_timeout = run.value("exec_timeout", cfg.run.exec_timeout);
    cfg.run.budget_tokens = run.value("budget_tokens", cfg.run.budget_tokens);
    cfg.run.sanitizer_options =
        run.value("sanitizer_options", cfg.run.sanitizer_options);
    cfg.run.deterministic_timing = run.value(
        "deterministic_timing", cfg.llm.provider == ProviderKind::Replay);

    cfg.output_dir = doc.value("output_dir", cfg.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }

  // cross-field checks
  if (!cfg.prompt.gen_cmd && cfg.subject.cmd_template.empty())
    throw ConfigError("cmd_template required unless prompt.gen_cmd is true");
  if (!cfg.subject.cmd_template.empty()) {
    int slots = count_placeholder_slots(cfg.subject.cmd_template);
    if (slots != cfg.subject.input_slots)
      throw ConfigError("cmd_template references " + std::to_string(slots) +
                        " input slots but input_slots is " +
                        std::to_string(cfg.subject.input_slots));
  }
  if (cfg.subject.input_slots < 1)
    throw ConfigError("input_slots must be >= 1");
  if (cfg.run.iterations < 1 || cfg.run.repetitions < 1)
    throw ConfigError("iterations and repetitions must be >= 1");
  if (cfg.llm.temperature < 0 || cfg.llm.temperature > 2)
    throw ConfigError("temperature out of range [0,2]");
  if (cfg.subject.recipe.commands.empty())
    throw ConfigError("build.commands must not be empty");
  if (cfg.subject.recipe.binaries.empty())
    throw ConfigError("build.binaries must not be empty");
  return cfg;
}

HarnessConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

} // namespace regrest
