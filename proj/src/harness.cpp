#include "regrest/harness.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "regrest/errors.hpp"
#include "regrest/seedkit.hpp"
#include "regrest/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace regrest {

namespace {

struct PreparedRun {
  CommitRef ref;
  TrialContext ctx;
  std::unique_ptr<Provider> provider;
};

PreparedRun prepare(const HarnessConfig& config, const std::string& out_dir) {
  PreparedRun run;
  run.ref = resolve_commit(config.subject.repo_path, config.target.rev);
  run.ctx.info = extract_commit_info(run.ref);

  DiffModel diff = parse_unified_diff(run.ctx.info.raw_diff);
  run.ctx.lines_pre = changed_lines(diff, Side::Pre);
  run.ctx.lines_post = changed_lines(diff, Side::Post);

  // shared build cache across ablation cells: keyed runs reuse artifacts
  Workspace workspace((fs::path(config.output_dir) / "build_cache").string());
  InstrumentProfile profile{.sanitizer = true, .coverage = true};
  run.ctx.build_pre =
      workspace.build_version(run.ref, Side::Pre, config.subject.recipe, profile);
  run.ctx.build_post =
      workspace.build_version(run.ref, Side::Post, config.subject.recipe, profile);

  run.ctx.prompt_config = config.prompt;
  run.ctx.run_config = config.run;
  run.ctx.run_config.feedback_enabled = config.prompt.feedback_enabled;
  run.provider = make_provider(config.llm);
  run.ctx.provider = run.provider.get();
  run.ctx.work_root = (fs::path(out_dir) / "work").string();
  return run;
}

ReportRow run_one_campaign(const HarnessConfig& config,
                           const std::string& out_dir,
                           const std::string& label,
                           std::string* ledger_path_out) {
  fs::create_directories(out_dir);
  PreparedRun run = prepare(config, out_dir);
  LedgerWriter ledger((fs::path(out_dir) / "ledger.jsonl").string());
  CampaignResult campaign =
      run_campaign(run.ctx, config.run.repetitions, &ledger);
  if (ledger_path_out) *ledger_path_out = ledger.path();
  return row_from_campaign(campaign, label);
}

} // namespace

Report cmd_run(const HarnessConfig& config) {
  fs::create_directories(config.output_dir);
  Report report;
  report.rows.push_back(
      run_one_campaign(config, config.output_dir, "", &report.ledger_path));
  write_file((fs::path(config.output_dir) / "report.json").string(),
             render_report(report, ReportFormat::Json));
  write_file((fs::path(config.output_dir) / "report.md").string(),
             render_report(report, ReportFormat::Markdown));
  return report;
}

AblationGrid parse_grid(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid is not valid JSON: ") + e.what());
  }
  AblationGrid grid;
  for (auto& [axis, values] : doc.items()) {
    if (!values.is_array() || values.empty())
      throw ConfigError("grid axis '" + axis + "' must be a non-empty array");
    for (const auto& v : values) {
      if (v.is_string())
        grid[axis].push_back(v.get<std::string>());
      else
        grid[axis].push_back(v.dump());
    }
  }
  if (grid.empty()) throw ConfigError("grid has no axes");
  return grid;
}

HarnessConfig apply_overrides(HarnessConfig base,
                              const std::map<std::string, std::string>& cell) {
  for (const auto& [axis, value] : cell) {
    if (axis == "info_level") {
      base.prompt.info_level = info_level_from_name(value);
    } else if (axis == "gen_cmd") {
      base.prompt.gen_cmd = value == "true" || value == "1";
    } else if (axis == "temperature") {
      base.llm.temperature = std::stod(value);
    } else if (axis == "model") {
      base.llm.model = value;
    } else if (axis == "iterations") {
      base.run.iterations = std::stoi(value);
    } else if (axis == "feedback") {
      base.prompt.feedback_enabled = value == "true" || value == "1";
      base.run.feedback_enabled = base.prompt.feedback_enabled;
    } else {
      throw ConfigError("unknown ablation axis: " + axis);
    }
  }
  return base;
}

Report cmd_ablate(const HarnessConfig& config, const AblationGrid& grid) {
  // expand the cartesian product
  std::vector<std::map<std::string, std::string>> cells{{}};
  for (const auto& [axis, values] : grid) {
    std::vector<std::map<std::string, std::string>> next;
    for (const auto& cell : cells) {
      for (const auto& value : values) {
        auto extended = cell;
        extended[axis] = value;
        next.push_back(std::move(extended));
      }
    }
    cells = std::move(next);
  }

  Report report;
  fs::create_directories(config.output_dir);
  int cell_index = 0;
  for (const auto& cell : cells) {
    ++cell_index;
    std::string label;
    for (const auto& [axis, value] : cell) {
      if (!label.empty()) label += ",";
      label += axis + "=" + value;
    }
    if (label.empty()) label = "default";
    std::string cell_dir =
        (fs::path(config.output_dir) / ("cell_" + std::to_string(cell_index)))
            .string();
    try {
      HarnessConfig cell_config = apply_overrides(config, cell);
      cell_config.output_dir = config.output_dir; // share the build cache
      report.rows.push_back(
          run_one_campaign(cell_config, cell_dir, label, nullptr));
    } catch (const Error& e) {
      ReportRow failed;
      failed.scenario = scenario_name(config.target.scenario);
      failed.label = label + " [failed: " + e.what() + "]";
      report.rows.push_back(std::move(failed));
    }
  }
  write_file((fs::path(config.output_dir) / "ablation.json").string(),
             render_report(report, ReportFormat::Json));
  write_file((fs::path(config.output_dir) / "ablation.md").string(),
             render_report(report, ReportFormat::Markdown));
  return report;
}

std::string cmd_export_seeds(const HarnessConfig& config,
                             const std::string& run_dir, RiprLevel min_level,
                             const std::string& out_dir, long duration_sec) {
  std::string ledger_path = (fs::path(run_dir) / "ledger.jsonl").string();
  std::ifstream in(ledger_path);
  if (!in) throw Error("no ledger found at " + ledger_path);

  // rebuild a campaign view from the ledger; inputs are stored inline
  CampaignResult campaign;
  campaign.scenario = config.target.scenario;
  std::map<int, TrialResult> trials;
  for (std::string line; std::getline(in, line);) {
    if (trim(line).empty()) continue;
    json rec = json::parse(line);
    Attempt attempt;
    attempt.ordinal = rec.value("attempt", 1);
    attempt.error = rec.value("error", false);
    attempt.candidate.inputs =
        rec.value("inputs", std::vector<std::string>{});
    std::string outcome = rec.value("outcome", "not_reached");
    for (int lv = 0; lv <= 3; ++lv)
      if (outcome == ripr_level_name(RiprLevel(lv)))
        attempt.outcome = RiprLevel(lv);
    campaign.commit_id = rec.value("commit", "");
    trials[rec.value("trial", 1)].attempts.push_back(std::move(attempt));
  }
  for (auto& [_, trial] : trials) campaign.trials.push_back(std::move(trial));
  if (campaign.trials.empty()) throw Error("ledger is empty: " + ledger_path);

  SeedCorpus corpus = export_seeds(campaign, min_level, out_dir);

  // cached build resolves the fuzz target path; a cache hit costs nothing
  CommitRef ref = resolve_commit(config.subject.repo_path, config.target.rev);
  Workspace workspace((fs::path(config.output_dir) / "build_cache").string());
  InstrumentProfile profile{.sanitizer = true, .coverage = true};
  BuildArtifact build =
      workspace.build_version(ref, Side::Post, config.subject.recipe, profile);
  return emit_fuzz_command(corpus, build, config.subject.cmd_template,
                           duration_sec);
}

} // namespace regrest
