#include "regrest/orchestrator.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "regrest/errors.hpp"
#include "regrest/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace regrest {

namespace {

double now_sec() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

}  // namespace

AttemptFeedback feedback_from(const Attempt& attempt) {
  AttemptFeedback fb;
  fb.ordinal = attempt.ordinal;
  fb.inputs = attempt.candidate.inputs;
  fb.error = attempt.error;
  fb.error_note = attempt.error_note;
  fb.outcome_name = ripr_level_name(attempt.outcome);
  fb.reached = attempt.reached_commit;
  for (const auto& [file, line] : attempt.covered_changed)
    fb.covered_changed.push_back(file + ":" + std::to_string(line));
  fb.output_differed = attempt.output_differed;
  auto [out_pre, err_pre] = normalize_output(attempt.rec_pre);
  auto [out_post, err_post] = normalize_output(attempt.rec_post);
  fb.output_pre = out_pre + err_pre;
  fb.output_post = out_post + err_post;
  fb.exit_code_pre = attempt.rec_pre.exit_code;
  fb.exit_code_post = attempt.rec_post.exit_code;
  return fb;
}

namespace {

std::vector<std::pair<std::string, int>> covered_changed_lines(
    const CoverageSet& cov, const ChangedLineSet& changed) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& e : changed.entries)
    if (cov.entries.count(e)) out.push_back(e);
  return out;
}

} // namespace

LedgerWriter::LedgerWriter(std::string path) : path_(std::move(path)) {
  fs::create_directories(fs::path(path_).parent_path());
  std::ofstream(path_, std::ios::trunc); // fresh ledger per run
}

void LedgerWriter::append(int trial, const Attempt& attempt, Scenario scenario,
                          const std::string& commit_id) {
  if (path_.empty()) return;
  json rec = {
      {"commit", commit_id},
      {"scenario", scenario_name(scenario)},
      {"trial", trial},
      {"attempt", attempt.ordinal},
      {"outcome", ripr_level_name(attempt.outcome)},
      {"score", int(attempt.outcome)},
      {"error", attempt.error},
      {"error_note", attempt.error_note},
      {"prompt_sha256", attempt.prompt_hash},
      {"inputs", attempt.candidate.inputs},
      {"cmd", attempt.candidate.cmd ? json(*attempt.candidate.cmd) : json()},
      {"exit_code_pre", attempt.rec_pre.exit_code},
      {"exit_code_post", attempt.rec_post.exit_code},
      {"timed_out_pre", attempt.rec_pre.timed_out},
      {"timed_out_post", attempt.rec_post.timed_out},
      {"output_differed", attempt.output_differed},
      {"reached", attempt.reached_commit},
      {"covered_changed", [&] {
         json arr = json::array();
         for (const auto& [f, l] : attempt.covered_changed)
           arr.push_back(f + ":" + std::to_string(l));
         return arr;
       }()},
  };
  std::ofstream out(path_, std::ios::app);
  out << rec.dump() << "\n";
}

int trial_score(const TrialResult& trial) {
  int best = 0;
  for (const Attempt& a : trial.attempts) best = std::max(best, int(a.outcome));
  return best;
}

TrialResult run_trial(TrialContext& ctx, int trial_index, LedgerWriter* ledger) {
  if (!ctx.provider) throw FatalEnvironment("no LLM provider configured");
  if (!fs::exists(ctx.build_pre.binary_dir) ||
      !fs::exists(ctx.build_post.binary_dir))
    throw FatalEnvironment("build artifacts missing");

  const RunConfig& rc = ctx.run_config;
  CommitPayload payload =
      fit_to_budget(ctx.info, ctx.prompt_config.info_level, rc.budget_tokens);

  TrialResult trial;
  std::vector<AttemptFeedback> history;
  ctx.provider->begin_trial();
  double start = now_sec();

  for (int iter = 1; iter <= rc.iterations; ++iter) {
    Attempt attempt;
    attempt.ordinal = iter;

    Prompt prompt = synthesize(ctx.prompt_config, payload, history);
    attempt.prompt_hash = sha256_hex(prompt.text);

    try {
      std::string raw = ctx.provider->complete(prompt.text);
      attempt.candidate = parse_response(raw, ctx.prompt_config.gen_cmd,
                                         ctx.prompt_config.input_slots);
    } catch (const Error& e) {
      // parse/LLM failures consume the iteration and feed back as an error
      attempt.error = true;
      attempt.error_note = e.what();
    }

    if (!attempt.error) {
      std::string cmd = ctx.prompt_config.gen_cmd && attempt.candidate.cmd
                            ? *attempt.candidate.cmd
                            : ctx.prompt_config.cmd_template;
      fs::path attempt_dir = fs::path(ctx.work_root) /
                             ("trial_" + std::to_string(trial_index)) /
                             ("attempt_" + std::to_string(iter));
      try {
        // coverage counters are shared on-disk state: reset, run, collect,
        // one side at a time
        reset_coverage_counters(ctx.build_pre);
        attempt.rec_pre = execute(ctx.build_pre, cmd, attempt.candidate.inputs,
                                  rc.exec_timeout, (attempt_dir / "pre").string(),
                                  rc.sanitizer_options);
        CoverageSet cov_pre = collect_coverage(ctx.build_pre);

        reset_coverage_counters(ctx.build_post);
        attempt.rec_post = execute(ctx.build_post, cmd, attempt.candidate.inputs,
                                   rc.exec_timeout, (attempt_dir / "post").string(),
                                   rc.sanitizer_options);
        CoverageSet cov_post = collect_coverage(ctx.build_post);

        auto sig_pre = detect_sanitizer(attempt.rec_pre);
        auto sig_post = detect_sanitizer(attempt.rec_post);
        attempt.output_differed = outputs_differ(attempt.rec_pre, attempt.rec_post);
        attempt.reached_commit = reached(cov_pre, cov_post, ctx.lines_pre, ctx.lines_post);

        attempt.covered_changed = covered_changed_lines(cov_pre, ctx.lines_pre);
        auto post_hits = covered_changed_lines(cov_post, ctx.lines_post);
        attempt.covered_changed.insert(attempt.covered_changed.end(),
                                       post_hits.begin(), post_hits.end());

        attempt.outcome =
            classify(ctx.prompt_config.scenario, sig_pre, sig_post,
                     attempt.output_differed, attempt.reached_commit);
      } catch (const Error& e) {
        attempt.error = true;
        attempt.error_note = e.what();
        attempt.outcome = RiprLevel::NotReached;
      }
    }

    if (rc.deterministic_timing) {
      attempt.rec_pre.wall_time = 0;
      attempt.rec_post.wall_time = 0;
    }
    if (ledger) ledger->append(trial_index, attempt, ctx.prompt_config.scenario,
                               ctx.build_post.commit_id);
    history.push_back(feedback_from(attempt));
    bool triggered = attempt.outcome == RiprLevel::BugTriggered;
    trial.attempts.push_back(std::move(attempt));
    if (triggered) {
      trial.stopped_early = true;
      break;
    }
  }

  trial.score = trial_score(trial);
  trial.best = RiprLevel(trial.score);
  trial.wall_time = rc.deterministic_timing ? 0 : now_sec() - start;
  return trial;
}

CampaignResult aggregate_campaign(std::vector<TrialResult> trials,
                                  Scenario scenario,
                                  const std::string& commit_id) {
  if (trials.empty()) throw ConfigError("campaign needs at least one trial");
  CampaignResult campaign;
  campaign.scenario = scenario;
  campaign.commit_id = commit_id;
  campaign.trials = std::move(trials);

  double total_score = 0, total_time = 0;
  for (const TrialResult& trial : campaign.trials) {
    total_score += trial.score;
    total_time += trial.wall_time;
    if (trial.score == int(RiprLevel::BugTriggered)) ++campaign.bug_count;
  }
  campaign.avg_score = total_score / double(campaign.trials.size());
  campaign.normalized = campaign.avg_score / 3.0;
  campaign.avg_time = total_time / double(campaign.trials.size());
  return campaign;
}

CampaignResult run_campaign(TrialContext& ctx, int repetitions,
                            LedgerWriter* ledger) {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  std::vector<TrialResult> trials;
  for (int t = 1; t <= repetitions; ++t)
    trials.push_back(run_trial(ctx, t, ledger));
  return aggregate_campaign(std::move(trials), ctx.prompt_config.scenario,
                            ctx.build_post.commit_id);
}

} // namespace regrest
