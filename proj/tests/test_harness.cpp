#include "doctest.h"

#include <filesystem>

#include "json.hpp"
#include "regrest/harness.hpp"
#include "regrest/errors.hpp"
#include "regrest/util.hpp"

#include "support/fixture_repo.hpp"

using namespace regrest;
using namespace regrest::testing;

namespace fs = std::filesystem;

namespace {

HarnessConfig fixture_config(const ExprRepo& repo, const std::string& store,
                             const std::string& out_dir, int repetitions) {
  nlohmann::json doc = {
      {"subject",
       {{"name", "expr"},
        {"program_desc", "arithmetic expression interpreter"},
        {"repo_path", repo.path},
        {"cmd_template", "expr {input1}"},
        {"input_slots", 1},
        {"build",
         {{"commands",
           {"cc $EXTRA_CFLAGS -c expr.c", "cc $EXTRA_CFLAGS -o expr expr.o"}},
          {"binaries", {"expr"}}}}}},
      {"target", {{"rev", repo.bug_intro_id}, {"scenario", "bug_finding"}}},
      {"llm", {{"provider", "replay"}, {"store_dir", store}}},
      {"run", {{"repetitions", repetitions}}},
      {"output_dir", out_dir},
  };
  return parse_config(doc.dump());
}

std::string escalating_store() {
  std::string store = make_temp_dir("hn-store");
  write_replay_store(store, {
                                {1, "```\n1+2\n```\n"},
                                {2, "```\n$abc\n```\n"},
                                {3, "```\n$aaaaaaaaaaaaaaaaaaaa\n```\n"},
                            });
  return store;
}

} // namespace

TEST_CASE("cmd_run writes reports and is byte-deterministic under replay") {
  ExprRepo repo = make_expr_repo(make_temp_dir("hn-repo"));
  std::string out_dir = make_temp_dir("hn-out");
  HarnessConfig cfg = fixture_config(repo, escalating_store(), out_dir, 2);

  Report first = cmd_run(cfg);
  REQUIRE(first.rows.size() == 1);
  CHECK(first.rows[0].normalized == doctest::Approx(1.0));
  CHECK(first.rows[0].bug_count == 2);
  CHECK(first.rows[0].commit == repo.bug_intro_id);

  std::string report1 = read_file(out_dir + "/report.json");
  std::string ledger1 = read_file(out_dir + "/ledger.jsonl");
  CHECK(fs::exists(out_dir + "/report.md"));

  cmd_run(cfg); // second invocation, same store, same output dir
  CHECK(read_file(out_dir + "/report.json") == report1);
  CHECK(read_file(out_dir + "/ledger.jsonl") == ledger1);
}

TEST_CASE("cmd_ablate runs every cell and isolates failures") {
  ExprRepo repo = make_expr_repo(make_temp_dir("hn-ab-repo"));
  std::string out_dir = make_temp_dir("hn-ab-out");
  HarnessConfig cfg = fixture_config(repo, escalating_store(), out_dir, 1);

  AblationGrid grid = parse_grid(
      "{\"feedback\": [\"true\", \"false\"], \"info_level\": [\"both\", \"msg_only\"]}");
  Report report = cmd_ablate(cfg, grid);
  REQUIRE(report.rows.size() == 4);
  for (const ReportRow& row : report.rows) {
    CHECK(row.label.find("feedback=") != std::string::npos);
    CHECK(row.label.find("info_level=") != std::string::npos);
    CHECK(row.label.find("failed") == std::string::npos);
    CHECK(row.normalized == doctest::Approx(1.0)); // wildcard store covers all
  }
  CHECK(fs::exists(out_dir + "/ablation.json"));
  CHECK(fs::exists(out_dir + "/ablation.md"));
  CHECK(fs::exists(out_dir + "/cell_1/ledger.jsonl"));
  CHECK(fs::exists(out_dir + "/cell_4/ledger.jsonl"));
}

TEST_CASE("apply_overrides touches exactly the requested axes") {
  ExprRepo repo = make_expr_repo(make_temp_dir("hn-ov-repo"));
  HarnessConfig base = fixture_config(repo, escalating_store(),
                                      make_temp_dir("hn-ov-out"), 1);
  HarnessConfig changed = apply_overrides(
      base, {{"feedback", "false"}, {"temperature", "0.9"}, {"iterations", "2"}});
  CHECK(!changed.prompt.feedback_enabled);
  CHECK(changed.llm.temperature == doctest::Approx(0.9));
  CHECK(changed.run.iterations == 2);
  CHECK(changed.prompt.info_level == base.prompt.info_level);
  CHECK_THROWS_AS(apply_overrides(base, {{"mystery_axis", "1"}}), ConfigError);
  CHECK_THROWS_AS(parse_grid("{\"feedback\": []}"), ConfigError);
  CHECK_THROWS_AS(parse_grid("[]"), ConfigError);
}

TEST_CASE("cmd_export_seeds replays the ledger into a fuzz corpus") {
  ExprRepo repo = make_expr_repo(make_temp_dir("hn-ex-repo"));
  std::string out_dir = make_temp_dir("hn-ex-out");
  HarnessConfig cfg = fixture_config(repo, escalating_store(), out_dir, 2);
  cmd_run(cfg);

  std::string corpus_dir = out_dir + "/seeds";
  std::string cmd =
      cmd_export_seeds(cfg, out_dir, RiprLevel::OutputChanged, corpus_dir, 86400);
  CHECK(cmd.find("afl-fuzz") != std::string::npos);
  CHECK(cmd.find(corpus_dir) != std::string::npos);
  CHECK(cmd.find("-V 86400") != std::string::npos);
  CHECK(cmd.find("@@") != std::string::npos);

  // per trial: $abc (OutputChanged) and the overflow input (BugTriggered)
  auto manifest = nlohmann::json::parse(read_file(corpus_dir + "/manifest.json"));
  CHECK(manifest.size() == 4);
  int found = 0;
  for (auto& entry : manifest) {
    std::string contents =
        read_file(corpus_dir + "/" + entry.at("file").get<std::string>());
    if (contents == "$abc\n" || contents == "$aaaaaaaaaaaaaaaaaaaa\n") ++found;
  }
  CHECK(found == 4);
}
