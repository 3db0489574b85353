#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "regrest/errors.hpp"
#include "regrest/harness.hpp"
#include "regrest/seedkit.hpp"
#include "regrest/util.hpp"

namespace fs = std::filesystem;
using namespace regrest;

namespace {

// 0 = ran, 1 = usage/config error, 2 = environment failure
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEnvironment = 2;

int classify_exit(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  return kExitEnvironment;
}

std::vector<std::string> read_dir_files(const std::string& dir) {
  std::vector<std::string> out;
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) out.push_back(read_file(p.string()));
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLM-guided differential regression test harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string grid_path;
  std::string run_dir;
  std::string min_level = "reached";
  std::string out_dir;
  std::string generated_dir, known_dir;
  std::string ledger_dir;
  std::string format = "markdown";
  long fuzz_duration = 86400;

  auto* run = app.add_subcommand("run", "execute one campaign end-to-end");
  run->add_option("-c,--config", config_path, "harness config (JSON)")
      ->required();

  auto* ablate = app.add_subcommand("ablate", "run a configuration grid");
  ablate->add_option("-c,--config", config_path, "harness config (JSON)")
      ->required();
  ablate->add_option("-g,--grid", grid_path, "grid spec (JSON)")->required();

  auto* seeds = app.add_subcommand("export-seeds",
                                   "export qualifying inputs as fuzzer seeds");
  seeds->add_option("-c,--config", config_path, "harness config (JSON)")
      ->required();
  seeds->add_option("--run-dir", run_dir, "directory of a prior run")
      ->required();
  seeds->add_option("--min-level", min_level,
                    "reached or output_changed (default reached)");
  seeds->add_option("-o,--out", out_dir, "corpus output directory")->required();
  seeds->add_option("--duration", fuzz_duration,
                    "fuzz budget in seconds (default 86400)");

  auto* leakage = app.add_subcommand(
      "leakage", "similarity statistics against known proof-of-concept inputs");
  leakage->add_option("--generated", generated_dir, "generated inputs dir")
      ->required();
  leakage->add_option("--known", known_dir, "known PoC inputs dir")->required();

  auto* report = app.add_subcommand("report", "re-render a run's report");
  report->add_option("--run-dir", ledger_dir, "directory of a prior run")
      ->required();
  report->add_option("-f,--format", format, "json or markdown");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      Report rep = cmd_run(load_config(config_path));
      std::cout << render_report(rep, ReportFormat::Markdown);
      return kExitOk;
    }
    if (ablate->parsed()) {
      Report rep =
          cmd_ablate(load_config(config_path), parse_grid(read_file(grid_path)));
      std::cout << render_report(rep, ReportFormat::Markdown);
      return kExitOk;
    }
    if (seeds->parsed()) {
      RiprLevel level = min_level == "output_changed" ? RiprLevel::OutputChanged
                                                      : RiprLevel::Reached;
      try {
        std::string cmd = cmd_export_seeds(load_config(config_path), run_dir,
                                           level, out_dir, fuzz_duration);
        std::cout << "Seed corpus: " << out_dir << "\n"
                  << "Fuzz handoff: " << cmd << "\n";
      } catch (const EmptyCorpus& e) {
        std::cerr << "warning: " << e.what() << "\n";
      }
      return kExitOk;
    }
    if (leakage->parsed()) {
      LeakageStats stats =
          leakage_report(read_dir_files(generated_dir), read_dir_files(known_dir));
      nlohmann::json doc = {{"ratio_convention", "1 - levenshtein/max_len"},
                            {"per_generated_max", stats.per_generated_max},
                            {"mean", stats.mean},
                            {"max", stats.max}};
      std::cout << doc.dump(2) << "\n";
      return kExitOk;
    }
    if (report->parsed()) {
      Report rep = parse_report(
          read_file((fs::path(ledger_dir) / "report.json").string()));
      std::cout << render_report(rep, format == "json" ? ReportFormat::Json
                                                       : ReportFormat::Markdown);
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEnvironment;
  }
  return kExitUsage;
}
