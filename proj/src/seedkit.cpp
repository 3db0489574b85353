#include "regrest/seedkit.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>

#include <json.hpp>

#include "regrest/errors.hpp"
#include "regrest/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace regrest {

SeedCorpus export_seeds(const CampaignResult& campaign, RiprLevel min_level,
                        const std::string& out_dir) {
  if (min_level != RiprLevel::Reached && min_level != RiprLevel::OutputChanged)
    throw ConfigError("min_level must be reached or output_changed");

  SeedCorpus corpus;
  corpus.dir = out_dir;
  std::string commit7 = campaign.commit_id.substr(0, 7);

  for (size_t t = 0; t < campaign.trials.size(); ++t) {
    for (const Attempt& a : campaign.trials[t].attempts) {
      if (a.error || int(a.outcome) < int(min_level)) continue;
      for (size_t s = 0; s < a.candidate.inputs.size(); ++s) {
        SeedEntry entry;
        entry.commit = campaign.commit_id;
        entry.scenario = scenario_name(campaign.scenario);
        entry.trial = int(t) + 1;
        entry.attempt = a.ordinal;
        entry.slot = int(s) + 1;
        entry.outcome = a.outcome;
        entry.file = commit7 + "_" + entry.scenario + "_t" +
                     std::to_string(entry.trial) + "_a" +
                     std::to_string(entry.attempt) + "_s" +
                     std::to_string(entry.slot);
        corpus.seeds.push_back(entry);
      }
    }
  }
  if (corpus.seeds.empty())
    throw EmptyCorpus("no attempt qualifies at level " +
                      std::string(ripr_level_name(min_level)));

  fs::create_directories(out_dir);
  json manifest = json::array();
  size_t idx = 0;
  for (size_t t = 0; t < campaign.trials.size(); ++t) {
    for (const Attempt& a : campaign.trials[t].attempts) {
      if (a.error || int(a.outcome) < int(min_level)) continue;
      for (size_t s = 0; s < a.candidate.inputs.size(); ++s) {
        const SeedEntry& entry = corpus.seeds[idx++];
        write_file((fs::path(out_dir) / entry.file).string(),
                   a.candidate.inputs[s]);
        manifest.push_back({{"file", entry.file},
                            {"commit", entry.commit},
                            {"scenario", entry.scenario},
                            {"trial", entry.trial},
                            {"attempt", entry.attempt},
                            {"slot", entry.slot},
                            {"outcome", ripr_level_name(entry.outcome)}});
      }
    }
  }
  write_file((fs::path(out_dir) / "manifest.json").string(),
             manifest.dump(2) + "\n");
  return corpus;
}

std::string emit_fuzz_command(const SeedCorpus& corpus,
                              const BuildArtifact& build,
                              const std::string& cmd_template,
                              long duration_sec) {
  if (corpus.seeds.empty()) throw EmptyCorpus("cannot fuzz an empty corpus");
  if (duration_sec <= 0) throw ConfigError("fuzz duration must be positive");

  // AFL-style handoff: every input slot becomes the fuzzer's file placeholder
  std::string target = cmd_template;
  for (int i = 1; i <= 9; ++i)
    target = replace_all(target, "{input" + std::to_string(i) + "}", "@@");

  // resolve the leading token against the build, like the analyzer does
  auto space = target.find(' ');
  std::string head = target.substr(0, space);
  fs::path resolved = fs::path(build.binary_dir) / head;
  if (fs::exists(resolved))
    target = resolved.string() + (space == std::string::npos
                                      ? ""
                                      : target.substr(space));

  std::string out_dir = (fs::path(corpus.dir).parent_path() / "fuzz_out").string();
  return "afl-fuzz -i " + corpus.dir + " -o " + out_dir + " -V " +
         std::to_string(duration_sec) + " -- " + target;
}

double similarity_ratio(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  const size_t n = a.size(), m = b.size();
  std::vector<size_t> prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), size_t{0});
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double dist = double(prev[m]);
  return 1.0 - dist / double(std::max(n, m));
}

LeakageStats leakage_report(const std::vector<std::string>& generated,
                            const std::vector<std::string>& known_pocs) {
  if (generated.empty() || known_pocs.empty())
    throw EmptyInput("leakage report needs non-empty input sets");
  LeakageStats stats;
  for (const std::string& g : generated) {
    double best = 0;
    for (const std::string& p : known_pocs)
      best = std::max(best, similarity_ratio(g, p));
    stats.per_generated_max.push_back(best);
  }
  stats.mean = std::accumulate(stats.per_generated_max.begin(),
                               stats.per_generated_max.end(), 0.0) /
               double(stats.per_generated_max.size());
  stats.max = *std::max_element(stats.per_generated_max.begin(),
                                stats.per_generated_max.end());
  return stats;
}

} // namespace regrest
