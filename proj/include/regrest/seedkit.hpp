#pragma once

#include <string>
#include <vector>

#include "regrest/orchestrator.hpp"

namespace regrest {

struct SeedEntry {
  std::string file; // relative to the corpus dir
  std::string commit;
  std::string scenario;
  int trial = 0;
  int attempt = 0;
  int slot = 0;
  RiprLevel outcome = RiprLevel::NotReached;
};

struct SeedCorpus {
  std::string dir;
  std::vector<SeedEntry> seeds;
};

// Writes one file per qualifying attempt input (slot suffix for multi-input
// candidates) plus a JSON manifest; deterministic naming, idempotent re-export.
SeedCorpus export_seeds(const CampaignResult& campaign, RiprLevel min_level,
                        const std::string& out_dir);

// Renders a ready-to-run fuzzer invocation; never executed by the harness.
std::string emit_fuzz_command(const SeedCorpus& corpus,
                              const BuildArtifact& build,
                              const std::string& cmd_template,
                              long duration_sec);

// 1 - d(a,b)/max(|a|,|b|) with Levenshtein distance d; (empty, empty) -> 1.
double similarity_ratio(std::string_view a, std::string_view b);

struct LeakageStats {
  std::vector<double> per_generated_max;
  double mean = 0;
  double max = 0;
};

LeakageStats leakage_report(const std::vector<std::string>& generated,
                            const std::vector<std::string>& known_pocs);

} // namespace regrest
