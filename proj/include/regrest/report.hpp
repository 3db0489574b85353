#pragma once

#include <string>
#include <vector>

#include "regrest/orchestrator.hpp"

namespace regrest {

struct ReportRow {
  std::string commit;
  std::string scenario;
  std::string label; // ablation cell description, empty for plain runs
  double normalized = 0;
  int bug_count = 0;
  int repetitions = 0;
  double avg_time = 0;
};

struct Report {
  std::vector<ReportRow> rows;
  std::string ledger_path;
};

enum class ReportFormat { Json, Markdown };

ReportRow row_from_campaign(const CampaignResult& campaign,
                            const std::string& label = {});

// Markdown renders the normalized score as a 12-char bar with a band label
// (none / reached / output-changed / bug); JSON is schema-versioned and
// round-trips through parse_report.
std::string render_report(const Report& report, ReportFormat format);
Report parse_report(const std::string& json_text);

// Band for a normalized score: [0], (0,1/3], (1/3,2/3], (2/3,1].
const char* score_band(double normalized);

} // namespace regrest
