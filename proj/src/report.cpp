#include "regrest/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "regrest/errors.hpp"

using nlohmann::json;

namespace regrest {

namespace {
constexpr int kBarWidth = 12;
constexpr int kSchemaVersion = 1;
} // namespace

const char* score_band(double normalized) {
  if (normalized <= 0.0) return "none";
  if (normalized <= 1.0 / 3.0) return "reached";
  if (normalized <= 2.0 / 3.0) return "output-changed";
  return "bug";
}

ReportRow row_from_campaign(const CampaignResult& campaign,
                            const std::string& label) {
  ReportRow row;
  row.commit = campaign.commit_id;
  row.scenario = scenario_name(campaign.scenario);
  row.label = label;
  row.normalized = campaign.normalized;
  row.bug_count = campaign.bug_count;
  row.repetitions = int(campaign.trials.size());
  row.avg_time = campaign.avg_time;
  return row;
}

std::string render_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    json rows = json::array();
    for (const ReportRow& r : report.rows)
      rows.push_back({{"commit", r.commit},
                      {"scenario", r.scenario},
                      {"label", r.label},
                      {"normalized_score", r.normalized},
                      {"band", score_band(r.normalized)},
                      {"bug_count", r.bug_count},
                      {"repetitions", r.repetitions},
                      {"avg_time_sec", r.avg_time}});
    json doc = {{"schema_version", kSchemaVersion},
                {"rows", rows},
                {"ledger", report.ledger_path}};
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "| Commit | Scenario | Config | Score | Band | Bug | T (s) |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const ReportRow& r : report.rows) {
    int filled = int(std::lround(r.normalized * kBarWidth));
    filled = std::max(0, std::min(kBarWidth, filled));
    std::string bar(size_t(filled), '#');
    bar += std::string(size_t(kBarWidth - filled), '-');
    char score[32];
    std::snprintf(score, sizeof score, "%.2f", r.normalized);
    char time_buf[32];
    std::snprintf(time_buf, sizeof time_buf, "%.1f", r.avg_time);
    out << "| " << r.commit.substr(0, 7) << " | " << r.scenario << " | "
        << (r.label.empty() ? "default" : r.label) << " | `" << bar << "` "
        << score << " | " << score_band(r.normalized) << " | " << r.bug_count
        << "/" << r.repetitions << " | " << time_buf << " |\n";
  }
  if (!report.ledger_path.empty())
    out << "\nLedger: " << report.ledger_path << "\n";
  return out.str();
}

Report parse_report(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("unreadable report: ") + e.what());
  }
  if (doc.value("schema_version", 0) != kSchemaVersion)
    throw Error("unsupported report schema version");
  Report report;
  report.ledger_path = doc.value("ledger", "");
  for (const auto& r : doc.value("rows", json::array())) {
    ReportRow row;
    row.commit = r.value("commit", "");
    row.scenario = r.value("scenario", "");
    row.label = r.value("label", "");
    row.normalized = r.value("normalized_score", 0.0);
    row.bug_count = r.value("bug_count", 0);
    row.repetitions = r.value("repetitions", 0);
    row.avg_time = r.value("avg_time_sec", 0.0);
    report.rows.push_back(std::move(row));
  }
  return report;
}

} // namespace regrest
