#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace regrest {

enum class Side { Pre, Post };

inline const char* side_name(Side s) { return s == Side::Pre ? "pre" : "post"; }

enum class InfoLevel { Both, DiffOnly, MsgOnly };

const char* info_level_name(InfoLevel level);
InfoLevel info_level_from_name(const std::string& name);

struct CommitInfo {
  std::string message;
  std::string raw_diff;
  size_t byte_len = 0;
};

struct DiffLine {
  enum class Tag { Context, Added, Removed, Meta };
  Tag tag = Tag::Context;
  std::string text; // without the leading marker character
};

struct Hunk {
  int old_start = 0;
  int old_len = 0;
  int new_start = 0;
  int new_len = 0;
  std::string section; // trailing text after the second @@
  std::vector<DiffLine> lines;
};

struct FileDiff {
  std::string old_path; // empty for added files
  std::string new_path; // empty for deleted files
  std::vector<Hunk> hunks;

  // Path used for extension filtering: new side unless the file was deleted.
  const std::string& effective_path() const {
    return new_path.empty() ? old_path : new_path;
  }
};

struct DiffModel {
  std::vector<FileDiff> files;
};

struct ChangedLineSet {
  Side side = Side::Post;
  std::set<std::pair<std::string, int>> entries;
};

struct CommitPayload {
  InfoLevel level = InfoLevel::Both;
  std::optional<std::string> message;
  std::optional<std::string> diff_text;
  size_t estimated_tokens = 0;
};

extern const std::set<std::string> kDefaultSourceExtensions;

// Parses git-style unified diff text. Throws MalformedDiff (message carries
// the 1-based line number) on hunk headers that cannot be read or line counts
// that disagree with their headers.
DiffModel parse_unified_diff(std::string_view text);

// Re-renders a model; parse(render(m)) is a fixpoint and hunk content is
// reproduced byte-for-byte (file headers are normalized).
std::string render_diff(const DiffModel& diff);

ChangedLineSet changed_lines(const DiffModel& diff, Side side);

DiffModel filter_source_diff(const DiffModel& diff,
                             const std::set<std::string>& extensions =
                                 kDefaultSourceExtensions);

// ceil(byte length / 4); crude but monotone.
size_t estimate_tokens(std::string_view text);

// Degradation ladder: requested level with the full diff, then with the
// C/C++-filtered diff, then message only. Throws BudgetUnsatisfiable when the
// message alone exceeds the budget.
CommitPayload fit_to_budget(const CommitInfo& info, InfoLevel level,
                            size_t budget_tokens);

} // namespace regrest
