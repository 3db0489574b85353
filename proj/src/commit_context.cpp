#include "regrest/commit_context.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include "regrest/errors.hpp"
#include "regrest/util.hpp"

namespace regrest {

const std::set<std::string> kDefaultSourceExtensions = {
    ".c", ".h", ".cc", ".cpp", ".hh", ".hpp", ".cxx"};

const char* info_level_name(InfoLevel level) {
  switch (level) {
    case InfoLevel::Both: return "both";
    case InfoLevel::DiffOnly: return "diff_only";
    case InfoLevel::MsgOnly: return "msg_only";
  }
  return "both";
}

InfoLevel info_level_from_name(const std::string& name) {
  std::string n = to_lower(name);
  if (n == "both") return InfoLevel::Both;
  if (n == "diff_only" || n == "diffonly" || n == "diff") return InfoLevel::DiffOnly;
  if (n == "msg_only" || n == "msgonly" || n == "msg") return InfoLevel::MsgOnly;
  throw ConfigError("unknown info level: " + name);
}

namespace {

std::string strip_prefix_path(const std::string& header_path) {
  if (header_path == "/dev/null") return {};
  if (header_path.size() > 2 &&
      (header_path[0] == 'a' || header_path[0] == 'b') && header_path[1] == '/')
    return header_path.substr(2);
  return header_path;
}

[[noreturn]] void malformed(size_t line_no, const std::string& why) {
  throw MalformedDiff("line " + std::to_string(line_no + 1) + ": " + why);
}

} // namespace

DiffModel parse_unified_diff(std::string_view text) {
  DiffModel model;
  auto lines = split_lines(text);
  static const std::regex hunk_re(
      R"(^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@(.*)$)");

  FileDiff* cur = nullptr;
  size_t i = 0;
  while (i < lines.size()) {
    const std::string& line = lines[i];
    if (line.rfind("diff --git ", 0) == 0) {
      model.files.emplace_back();
      cur = &model.files.back();
      ++i;
      continue;
    }
    if (line.rfind("--- ", 0) == 0) {
      // a header after a populated section starts the next file even when the
      // surrounding "diff --git" line is absent
      if (!cur || !cur->hunks.empty()) {
        model.files.emplace_back();
        cur = &model.files.back();
      }
      cur->old_path = strip_prefix_path(line.substr(4));
      ++i;
      if (i >= lines.size() || lines[i].rfind("+++ ", 0) != 0)
        malformed(i, "expected +++ header after ---");
      cur->new_path = strip_prefix_path(lines[i].substr(4));
      ++i;
      continue;
    }
    if (line.rfind("rename from ", 0) == 0 && cur) {
      cur->old_path = line.substr(12);
      ++i;
      continue;
    }
    if (line.rfind("rename to ", 0) == 0 && cur) {
      cur->new_path = line.substr(10);
      ++i;
      continue;
    }
    if (line.rfind("@@", 0) == 0) {
      if (!cur) malformed(i, "hunk header outside of a file section");
      std::smatch m;
      if (!std::regex_match(line, m, hunk_re))
        malformed(i, "unreadable hunk header");
      Hunk hunk;
      hunk.old_start = std::stoi(m[1]);
      hunk.old_len = m[2].matched ? std::stoi(m[2]) : 1;
      hunk.new_start = std::stoi(m[3]);
      hunk.new_len = m[4].matched ? std::stoi(m[4]) : 1;
      hunk.section = m[5];
      ++i;
      int seen_old = 0, seen_new = 0;
      while ((seen_old < hunk.old_len || seen_new < hunk.new_len) &&
             i < lines.size()) {
        const std::string& body = lines[i];
        DiffLine dl;
        if (body.empty() || body[0] == ' ') {
          dl.tag = DiffLine::Tag::Context;
          dl.text = body.empty() ? "" : body.substr(1);
          ++seen_old;
          ++seen_new;
        } else if (body[0] == '+') {
          dl.tag = DiffLine::Tag::Added;
          dl.text = body.substr(1);
          ++seen_new;
        } else if (body[0] == '-') {
          dl.tag = DiffLine::Tag::Removed;
          dl.text = body.substr(1);
          ++seen_old;
        } else if (body[0] == '\\') {
          dl.tag = DiffLine::Tag::Meta;
          dl.text = body.substr(1);
        } else {
          malformed(i, "unexpected line inside hunk");
        }
        hunk.lines.push_back(std::move(dl));
        ++i;
      }
      if (seen_old != hunk.old_len || seen_new != hunk.new_len)
        malformed(i, "hunk shorter than its header claims");
      // a trailing "\ No newline at end of file" belongs to this hunk
      if (i < lines.size() && !lines[i].empty() && lines[i][0] == '\\') {
        hunk.lines.push_back({DiffLine::Tag::Meta, lines[i].substr(1)});
        ++i;
      }
      cur->hunks.push_back(std::move(hunk));
      continue;
    }
    // index lines, mode lines, "Binary files ... differ", blank separators
    ++i;
  }
  return model;
}

std::string render_diff(const DiffModel& diff) {
  std::ostringstream out;
  for (const FileDiff& f : diff.files) {
    const std::string old_hdr = f.old_path.empty() ? "/dev/null" : "a/" + f.old_path;
    const std::string new_hdr = f.new_path.empty() ? "/dev/null" : "b/" + f.new_path;
    out << "diff --git a/" << (f.old_path.empty() ? f.new_path : f.old_path)
        << " b/" << (f.new_path.empty() ? f.old_path : f.new_path) << "\n";
    out << "--- " << old_hdr << "\n";
    out << "+++ " << new_hdr << "\n";
    for (const Hunk& h : f.hunks) {
      out << "@@ -" << h.old_start << "," << h.old_len << " +" << h.new_start
          << "," << h.new_len << " @@" << h.section << "\n";
      for (const DiffLine& l : h.lines) {
        switch (l.tag) {
          case DiffLine::Tag::Context: out << ' '; break;
          case DiffLine::Tag::Added: out << '+'; break;
          case DiffLine::Tag::Removed: out << '-'; break;
          case DiffLine::Tag::Meta: out << '\\'; break;
        }
        out << l.text << "\n";
      }
    }
  }
  return out.str();
}

ChangedLineSet changed_lines(const DiffModel& diff, Side side) {
  ChangedLineSet set;
  set.side = side;
  for (const FileDiff& f : diff.files) {
    for (const Hunk& h : f.hunks) {
      int old_no = h.old_start;
      int new_no = h.new_start;
      for (const DiffLine& l : h.lines) {
        switch (l.tag) {
          case DiffLine::Tag::Context:
            ++old_no;
            ++new_no;
            break;
          case DiffLine::Tag::Added:
            if (side == Side::Post) set.entries.emplace(f.new_path, new_no);
            ++new_no;
            break;
          case DiffLine::Tag::Removed:
            if (side == Side::Pre) set.entries.emplace(f.old_path, old_no);
            ++old_no;
            break;
          case DiffLine::Tag::Meta:
            break;
        }
      }
    }
  }
  return set;
}

DiffModel filter_source_diff(const DiffModel& diff,
                             const std::set<std::string>& extensions) {
  DiffModel out;
  for (const FileDiff& f : diff.files) {
    const std::string& path = f.effective_path();
    auto dot = path.rfind('.');
    if (dot == std::string::npos) continue;
    if (extensions.count(path.substr(dot))) out.files.push_back(f);
  }
  return out;
}

size_t estimate_tokens(std::string_view text) {
  return (text.size() + 3) / 4;
}

CommitPayload fit_to_budget(const CommitInfo& info, InfoLevel level,
                            size_t budget_tokens) {
  const bool want_msg = level != InfoLevel::DiffOnly;
  const bool want_diff = level != InfoLevel::MsgOnly;

  auto assemble = [&](InfoLevel lv, bool msg, const std::optional<std::string>& diff) {
    CommitPayload p;
    p.level = lv;
    if (msg) p.message = info.message;
    p.diff_text = diff;
    p.estimated_tokens = (p.message ? estimate_tokens(*p.message) : 0) +
                         (p.diff_text ? estimate_tokens(*p.diff_text) : 0);
    return p;
  };

  if (want_diff) {
    CommitPayload full = assemble(level, want_msg, info.raw_diff);
    if (full.estimated_tokens <= budget_tokens) return full;

    std::string filtered =
        render_diff(filter_source_diff(parse_unified_diff(info.raw_diff)));
    CommitPayload narrowed = assemble(level, want_msg, filtered);
    if (narrowed.estimated_tokens <= budget_tokens) return narrowed;
  }

  CommitPayload msg_only = assemble(InfoLevel::MsgOnly, true, std::nullopt);
  if (msg_only.estimated_tokens <= budget_tokens) return msg_only;
  throw BudgetUnsatisfiable("commit message alone exceeds the token budget (" +
                            std::to_string(msg_only.estimated_tokens) + " > " +
                            std::to_string(budget_tokens) + ")");
}

} // namespace regrest
