#include "regrest/exec_analyzer.hpp"

#include <filesystem>
#include <regex>

#include <json.hpp>

#include "regrest/errors.hpp"
#include "regrest/subprocess.hpp"
#include "regrest/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace regrest {

const char* ripr_level_name(RiprLevel level) {
  switch (level) {
    case RiprLevel::NotReached: return "not_reached";
    case RiprLevel::Reached: return "reached";
    case RiprLevel::OutputChanged: return "output_changed";
    case RiprLevel::BugTriggered: return "bug_triggered";
  }
  return "not_reached";
}

namespace {

std::string substitute_inputs(const std::string& cmd,
                              const std::vector<std::string>& input_paths) {
  static const std::regex slot_re(R"(\{input(\d+)\})");
  std::set<int> referenced;
  for (auto it = std::sregex_iterator(cmd.begin(), cmd.end(), slot_re);
       it != std::sregex_iterator(); ++it)
    referenced.insert(std::stoi((*it)[1]));

  const int slots = int(input_paths.size());
  for (int idx : referenced)
    if (idx < 1 || idx > slots)
      throw SlotMismatch("command references {input" + std::to_string(idx) +
                         "} but only " + std::to_string(slots) +
                         " inputs exist");
  for (int i = 1; i <= slots; ++i)
    if (!referenced.count(i))
      throw SlotMismatch("command never references {input" + std::to_string(i) +
                         "}");

  std::string resolved = cmd;
  for (int i = 1; i <= slots; ++i)
    resolved = replace_all(resolved, "{input" + std::to_string(i) + "}",
                           input_paths[size_t(i - 1)]);
  return resolved;
}

std::vector<std::string> tokenize(const std::string& cmd) {
  std::vector<std::string> argv;
  std::istringstream ss(cmd);
  for (std::string tok; ss >> tok;) argv.push_back(tok);
  return argv;
}

bool is_separator_line(const std::string& line) {
  if (line.size() < 10) return false;
  for (char c : line)
    if (c != '=') return false;
  return true;
}

bool is_report_start(const std::string& line) {
  if (line.find("Sanitizer") == std::string::npos) return false;
  return line.find("ERROR:") != std::string::npos ||
         line.find("WARNING:") != std::string::npos ||
         line.find("SUMMARY:") != std::string::npos ||
         line.find("DEADLYSIGNAL") != std::string::npos;
}

// Removes whole sanitizer report blocks; they embed addresses, pids and
// shadow-memory dumps that differ between otherwise identical crashes.
std::string strip_sanitizer_blocks(const std::string& text) {
  auto lines = split_lines(text);
  std::vector<bool> drop(lines.size(), false);
  size_t i = 0;
  while (i < lines.size()) {
    if (!is_report_start(lines[i])) {
      ++i;
      continue;
    }
    size_t start = i;
    if (start > 0 && is_separator_line(lines[start - 1])) --start;
    size_t end = i;
    bool closed = false;
    for (size_t j = i; j < lines.size(); ++j) {
      if (lines[j].find("ABORTING") != std::string::npos) {
        end = j;
        closed = true;
        break;
      }
    }
    if (!closed) end = lines.size() - 1;
    for (size_t j = start; j <= end; ++j) drop[j] = true;
    i = end + 1;
  }
  std::string out;
  for (size_t j = 0; j < lines.size(); ++j) {
    if (drop[j]) continue;
    out += lines[j];
    out += '\n';
  }
  // preserve exact bytes when nothing was stripped
  if (out.size() == text.size() + 1 && !text.empty() && text.back() != '\n')
    out.pop_back();
  return out;
}

} // namespace

ExecutionRecord execute(const BuildArtifact& build, const std::string& cmd,
                        const std::vector<std::string>& inputs,
                        double exec_timeout, const std::string& workdir,
                        const std::string& sanitizer_options) {
  fs::remove_all(workdir);
  fs::create_directories(workdir);

  std::vector<std::string> input_paths;
  for (size_t i = 0; i < inputs.size(); ++i) {
    fs::path p = fs::path(workdir) / ("input_" + std::to_string(i + 1));
    write_file(p.string(), inputs[i]);
    input_paths.push_back(p.string());
  }

  std::vector<std::string> argv = tokenize(substitute_inputs(cmd, input_paths));
  if (argv.empty()) throw SpawnFailed("empty command");
  fs::path candidate = fs::path(build.binary_dir) / argv[0];
  if (fs::exists(candidate)) argv[0] = candidate.string();

  RunSpec spec;
  spec.argv = std::move(argv);
  spec.cwd = workdir;
  spec.timeout_sec = exec_timeout;
  if (!sanitizer_options.empty()) spec.env_extra["ASAN_OPTIONS"] = sanitizer_options;
  auto res = run_process(spec);

  ExecutionRecord rec;
  rec.side = build.side;
  rec.stdout_data = std::move(res.out);
  rec.stderr_data = std::move(res.err);
  rec.exit_code = res.exit_code;
  rec.timed_out = res.timed_out;
  rec.wall_time = res.wall_time;
  rec.workdir = workdir;
  return rec;
}

std::optional<CrashSignature> detect_sanitizer(const ExecutionRecord& rec) {
  std::string combined = rec.stdout_data + "\n" + rec.stderr_data;
  if (combined.find("Sanitizer") == std::string::npos) return std::nullopt;

  CrashSignature sig{"unknown", "unknown"};

  static const std::regex kind_re(
      R"((?:ERROR|SUMMARY): \w*Sanitizer:? ([A-Za-z][-A-Za-z0-9_]*))");
  std::smatch m;
  if (std::regex_search(combined, m, kind_re)) sig.kind = m[1];

  // first stack frame pointing into the target, not the sanitizer runtime
  static const std::regex frame_re(
      R"(#\d+\s+0x[0-9a-fA-F]+\s+in\s+(\S+)(?:\s+(\S+))?)");
  for (auto it = std::sregex_iterator(combined.begin(), combined.end(), frame_re);
       it != std::sregex_iterator(); ++it) {
    std::string symbol = (*it)[1];
    std::string location = (*it)[2].matched ? (*it)[2].str() : "";
    std::string probe = to_lower(symbol + " " + location);
    if (probe.find("asan") != std::string::npos ||
        probe.find("sanitizer") != std::string::npos ||
        probe.find("interceptor") != std::string::npos ||
        location.rfind("/usr/", 0) == 0 || location.rfind("/lib", 0) == 0)
      continue;
    if (!location.empty()) {
      // reduce "path/file.c:12:5" to "file.c:12"
      fs::path loc(location);
      std::string name = loc.filename().string();
      auto first_colon = name.find(':');
      if (first_colon != std::string::npos) {
        auto second_colon = name.find(':', first_colon + 1);
        sig.top_frame = name.substr(0, second_colon);
      } else {
        sig.top_frame = name;
      }
    } else {
      sig.top_frame = symbol;
    }
    break;
  }
  return sig;
}

CoverageSet collect_coverage(const BuildArtifact& build,
                             bool error_on_no_counters) {
  std::vector<fs::path> counter_files;
  for (const auto& entry : fs::recursive_directory_iterator(build.root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".gcda")
      counter_files.push_back(entry.path());
  }
  if (counter_files.empty()) {
    if (error_on_no_counters)
      throw NoCounters("no coverage counters under " + build.root);
    return {};
  }

  CoverageSet cov;
  for (const fs::path& gcda : counter_files) {
    RunSpec spec;
    spec.argv = {"gcov", "--stdout", "--json-format", gcda.string()};
    spec.cwd = gcda.parent_path().string();
    spec.timeout_sec = 60;
    auto res = run_process(spec);
    if (!res.ok())
      throw CoverageToolFailed("gcov failed on " + gcda.string() + ": " +
                               res.err);
    json doc;
    try {
      doc = json::parse(res.out);
    } catch (const json::exception& e) {
      throw CoverageToolFailed("unreadable gcov output for " + gcda.string() +
                               ": " + e.what());
    }
    for (const auto& file : doc.value("files", json::array())) {
      std::string path = file.value("file", "");
      if (path.empty()) continue;
      fs::path p(path);
      if (p.is_absolute()) {
        auto rel = fs::relative(p, build.root);
        if (!rel.empty() && rel.native().rfind("..", 0) != 0) p = rel;
      }
      for (const auto& line : file.value("lines", json::array())) {
        if (line.value("count", 0) > 0)
          cov.entries.emplace(p.generic_string(), line.value("line_number", 0));
      }
    }
  }
  return cov;
}

bool reached(const CoverageSet& cov_pre, const CoverageSet& cov_post,
             const ChangedLineSet& lines_pre, const ChangedLineSet& lines_post) {
  for (const auto& e : lines_pre.entries)
    if (cov_pre.entries.count(e)) return true;
  for (const auto& e : lines_post.entries)
    if (cov_post.entries.count(e)) return true;
  return false;
}

std::pair<std::string, std::string> normalize_output(const ExecutionRecord& rec) {
  auto scrub = [&](const std::string& text) {
    std::string out = strip_sanitizer_blocks(text);
    if (!rec.workdir.empty()) out = replace_all(out, rec.workdir, "<WORKDIR>");
    return out;
  };
  return {scrub(rec.stdout_data), scrub(rec.stderr_data)};
}

bool outputs_differ(const ExecutionRecord& rec_pre,
                    const ExecutionRecord& rec_post) {
  auto [out_pre, err_pre] = normalize_output(rec_pre);
  auto [out_post, err_post] = normalize_output(rec_post);
  return out_pre != out_post || err_pre != err_post ||
         rec_pre.exit_code != rec_post.exit_code;
}

RiprLevel classify(Scenario scenario,
                   const std::optional<CrashSignature>& sig_pre,
                   const std::optional<CrashSignature>& sig_post, bool differ,
                   bool reached) {
  const auto& sig_target =
      scenario == Scenario::BugFinding ? sig_post : sig_pre;
  const auto& sig_other = scenario == Scenario::BugFinding ? sig_pre : sig_post;

  if (sig_target && (!sig_other || !(*sig_target == *sig_other)))
    return RiprLevel::BugTriggered;
  // a crash on exactly one side is itself an output difference; a crash on
  // the wrong side only never counts as success
  bool one_sided_crash = sig_pre.has_value() != sig_post.has_value();
  if (differ || one_sided_crash) return RiprLevel::OutputChanged;
  if (reached) return RiprLevel::Reached;
  return RiprLevel::NotReached;
}

} // namespace regrest
