#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace regrest {

// Exit code reported for a process killed by the timeout watchdog.
inline constexpr int kTimeoutExitCode = -9;

struct RunSpec {
  std::vector<std::string> argv;
  std::optional<std::string> cwd;
  std::map<std::string, std::string> env_extra; // merged over current env
  double timeout_sec = 0;                       // 0 = no timeout
  std::string stdin_data;
};

struct RunResult {
  std::string out;
  std::string err;
  int exit_code = 0; // negative = terminated by signal -exit_code
  bool timed_out = false;
  double wall_time = 0;

  bool ok() const { return exit_code == 0 && !timed_out; }
};

// Spawns argv[0] with fork/exec, captures stdout and stderr separately and
// kills the whole process group once the deadline passes. Throws SpawnFailed
// when the child cannot be started at all.
RunResult run_process(const RunSpec& spec);

} // namespace regrest
