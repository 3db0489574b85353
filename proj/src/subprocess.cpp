#include "regrest/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <vector>

#include "regrest/errors.hpp"

extern char** environ;

namespace regrest {

namespace {

void set_cloexec(int fd) { fcntl(fd, F_SETFD, FD_CLOEXEC); }

double now_sec() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

} // namespace

RunResult run_process(const RunSpec& spec) {
  if (spec.argv.empty()) throw SpawnFailed("empty argv");

  int out_pipe[2], err_pipe[2], in_pipe[2], exec_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0 || pipe(in_pipe) != 0 ||
      pipe(exec_pipe) != 0)
    throw SpawnFailed("pipe() failed");
  set_cloexec(out_pipe[0]);
  set_cloexec(err_pipe[0]);
  set_cloexec(in_pipe[1]);
  // both ends close-on-exec: a successful exec closes the write end and the
  // parent reads EOF; an exec failure writes errno through it instead
  set_cloexec(exec_pipe[0]);
  set_cloexec(exec_pipe[1]);

  std::vector<std::string> env_storage;
  std::vector<char*> envp;
  for (char** e = environ; *e; ++e) {
    std::string entry(*e);
    auto eq = entry.find('=');
    if (eq != std::string::npos && spec.env_extra.count(entry.substr(0, eq)))
      continue;
    env_storage.push_back(std::move(entry));
  }
  for (const auto& [k, v] : spec.env_extra) env_storage.push_back(k + "=" + v);
  envp.reserve(env_storage.size() + 1);
  for (auto& s : env_storage) envp.push_back(s.data());
  envp.push_back(nullptr);

  std::vector<char*> argv;
  argv.reserve(spec.argv.size() + 1);
  for (const auto& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  pid_t pid = fork();
  if (pid < 0) throw SpawnFailed("fork() failed");
  if (pid == 0) {
    setpgid(0, 0); // own process group so the watchdog can kill helpers too
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    dup2(err_pipe[1], 2);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    if (spec.cwd && chdir(spec.cwd->c_str()) != 0) {
      int err = errno;
      (void)!write(exec_pipe[1], &err, sizeof err);
      _exit(127);
    }
    execvpe(argv[0], argv.data(), envp.data());
    int err = errno;
    (void)!write(exec_pipe[1], &err, sizeof err);
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  close(exec_pipe[1]);

  int exec_errno = 0;
  if (read(exec_pipe[0], &exec_errno, sizeof exec_errno) > 0) {
    close(exec_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(err_pipe[0]);
    int status;
    waitpid(pid, &status, 0);
    throw SpawnFailed("cannot start " + spec.argv[0] + ": " +
                      std::strerror(exec_errno));
  }
  close(exec_pipe[0]);

  // Feed stdin up front; inputs are small (test bodies), a full nonblocking
  // writer loop is not needed, but guard against a child that never reads.
  fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
  size_t written = 0;
  while (written < spec.stdin_data.size()) {
    ssize_t n = write(in_pipe[1], spec.stdin_data.data() + written,
                      spec.stdin_data.size() - written);
    if (n <= 0) break;
    written += size_t(n);
  }
  close(in_pipe[1]);

  RunResult res;
  const double start = now_sec();
  const double deadline =
      spec.timeout_sec > 0 ? start + spec.timeout_sec : 0;

  struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  bool open_fd[2] = {true, true};
  std::string* sinks[2] = {&res.out, &res.err};
  char buf[65536];

  while (open_fd[0] || open_fd[1]) {
    int timeout_ms = -1;
    if (deadline > 0) {
      double left = deadline - now_sec();
      if (left <= 0) {
        kill(-pid, SIGKILL);
        res.timed_out = true;
        timeout_ms = 1000; // drain what remains, pipes close on kill
      } else {
        timeout_ms = int(left * 1000) + 1;
      }
    }
    int nready = poll(fds, 2, timeout_ms);
    if (nready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (nready == 0) continue; // deadline handled at top of loop
    for (int i = 0; i < 2; ++i) {
      if (!open_fd[i] || fds[i].revents == 0) continue;
      ssize_t n = read(fds[i].fd, buf, sizeof buf);
      if (n > 0) {
        sinks[i]->append(buf, size_t(n));
      } else {
        open_fd[i] = false;
        fds[i].fd = -1;
      }
    }
  }
  close(out_pipe[0]);
  close(err_pipe[0]);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  res.wall_time = now_sec() - start;
  if (res.timed_out)
    res.exit_code = kTimeoutExitCode;
  else if (WIFEXITED(status))
    res.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    res.exit_code = -WTERMSIG(status);
  return res;
}

} // namespace regrest
