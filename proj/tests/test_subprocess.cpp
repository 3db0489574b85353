#include "doctest.h"

#include "regrest/errors.hpp"
#include "regrest/subprocess.hpp"

using namespace regrest;

TEST_CASE("captures stdout and stderr separately") {
  RunSpec spec;
  spec.argv = {"/bin/sh", "-c", "echo out; echo err 1>&2"};
  auto res = run_process(spec);
  CHECK(res.ok());
  CHECK(res.out == "out\n");
  CHECK(res.err == "err\n");
}

TEST_CASE("propagates exit codes and signals") {
  RunSpec spec;
  spec.argv = {"/bin/sh", "-c", "exit 7"};
  CHECK(run_process(spec).exit_code == 7);
  spec.argv = {"/bin/sh", "-c", "kill -SEGV $$"};
  CHECK(run_process(spec).exit_code == -11);
}

TEST_CASE("feeds stdin and honors cwd and env") {
  RunSpec spec;
  spec.argv = {"/bin/sh", "-c", "cat; pwd; printf '%s\\n' \"$REGREST_X\""};
  spec.stdin_data = "piped";
  spec.cwd = "/tmp";
  spec.env_extra = {{"REGREST_X", "42"}};
  auto res = run_process(spec);
  CHECK(res.ok());
  CHECK(res.out == "piped/tmp\n42\n");
}

TEST_CASE("kills the whole process group on timeout") {
  RunSpec spec;
  spec.argv = {"/bin/sh", "-c", "sleep 30"};
  spec.timeout_sec = 0.3;
  auto res = run_process(spec);
  CHECK(res.timed_out);
  CHECK(res.exit_code == kTimeoutExitCode);
  CHECK(res.wall_time < 5.0);
}

TEST_CASE("missing program throws SpawnFailed") {
  RunSpec spec;
  spec.argv = {"/no/such/binary-regrest"};
  CHECK_THROWS_AS(run_process(spec), SpawnFailed);
}
